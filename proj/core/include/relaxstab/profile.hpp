#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/system.hpp"

namespace relaxstab {

/// Steady traveling wave w̄(x1) in the frame moving with speed s, sampled on [-L, L].
struct WaveProfile {
  std::vector<double> grid;
  std::vector<Vec> values;
  std::vector<Vec> derivs;
  double speed = 0.0;
  Vec w_minus, w_plus;
  /// Exponential approach rate to the endstates; +inf for a constant profile.
  double decay_rate = 0.0;
  nlohmann::json params = nlohmann::json::object();

  int dim() const { return static_cast<int>(w_minus.size()); }
  std::size_t size() const { return grid.size(); }
  double half_length() const { return grid.back(); }
  bool is_constant() const { return (w_minus - w_plus).norm() == 0.0; }
};

/// Closed-form Jin-Xin/Burgers profile from the scalar reduction
/// (a^2 - s^2) u' = f(u) - s u - c0,  v = s u + c0.
WaveProfile solve_profile_jinxin(double a, double u_minus, double u_plus, double L = 40.0,
                                 std::size_t nodes = 4001);

struct ShootingOptions {
  double L = 40.0;
  std::size_t nodes = 4001;
  /// Departure distance from w- along its unstable direction.
  double epsilon = 1e-6;
  /// Endstate matching tolerance at x = L.
  double tol = 1e-6;
  /// Budget for the approach from w- to the phase crossing.
  double max_length = 1e4;
  int phase_component = 0;
  /// Value of the phase component at x = 0; defaults to the endstate midpoint.
  std::optional<double> phase_value;
  int substeps = 4;
};

/// Heteroclinic connection of (A1(w) - s) w' = r(w) from w_minus to w_plus, computed by
/// shooting along the one-dimensional unstable manifold of w_minus and re-integrating
/// both ways from the phase crossing.
WaveProfile solve_profile_shooting(const SystemSpec& sys, const Vec& w_minus, const Vec& w_plus, double s,
                                   const ShootingOptions& opt = {});

WaveProfile constant_profile(const Vec& w0, double s, double L = 40.0, std::size_t nodes = 401);

/// Interpolated (w̄, w̄') at x; endstates with zero derivative beyond the grid.
std::pair<Vec, Vec> sample_profile(const WaveProfile& profile, double x);

/// Reusable form of sample_profile; keeps a reference to the profile.
class ProfileSampler {
 public:
  explicit ProfileSampler(const WaveProfile& profile);
  std::pair<Vec, Vec> operator()(double x) const;

 private:
  const WaveProfile* profile_;
  std::vector<PchipInterpolant> values_, derivs_;
};

/// Max over nodes of |(A1(w̄) - s) w̄' - r(w̄)|.
double profile_residual(const SystemSpec& sys, const WaveProfile& profile);

/// Least-squares exponential rate of |w̄ - w±| over the tails where it lies in [1e-12, 1e-2].
double fit_decay_rate(const WaveProfile& profile);

/// Half-length at which the fitted approach to the endstates reaches `tol_end`.
double suggested_half_length(const WaveProfile& profile, double tol_end = 1e-8);

/// CSV columns x, w_1..w_n, dw_1..dw_n plus a JSON sidecar `<stem>.json`.
void write_profile(const WaveProfile& profile, const std::filesystem::path& csv_path);
WaveProfile read_profile(const std::filesystem::path& csv_path);

}  // namespace relaxstab

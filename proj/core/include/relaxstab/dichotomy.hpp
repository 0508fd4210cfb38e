#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/profile.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

/// Eigen-split of a constant matrix by the sign of Re μ.
struct SpectralSplit {
  CMat stable, unstable;  // orthonormal bases
  CVec stable_values, unstable_values;
  CMat stable_projector;  // spectral projector onto the stable subspace
  /// min |Re μ| over the whole spectrum.
  double gap = 0.0;
  int rank_stable() const { return static_cast<int>(stable.cols()); }
  int rank_unstable() const { return static_cast<int>(unstable.cols()); }
};

/// Throws a center-spectrum error if some |Re μ| < gap_tol.
SpectralSplit limit_spectral_split(const CMat& g_inf, double gap_tol);

/// Exponential dichotomy of v' = G(x) v on the field grid.
///
/// P_plus projects onto data whose solutions decay as x increases; its range is spanned by the
/// first j columns of the frame, the range of P_minus by the last k.
struct DichotomyData {
  std::vector<double> grid;
  std::vector<CMat> frame;  // T(x) = [r_1+ .. r_j+ | r_1- .. r_k-]
  std::vector<CMat> P_plus, P_minus;
  int j = 0, k = 0;
  double C = 1.0, theta = 0.0;  // empirical decay fit
  /// min over endstates of the relevant decay rates (stable at +L, unstable at -L).
  double endstate_gap = 0.0;
  double min_frame_singular_value = 0.0;

  int dim() const { return j + k; }
  std::size_t size() const { return grid.size(); }
};

struct DichotomyOptions {
  double gap_tol = 1e-8;
  /// Smallest admissible σ_min of the normalized frame before a turning point is suspected.
  double angle_tol = 1e-6;
  /// Propagator window width in units of 1/θ, capped so that |G| * width stays below 30.
  double window_factor = 1.0;
  std::size_t fit_samples = 40;
  std::uint64_t seed = 0;
};

/// Continuous orthonormalization of the stable frame (backward from +L, where the stable
/// subspace attracts) and the unstable frame (forward from -L).
DichotomyData propagate_subspaces(const ResolventField& field, const DichotomyOptions& opt = {});

/// Propagator S(x, y) of v' = G v between grid nodes i and j (|x - y| within one window).
CMat propagator(const ResolventField& field, std::size_t from, std::size_t to);

struct DichotomyCheck {
  double worst_commutator = 0.0;  // max |P+(x) S - S P+(y)| / |S|
  double worst_decay_excess = 0.0;  // max |P± S| / (C e^{-θ|x-y|})
  bool pass = false;
  std::size_t pairs = 0;
};

/// Checks (dcomm) and the decay bound on `pairs` random node pairs at most one window apart.
DichotomyCheck verify_dichotomy(const DichotomyData& data, const ResolventField& field, std::size_t pairs, double tol,
                                std::uint64_t seed = 0, double decay_slack = 2.0);

struct BlockDiagonal {
  std::vector<CMat> lambda_plus, lambda_minus;
  std::vector<CMat> frame_derivative;
  /// max over nodes of |off-diagonal blocks| / max(1, |Λ|).
  double residual = 0.0;
  double worst_frame_condition = 0.0;
};

/// Λ = T^{-1} G T - T^{-1} T' with T' from fourth-order differences of the frame.
BlockDiagonal block_diagonalize(const ResolventField& field, const DichotomyData& data, double cond_cap = 1e8);

struct TurningPoint {
  double x = 0.0;
  double separation = 0.0;
  double condition = 0.0;
};

struct TurningPointOptions {
  double gap_tol = 1e-6;
  double cond_cap = 1e4;
};

struct TurningPointReport {
  Vec ray;
  std::vector<TurningPoint> locations;
  /// Local minima where only one of the two criteria held.
  std::vector<TurningPoint> warnings;
};

/// Scans x_grid for local minima of the eigenvalue separation of symbol(x), refines them by
/// golden-section search, and reports those with separation < gap_tol and eigenvector
/// condition > cond_cap.
TurningPointReport detect_turning_points(const std::function<CMat(double)>& symbol, const std::vector<double>& x_grid,
                                         const TurningPointOptions& opt = {});

/// Principal symbol G0(x) = -(A1 - s)^{-1} (Σ_{j>=2} i η_j A_j + i τ) along the profile, with
/// ray = (η_2, .., η_d, τ).
TurningPointReport detect_turning_points(const SystemSpec& sys, const WaveProfile& profile, const Vec& ray,
                                         const std::vector<double>& x_grid, const TurningPointOptions& opt = {});

nlohmann::json to_json(const DichotomyCheck& check, const DichotomyData& data);
nlohmann::json to_json(const TurningPointReport& report);

}  // namespace relaxstab

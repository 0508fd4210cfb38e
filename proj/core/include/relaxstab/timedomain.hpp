#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/profile.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

enum class SimMode { linearized, nonlinear };
enum class SimBoundary { outflow, periodic };

/// External forcing f(t, x).
using Forcing = std::function<Vec(double t, double x)>;
/// Initial perturbation v0(x).
using InitialData = std::function<Vec(double x)>;

struct SimConfig {
  double L = 40.0;
  std::size_t nodes = 801;
  double cfl = 0.5;
  SimMode mode = SimMode::linearized;
  SimBoundary boundary = SimBoundary::outflow;
  double T = 20.0;
  double record_dt = 0.05;
  /// Sobolev order of the energy (0..3) and exponential weight rate a in α = e^{a x}.
  int s = 1;
  double weight_rate = 0.0;
  double blowup_cap = 1e3;
  double boundary_tol = 1e-6;
  bool keep_history = true;
};

struct SimState {
  std::vector<double> grid;
  double dx = 0.0;
  std::vector<Vec> v;
  double t = 0.0;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E, L2, F;  // |v|^2_{H^s_α}, |v|^2_{L2_α}, |f|^2_{H^s_α}
};

/// Stored trajectory; f is the effective forcing (external plus the nonlinear remainder
/// relative to the linearized operator).
struct History {
  std::vector<double> grid;
  double dx = 0.0;
  std::vector<double> times;
  std::vector<std::vector<Vec>> v, f;
};

struct SimRun {
  EnergyTrace trace;
  History history;
  SimState final_state;
  /// Largest |v| in the two boundary cells over the run.
  double boundary_max = 0.0;
  bool boundary_ok = true;
};

/// Upwind-biased third-order flux-split finite differences with SSP-RK3 for
/// v_t = -∂x(f1(w̄+v) - f1(w̄) - s v) + r(w̄+v) - r(w̄) + f (nonlinear) or its linearization
/// v_t = -∂x((A1(w̄) - s) v) + dr/dw(w̄) v + f about the profile.
class Simulator {
 public:
  Simulator(const SystemSpec& sys, const WaveProfile& profile, const SimConfig& cfg, Forcing forcing = {});

  SimState initial_state(const InitialData& v0) const;
  /// One SSP-RK3 step; throws a step error on CFL violation and an instability error on blowup.
  void step(SimState& state, double dt) const;
  SimRun run(const InitialData& v0) const;

  /// Right-hand side without forcing, in the configured mode.
  std::vector<Vec> operator_rhs(const std::vector<Vec>& v) const;
  /// Linearized right-hand side without forcing.
  std::vector<Vec> linear_rhs(const std::vector<Vec>& v) const;
  std::vector<Vec> forcing_at(double t) const;

  double max_speed() const { return alpha_; }
  double stable_dt() const;
  const SimConfig& config() const { return cfg_; }
  const std::vector<double>& grid() const { return grid_; }
  double dx() const { return dx_; }

 private:
  std::vector<Vec> rhs(const std::vector<Vec>& v, bool linear) const;

  const SystemSpec* sys_;
  SimConfig cfg_;
  Forcing forcing_;
  std::vector<double> grid_;
  double dx_ = 0.0;
  std::vector<Vec> wbar_, f1bar_, rbar_;
  std::vector<Mat> a_, dr_;
  double alpha_ = 0.0;
  double speed_ = 0.0;
};

/// (Σ_{k<=s} |α ∂^k v|^2, |α v|^2) with α = e^{a x}; derivatives by fourth-order differences
/// (centered and wrapped when periodic).
std::pair<double, double> measure_energy(const std::vector<Vec>& v, const std::vector<double>& grid, double dx, int s,
                                         double weight_rate = 0.0, bool periodic = false);

struct DampingFit {
  bool feasible = false;
  double eta = 0.0;
  double C = 0.0;
  /// Least-squares residual of dE/dt + η E - C (L2 + F), relative to |dE/dt|.
  double residual = 0.0;
  /// Time of a sample that no (η, C) within the caps satisfies (refutation certificate).
  std::optional<double> refutation_time;
  std::size_t samples = 0;
};

struct DampingFitOptions {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::infinity();
  double eta_max = 10.0;
  std::size_t eta_points = 2000;
  double C_cap = 1e6;
  /// Slack, relative to E, granted to samples where L2 + F vanishes.
  double rel_tol = 1e-6;
};

/// Grid search over η with least-squares C; C is then raised to the smallest value making
/// dE/dt <= -η E + C (L2 + F) hold at every sample in the window.
DampingFit verify_classical_damping(const EnergyTrace& trace, const DampingFitOptions& opt = {});

/// min over trace times T of C e^{-ηT} E(0) + C ∫0^T e^{-η(T-t)} (L2 + F) dt - E(T), with the
/// leading constant taken as max(C, 1).
double verify_integrated_damping(const EnergyTrace& trace, double eta, double C);

struct ShortTimeResult {
  double C_short = 0.0;
  bool refuted = false;
};

/// Smallest C with E(t) <= C E(0) + C ∫0^t F over the trace; refuted when non-finite or above cap.
ShortTimeResult verify_short_time(const EnergyTrace& trace, double cap = 1e8);

/// χ1 ramps 0 -> 1 on [0, τc], χT ramps 1 -> 0 on [T - τc, T]; quintic smoothstep, C^2.
struct CutoffPair {
  double tau_c = 1.0;
  double T = 1.0;

  double chi1(double t) const;
  double chiT(double t) const;
  double dchi1(double t) const;
  double dchiT(double t) const;
  double d2chi1(double t) const;
  double d2chiT(double t) const;
  double chi(double t) const { return chi1(t) * chiT(t); }
  double dchi(double t) const { return dchi1(t) * chiT(t) + chi1(t) * dchiT(t); }
};

struct TruncationReport {
  double gamma = 0.0;
  double tau_c = 0.0;
  /// ∫ e^{2γ(T-t)} |ṽ|^2_{H^s} over ∫ e^{2γ(T-t)} (|f̃|^2_{H^s} + |ṽ|^2_{L2}).
  double C2 = 0.0;
  double gparcor_lhs = 0.0, gparcor_rhs = 0.0;
  /// Plateau part of the left side, bounded by C2 times the same right side.
  double tkey_lhs = 0.0;
  bool tkey_holds = false;
  /// Constants of the front and tail bounds.
  double C_front = 0.0, C_tail = 0.0;
  /// Constant in the assembled integrated damping bound at rate η = -2γ.
  double C_idamp = 0.0;
  /// max |ṽ - v| on the plateau.
  double plateau_defect = 0.0;
  bool pass = false;
};

/// Cuts the stored history off with χ1 χT, forms f̃ = χ' v + χ f, and measures the constants of
/// the truncated weighted inequality and its front, tail and assembled companions.
TruncationReport truncation_pipeline(const History& history, const CutoffPair& cutoffs, double gamma, int s,
                                     double weight_rate = 0.0, double C2_cap = 1e6);

/// Gaussian amp * exp(-(x - center)^2 / (2 width^2)) * direction.
InitialData gaussian_data(Vec direction, double amplitude, double center = 0.0, double width = 2.0);

nlohmann::json to_json(const DampingFit& fit);
nlohmann::json to_json(const TruncationReport& report);
void write_trace_csv(const EnergyTrace& trace, const std::filesystem::path& path);

}  // namespace relaxstab

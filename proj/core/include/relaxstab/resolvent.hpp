#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/banded.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

/// Transverse frequency η (d - 1 entries) and Laplace frequency λ = γ + iτ.
struct FrequencyPoint {
  Vec eta;
  cplx lambda{1.0, 0.0};

  double gamma() const { return lambda.real(); }
  double tau() const { return lambda.imag(); }
  /// |(η, τ)|, the frequency entering the Ĥs weight.
  double weight_frequency() const;
  /// |(η, λ)|, the size used for "sufficiently large" thresholds.
  double magnitude() const;
};

/// Frozen perturbation v(x1) of the (nlpres) family; empty means v = 0.
using FrozenPerturbation = std::function<Vec(double)>;

/// Smooth bump amp * exp(-(x - center)^2 / (2 width^2)) * direction.
FrozenPerturbation gaussian_perturbation(Vec direction, double amplitude, double center = 0.0, double width = 2.0);

/// Samples of G(x) = -(A1(w̄+v) - s)^{-1} (λ + Σ_{j>=2} iη_j A_j(w̄+v) + E(w̄)) at the nodes
/// and interval midpoints of a uniform grid on [-L, L].
struct ResolventField {
  FrequencyPoint fp;
  std::vector<double> grid;
  double h = 0.0;
  std::vector<CMat> G, G_mid;
  std::vector<Mat> A1inv, A1inv_mid;
  CMat G_minus, G_plus;
  /// Constant added to G by an exponential weight e^{a x}; recorded for reporting.
  double weight_rate = 0.0;

  int dim() const { return static_cast<int>(G_minus.rows()); }
  std::size_t size() const { return grid.size(); }
};

struct ResolventGrid {
  double L = 40.0;
  /// Node spacing is min(h_max, cells_per_unit_rate / |G±∞|).
  double h_max = 0.05;
  double cells_per_unit_rate = 0.25;
  std::size_t max_nodes = 400001;
};

ResolventField assemble_G(const SystemSpec& sys, const WaveProfile& profile, const FrequencyPoint& fp,
                          const ResolventGrid& grid = {}, const FrozenPerturbation& v = {});

/// Conjugation by the weight e^{a x}: ṽ = e^{a x} v solves ṽ' = (G + a) ṽ + e^{a x} A1^{-1} f.
ResolventField weight_conjugate(const ResolventField& field, double a);

/// Vector field sampled on the nodes of a ResolventField grid.
using GridFunction = std::vector<CVec>;

/// Hermite-Simpson collocation of v' = G v + A1^{-1} f with spectral-projection boundary
/// conditions (no stable modes of G-∞ at -L, no unstable modes of G+∞ at +L), factorized once.
class ResolventSolver {
 public:
  ResolventSolver(const ResolventField& field, double gap_tol = 1e-8);

  GridFunction solve(const GridFunction& f) const;
  /// Adjoint of f -> v in the Euclidean inner product on node samples.
  GridFunction adjoint(const GridFunction& v) const;
  /// L2 norm of the collocation defect (v_{i+1} - v_i - h/6 (F_i + 4 F_m + F_{i+1})) / h.
  double residual(const GridFunction& f, const GridFunction& v) const;
  const ResolventField& field() const { return *field_; }
  /// Boundary-condition counts (stable dimension at -L, unstable dimension at +L).
  std::pair<int, int> boundary_ranks() const { return {k_minus_, j_plus_}; }

 private:
  CVec forcing_rows(const GridFunction& f) const;

  const ResolventField* field_;
  int n_, k_minus_, j_plus_;
  std::unique_ptr<BandedMatrix> matrix_;
};

GridFunction solve_resolvent_bvp(const ResolventField& field, const GridFunction& f);

/// ‖f‖_{H^s} + (1 + freq)^s ‖f‖_{L2}, with ‖f‖_{H^s}^2 = Σ_{k<=s} ‖∂^k f‖^2 (integer s).
double hat_norm(const GridFunction& f, double h, int s, double freq);
double l2_norm(const GridFunction& f, double h);
double sobolev_norm(const GridFunction& f, double h, int s);

struct ForcingResponse {
  double f_hat = 0, f_l2 = 0;
  double v_hat = 0, v_l2 = 0, v_h1 = 0;
  bool refined = false;  // produced by power iteration
};

struct GainOptions {
  int s = 1;
  int trials = 16;
  int power_iterations = 4;
};

/// Randomized smooth forcings followed by power-iteration refinement in L2; every
/// response is returned so that ratios can be formed per forcing.
std::vector<ForcingResponse> sample_responses(const ResolventSolver& solver, const GainOptions& opt, std::uint64_t seed,
                                              std::uint64_t stream);

/// Randomized lower bound of the Ĥs operator norm (max over responses of v_hat / f_hat).
double estimate_resolvent_gain(const std::vector<ForcingResponse>& responses);

struct DampingCheck {
  double worst_ratio = 0.0;
  bool pass = false;
};

/// ‖v‖_Ĥs (Re λ - γ*) / (‖f‖_Ĥs + ‖v‖_L2) <= C over all responses.
DampingCheck verify_pdamp(const std::vector<ForcingResponse>& responses, const FrequencyPoint& fp, double C,
                          double gamma_star);
/// ‖v‖_Ĥs (Re λ - γ*) / ‖f‖_Ĥs <= C over all responses.
DampingCheck verify_hfres(const std::vector<ForcingResponse>& responses, const FrequencyPoint& fp, double C,
                          double gamma_star);

struct SweepPoint {
  FrequencyPoint fp;
  bool singular = false;
  std::string singular_reason;
  double gain = 0, pdamp_ratio = 0, hfres_ratio = 0;
  double absorption = 0;      // max ‖v‖_L2 / (‖v‖_H1 + ‖f‖_L2)
  double apriori_ratio = 0;   // max ‖v‖_Ĥs / ‖v‖_L2
  double l2_gain = 0;         // max ‖v‖_L2 / ‖f‖_L2
  double residual = 0;
  bool absorbable = false;
  bool pdamp_pass = false, hfres_pass = false;
};

struct SweepOptions {
  GainOptions gain;
  ResolventGrid grid;
  double gamma_star = -0.1;
  /// Common damping constant; fitted as fit_safety * max pdamp ratio when absent.
  std::optional<double> C;
  double fit_safety = 1.25;
  double gap_tol = 1e-8;
  /// |λ| above which the absorption exponent is fitted.
  double large_threshold = 10.0;
  double weight_rate = 0.0;
  std::uint64_t seed = 0;
};

struct EquivalenceReport {
  std::vector<SweepPoint> points;
  double C = 0.0;
  double gamma_star = 0.0;
  bool C_fitted = false;
  std::size_t singular_count = 0;
  std::size_t agree_count = 0;
  std::size_t nonsingular_count = 0;
  double agreement = 0.0;
  /// Slope of log(absorption) against log|λ| over large frequencies (expected -1).
  double absorption_exponent = 0.0;
  /// Fitted C in gain * (Re λ - γ*) <= C over large frequencies.
  double hfres_constant = 0.0;
  /// hfres constant of the bounded region, max of ‖v‖_Ĥs/‖v‖_L2 * L2 gain * (Re λ - γ*).
  double bounded_hfres_constant = 0.0;
  double max_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Runs the frequency sweep and both absorption arguments: bounded frequencies through
/// ‖v‖_Ĥs <= C ‖v‖_L2, large frequencies through ‖v‖_L2 <= ε (‖v‖_H1 + ‖f‖_L2). A point passes
/// pdamp when its ratio is <= C; it passes hfres when its ratio is below the constant
/// C (1 + ε)(Re λ - γ*) / (Re λ - γ* - C ε) obtained by absorbing the L2 term (absorbable points),
/// or below the bounded-region constant built from the a priori bound ‖v‖_Ĥs <= b ‖v‖_L2 and the
/// L2 gain (points where the L2 term cannot be absorbed).
EquivalenceReport verify_equivalence(const SystemSpec& sys, const WaveProfile& profile,
                                     const std::vector<FrequencyPoint>& grid, const SweepOptions& opt,
                                     const FrozenPerturbation& v = {});

/// λ = γ + iτ with |λ| log-spaced in [r_min, r_max], for each γ in `gammas` and both signs of τ.
std::vector<FrequencyPoint> frequency_grid(const std::vector<double>& gammas, double r_min, double r_max,
                                           std::size_t radii, const Vec& eta = Vec());

nlohmann::json to_json(const EquivalenceReport& report);
void write_sweep_csv(const EquivalenceReport& report, const std::filesystem::path& path);

}  // namespace relaxstab

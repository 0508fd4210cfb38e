#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/profile.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

struct SymbolMatrix {
  Vec base_state;
  Vec eta;
  Mat matrix;
};

/// T(w, η) = Σ_j η_j A_j(w).
SymbolMatrix assemble_symbol(const SystemSpec& sys, const Vec& w, const Vec& eta);

/// Generator symbol M(η) = -i T(w0, η) + dr/dw(w0) of the frozen-coefficient evolution v_t = M v.
CMat generator_symbol(const SystemSpec& sys, const Vec& w0, const Vec& eta);

struct HypothesisTolerances {
  double delta = 1e-8;       // singular-value margin for A1 - s
  double imag_tol = 1e-8;    // |Im μ| allowed in σ(T), relative to max(1, |T|)
  double sep_tol = 1e-6;     // eigenvalue separation counted as a coalescence
  double cond_cap = 1e8;     // eigenvector-matrix condition cap (semisimplicity proxy)
  double projector_cap = 1e4;  // spectral-projector norm counted as a blowup
  double coupling_tol = 1e-8;  // |dr/dw r| below this counts as uncoupled
};

struct NoncharacteristicResult {
  double margin = 0.0;
  double worst_x = 0.0;
  bool pass = false;
};

/// min over the profile grid of σ_min(A1(w̄(x)) - s Id).
NoncharacteristicResult check_noncharacteristic(const SystemSpec& sys, const WaveProfile& profile, double delta);

struct HyperbolicityResult {
  bool pass = true;
  double worst_imag = 0.0;
  double worst_cond = 1.0;
  Vec worst_eta;
};

HyperbolicityResult check_hyperbolicity(const SystemSpec& sys, const Vec& w, const std::vector<Vec>& eta_samples,
                                        const HypothesisTolerances& tol = {});

struct CoalescenceFlag {
  std::size_t index = 0;  // position along the path
  Vec eta;
  double separation = 0.0;
  double projector_norm = 0.0;
};

struct GeometricResult {
  bool pass = true;
  std::vector<CoalescenceFlag> flags;
  /// Coalescences with bounded projectors (analytic crossings); reported, not failed.
  std::size_t benign_crossings = 0;
};

/// Tracks eigenvalue branches and spectral projectors of T(w, η) along a sampled path on
/// the unit η-sphere. Flags points where branches meet while projectors blow up.
GeometricResult check_geometric_regularity(const SystemSpec& sys, const Vec& w, const std::vector<Vec>& sphere_path,
                                           const HypothesisTolerances& tol = {});

struct ChfResult {
  /// Largest θ with max Re σ(M(η)) <= -θ over grid points with |η| >= eta_min.
  double theta = 0.0;
  /// Smallest grid radius beyond which θ_req holds; +inf if it never does.
  double eta_threshold = 0.0;
  double theta_req = 0.0;
  bool pass = false;
  /// Per-radius worst real part, ascending in radius.
  std::vector<std::pair<double, double>> radial_profile;
};

ChfResult check_chf(const SystemSpec& sys, const Vec& w0, double eta_min, const std::vector<Vec>& eta_grid,
                    double theta_req);

struct KawashimaResult {
  bool genuine_coupling = false;
  double worst_coupling = 0.0;
  Vec worst_eta;
  /// A symmetric A0 > 0 exists with A0 A_j symmetric and A0 dr/dw + (A0 dr/dw)^T <= 0.
  bool symmetric_dissipative = false;
  double dissipation_defect = 0.0;
  Mat symmetrizer;
  bool pass = false;
};

/// Kawashima-Shizuta condition: genuine coupling of every eigenspace of T(w0, η) to dr/dw,
/// within a symmetric-dissipative structure.
KawashimaResult check_kawashima(const SystemSpec& sys, const Vec& w0, const std::vector<Vec>& eta_samples,
                                const HypothesisTolerances& tol = {});

/// Unit directions in R^d: ±1 for d = 1, `count` angles on the circle for d = 2,
/// a Fibonacci lattice for d >= 3.
std::vector<Vec> unit_directions(int d, std::size_t count);

/// Half great-circle from e_1 to -e_1 through e_2 (d >= 2), or {e_1, -e_1} for d = 1.
std::vector<Vec> half_loop(int d, std::size_t count);

/// Directions times log-spaced radii in [r_min, r_max].
std::vector<Vec> ray_grid(const std::vector<Vec>& directions, double r_min, double r_max, std::size_t radii);

struct HypothesisReport {
  NoncharacteristicResult a1;
  HyperbolicityResult a2;
  GeometricResult a3;
  ChfResult chf;
  KawashimaResult kawashima;
  bool pass() const { return a1.pass && a2.pass && a3.pass && chf.pass; }
};

nlohmann::json to_json(const HypothesisReport& report);

}  // namespace relaxstab

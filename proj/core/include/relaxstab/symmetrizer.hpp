#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relaxstab/dichotomy.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/system.hpp"

namespace relaxstab {

/// Hermitian field S(x) with sup bound C0. A field with a single node is constant in x.
struct SymmetrizerField {
  std::vector<double> grid;
  std::vector<CMat> S;
  double C0 = 0.0;
  /// Coercivity from the construction (constant-frame case); NaN when only measured later.
  double theta = 0.0;
  std::string provenance = "user";

  bool is_constant() const { return S.size() == 1; }
  int dim() const { return S.empty() ? 0 : static_cast<int>(S.front().rows()); }
};

/// Q_plus on the stable block, Q_minus on the unstable block.
struct LyapunovForms {
  std::vector<double> grid;
  std::vector<CMat> Q_plus, Q_minus;
};

/// Q+' = -I - Λ+* Q+ - Q+ Λ+ integrated backward from the algebraic solution at the right end,
/// Q-' = I - Λ-* Q- - Q- Λ- forward from the left end (RK4, cubic midpoint interpolation of Λ).
LyapunovForms lyapunov_Q(const std::vector<CMat>& lambda_plus, const std::vector<CMat>& lambda_minus,
                         const std::vector<double>& grid);

/// S = T^{-*} blockdiag(-Q+, Q-) T^{-1}.
SymmetrizerField assemble_symmetrizer(const std::vector<CMat>& frame, const LyapunovForms& forms);

/// Dichotomy, block diagonalization, Lyapunov forms and assembly in one call.
SymmetrizerField lyapunov_symmetrizer(const ResolventField& field, const DichotomyOptions& opt = {},
                                      double cond_cap = 1e8);

/// S = R̃* R̃ normalized to |S| = 1, with R̃ diagonalizing T(η) = i A(η) - dr/dw at w0 + v0.
/// `theta` is the largest θ with Re(S T) >= θ S.
SymmetrizerField constant_symmetrizer(const SystemSpec& sys, const Vec& w0, const Vec& eta, const Vec& v0 = Vec(),
                                      double sep_tol = 1e-6, double cond_cap = 1e8);

struct Certificate {
  double theta_measured = 0.0;
  double worst_x = 0.0;
  double c0_measured = 0.0;
  double hermitian_defect = 0.0;
  double energy_check = 0.0;
  std::size_t energy_trials = 0;
  double theta_req = 0.0;
  bool pass = false;
};

/// θ_measured = min over the grid of ½ λ_min(2 Re(S G) + S'), S' by fourth-order differences.
/// With energy_trials > 0 and θ_measured > 0 the energy estimate is sampled as well.
Certificate verify_symmetrizer(const SymmetrizerField& S, const ResolventField& field, double theta_req,
                               std::size_t energy_trials = 100, std::uint64_t seed = 0);

/// Worst θ² ‖u‖² / (C0² ‖f‖²) over random decaying forcings f with u' = G u + f.
double energy_estimate_check(const SymmetrizerField& S, const ResolventField& field, double theta,
                             std::size_t trials, std::uint64_t seed = 0);

/// max over random stable-block trajectories z' = Λ+ z of |d/dx <z, Q+ z> + |z|^2| / max |z|^2,
/// with the derivative taken by fourth-order differences.
double lyapunov_identity_defect(const std::vector<CMat>& lambda_plus, const LyapunovForms& forms,
                                std::size_t trajectories = 20, std::uint64_t seed = 0);

nlohmann::json to_json(const Certificate& cert, const SymmetrizerField& S);
void write_symmetrizer_csv(const SymmetrizerField& S, const std::filesystem::path& path);

}  // namespace relaxstab

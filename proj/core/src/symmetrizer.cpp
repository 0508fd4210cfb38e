#include "relaxstab/symmetrizer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "relaxstab/error.hpp"

namespace relaxstab {

namespace {

CMat hermitize(const CMat& m) { return 0.5 * (m + m.adjoint()); }

double min_eig(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// RK4 for Q' = sign * I - Λ* Q - Q Λ from node `start` towards node `stop`.
std::vector<CMat> lyapunov_ode(const std::vector<CMat>& lambda, const std::vector<double>& grid, double sign,
                               bool backward) {
  const std::size_t N = grid.size();
  std::vector<CMat> q(N);
  if (N == 0 || lambda.front().rows() == 0) {
    for (auto& m : q) m = CMat(0, 0);
    return q;
  }
  const Eigen::Index m = lambda.front().rows();
  const CMat id = CMat::Identity(m, m);
  auto rhs = [&](const CMat& l, const CMat& x) { return CMat(sign * id - l.adjoint() * x - x * l); };
  const std::size_t start = backward ? N - 1 : 0;
  // Algebraic solution of Λ* Q + Q Λ = sign * I at the endstate.
  q[start] = hermitize(solve_lyapunov(lambda[start], sign * id));
  for (std::size_t step = 0; step + 1 < N; ++step) {
    const std::size_t i = backward ? N - 1 - step : step;
    const std::size_t k = backward ? i - 1 : i + 1;
    const std::size_t left = std::min(i, k);
    const double h = grid[k] - grid[i];
    const CMat lm = midpoint4(lambda, left);
    const CMat k1 = rhs(lambda[i], q[i]);
    const CMat k2 = rhs(lm, q[i] + 0.5 * h * k1);
    const CMat k3 = rhs(lm, q[i] + 0.5 * h * k2);
    const CMat k4 = rhs(lambda[k], q[i] + h * k3);
    q[k] = hermitize(q[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return q;
}

std::vector<CMat> node_values(const SymmetrizerField& S, std::size_t N) {
  return S.is_constant() ? std::vector<CMat>(N, S.S.front()) : S.S;
}

}  // namespace

LyapunovForms lyapunov_Q(const std::vector<CMat>& lambda_plus, const std::vector<CMat>& lambda_minus,
                         const std::vector<double>& grid) {
  const std::size_t N = grid.size();
  require(N >= 2 && lambda_plus.size() == N && lambda_minus.size() == N, ErrorKind::argument,
          "Lyapunov blocks must be sampled on the grid");
  if (lambda_plus.back().rows() > 0) {
    const CVec mu = eigen_decompose(lambda_plus.back()).values;
    require(mu.real().maxCoeff() < 0.0, ErrorKind::stability, "stable block has spectrum with Re >= 0 at +L");
  }
  if (lambda_minus.front().rows() > 0) {
    const CVec mu = eigen_decompose(lambda_minus.front()).values;
    require(mu.real().minCoeff() > 0.0, ErrorKind::stability, "unstable block has spectrum with Re <= 0 at -L");
  }
  LyapunovForms out;
  out.grid = grid;
  out.Q_plus = lyapunov_ode(lambda_plus, grid, -1.0, true);
  out.Q_minus = lyapunov_ode(lambda_minus, grid, 1.0, false);
  for (std::size_t i = 0; i < N; ++i) {
    if (out.Q_plus[i].rows() > 0 && !(min_eig(out.Q_plus[i]) > 0.0))
      fail(ErrorKind::stability, "Q+ lost positivity at x = " + std::to_string(grid[i]));
    if (out.Q_minus[i].rows() > 0 && !(min_eig(out.Q_minus[i]) > 0.0))
      fail(ErrorKind::stability, "Q- lost positivity at x = " + std::to_string(grid[i]));
  }
  return out;
}

SymmetrizerField assemble_symmetrizer(const std::vector<CMat>& frame, const LyapunovForms& forms) {
  const std::size_t N = forms.grid.size();
  require(frame.size() == N, ErrorKind::argument, "frame and Lyapunov forms have different grids");
  SymmetrizerField out;
  out.grid = forms.grid;
  out.provenance = "lyapunov";
  out.theta = std::numeric_limits<double>::quiet_NaN();
  out.S.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Eigen::Index j = forms.Q_plus[i].rows(), k = forms.Q_minus[i].rows(), n = j + k;
    require(frame[i].rows() == n && frame[i].cols() == n, ErrorKind::argument, "frame size does not match blocks");
    Eigen::FullPivLU<CMat> lu(frame[i]);
    require(lu.isInvertible(), ErrorKind::conditioning, "frame is singular at x = " + std::to_string(forms.grid[i]));
    const CMat tinv = lu.inverse();
    CMat block = CMat::Zero(n, n);
    block.topLeftCorner(j, j) = -forms.Q_plus[i];
    block.bottomRightCorner(k, k) = forms.Q_minus[i];
    out.S[i] = hermitize(tinv.adjoint() * block * tinv);
    out.C0 = std::max(out.C0, spectral_norm(out.S[i]));
  }
  return out;
}

SymmetrizerField lyapunov_symmetrizer(const ResolventField& field, const DichotomyOptions& opt, double cond_cap) {
  const DichotomyData data = propagate_subspaces(field, opt);
  const BlockDiagonal blocks = block_diagonalize(field, data, cond_cap);
  const LyapunovForms forms = lyapunov_Q(blocks.lambda_plus, blocks.lambda_minus, field.grid);
  return assemble_symmetrizer(data.frame, forms);
}

SymmetrizerField constant_symmetrizer(const SystemSpec& sys, const Vec& w0, const Vec& eta, const Vec& v0,
                                      double sep_tol, double cond_cap) {
  require(eta.size() == sys.d, ErrorKind::argument, "eta must have d entries");
  require(w0.size() == sys.n, ErrorKind::argument, "base state must have n entries");
  const Vec w = v0.size() == 0 ? w0 : Vec(w0 + v0);
  const int n = sys.n;
  CMat t = -sys.relaxation_jacobian(w).cast<cplx>();
  for (int j = 0; j < sys.d; ++j) t += I_unit * eta(j) * sys.jacobian(w, j).cast<cplx>();
  const EigenDecomposition ed = eigen_decompose(t);
  const double scale = std::max(1.0, spectral_norm(t));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (std::abs(ed.values(a) - ed.values(b)) < sep_tol * scale)
        fail(ErrorKind::geometric, "eigenvalues of i A(eta) - dr/dw coalesce; no diagonalizing frame");
  const double cond = condition_number(ed.vectors);
  if (!(cond <= cond_cap))
    fail(ErrorKind::geometric, "diagonalizing frame condition " + std::to_string(cond) + " exceeds cap");
  const CMat rt = ed.vectors.inverse();
  CMat s = hermitize(rt.adjoint() * rt);
  s /= spectral_norm(s);
  // Largest θ with Re(S T) >= θ S: smallest generalized eigenvalue of (Re(S T), S).
  Eigen::LLT<CMat> llt(s);
  require(llt.info() == Eigen::Success, ErrorKind::numeric, "constant symmetrizer is not positive definite");
  const CMat linv = llt.matrixL().solve(CMat::Identity(n, n));
  SymmetrizerField out;
  out.grid = {0.0};
  out.S = {s};
  out.C0 = 1.0;
  out.theta = min_eig(linv * hermitize(s * t) * linv.adjoint());
  out.provenance = "constant-frame";
  return out;
}

double energy_estimate_check(const SymmetrizerField& S, const ResolventField& field, double theta, std::size_t trials,
                             std::uint64_t seed) {
  require(theta > 0.0, ErrorKind::argument, "energy estimate needs a positive coercivity constant");
  if (trials == 0) return 0.0;
  const ResolventSolver solver(field);
  const std::size_t N = field.size();
  const int n = field.dim();
  const double L = field.grid.back();
  double c0 = S.C0;
  auto rng = make_rng(seed, 0xe4e7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    CVec c(n);
    for (int q = 0; q < n; ++q) c(q) = cplx(normal(rng), normal(rng));
    const double center = (unit(rng) - 0.5) * L;
    const double width = 0.5 + 2.5 * unit(rng);
    const double k = 4.0 * (2.0 * unit(rng) - 1.0);
    // The solver forces with A1^{-1} f; hand it A1 g so that u' = G u + g.
    GridFunction f(N), g(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double z = (field.grid[i] - center) / width;
      g[i] = std::exp(-0.5 * z * z) * std::exp(I_unit * (k * field.grid[i])) * c;
      f[i] = field.A1inv[i].inverse().cast<cplx>() * g[i];
    }
    const GridFunction u = solver.solve(f);
    const double nu = l2_norm(u, field.h), ng = l2_norm(g, field.h);
    worst = std::max(worst, theta * theta * nu * nu / (c0 * c0 * ng * ng));
  }
  return worst;
}

Certificate verify_symmetrizer(const SymmetrizerField& S, const ResolventField& field, double theta_req,
                               std::size_t energy_trials, std::uint64_t seed) {
  const std::size_t N = field.size();
  require(!S.S.empty(), ErrorKind::argument, "empty symmetrizer field");
  require(S.is_constant() || S.S.size() == N, ErrorKind::argument, "symmetrizer and field grids differ");
  require(S.dim() == field.dim(), ErrorKind::argument, "symmetrizer and field dimensions differ");
  Certificate out;
  out.theta_req = theta_req;
  const std::vector<CMat> s = node_values(S, N);
  for (const auto& m : s) {
    const double defect = spectral_norm(m - m.adjoint()) / std::max(1.0, spectral_norm(m));
    out.hermitian_defect = std::max(out.hermitian_defect, defect);
    out.c0_measured = std::max(out.c0_measured, spectral_norm(m));
  }
  if (out.hermitian_defect > 1e-10)
    fail(ErrorKind::argument, "symmetrizer is not Hermitian (defect " + std::to_string(out.hermitian_defect) + ")");
  const std::vector<CMat> ds = S.is_constant() ? std::vector<CMat>(N, CMat::Zero(S.dim(), S.dim()))
                                               : differentiate4(s, field.h);
  out.theta_measured = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < N; ++i) {
    const CMat sg = s[i] * field.G[i];
    const double th = 0.5 * min_eig(sg + sg.adjoint() + ds[i]);
    if (th < out.theta_measured) {
      out.theta_measured = th;
      out.worst_x = field.grid[i];
    }
  }
  const bool bounded = out.c0_measured <= S.C0 * (1.0 + 1e-12);
  if (out.theta_measured > 0.0 && energy_trials > 0) {
    SymmetrizerField measured = S;
    measured.C0 = out.c0_measured;
    out.energy_check = energy_estimate_check(measured, field, out.theta_measured, energy_trials, seed);
    out.energy_trials = energy_trials;
  }
  out.pass = bounded && out.theta_measured >= theta_req && out.energy_check <= 1.0;
  return out;
}

double lyapunov_identity_defect(const std::vector<CMat>& lambda_plus, const LyapunovForms& forms,
                                std::size_t trajectories, std::uint64_t seed) {
  const std::size_t N = forms.grid.size();
  require(lambda_plus.size() == N, ErrorKind::argument, "stable blocks and forms have different grids");
  const Eigen::Index j = lambda_plus.front().rows();
  if (j == 0 || N < 5) return 0.0;
  const double h = forms.grid[1] - forms.grid[0];
  auto rng = make_rng(seed, 0x1ab0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (std::size_t t = 0; t < trajectories; ++t) {
    CVec z(j);
    for (Eigen::Index q = 0; q < j; ++q) z(q) = cplx(normal(rng), normal(rng));
    std::vector<CVec> zs(N);
    zs[0] = z / z.norm();
    for (std::size_t i = 0; i + 1 < N; ++i) {
      const CMat lm = midpoint4(lambda_plus, i);
      const CVec k1 = lambda_plus[i] * zs[i];
      const CVec k2 = lm * (zs[i] + 0.5 * h * k1);
      const CVec k3 = lm * (zs[i] + 0.5 * h * k2);
      const CVec k4 = lambda_plus[i + 1] * (zs[i] + h * k3);
      zs[i + 1] = zs[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    std::vector<double> energy(N);
    double scale = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      energy[i] = zs[i].dot(forms.Q_plus[i] * zs[i]).real();
      scale = std::max(scale, zs[i].squaredNorm());
    }
    const std::vector<double> de = differentiate4(energy, h);
    for (std::size_t i = 0; i < N; ++i) worst = std::max(worst, std::abs(de[i] + zs[i].squaredNorm()) / scale);
  }
  return worst;
}

nlohmann::json to_json(const Certificate& c, const SymmetrizerField& S) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"provenance", S.provenance},
          {"nodes", S.S.size()},
          {"C0", S.C0},
          {"construction_theta", num(S.theta)},
          {"theta_measured", num(c.theta_measured)},
          {"theta_req", c.theta_req},
          {"worst_x", c.worst_x},
          {"c0_measured", c.c0_measured},
          {"hermitian_defect", c.hermitian_defect},
          {"energy_check", c.energy_check},
          {"energy_trials", c.energy_trials},
          {"pass", c.pass}};
}

void write_symmetrizer_csv(const SymmetrizerField& S, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::argument, "cannot write symmetrizer CSV " + path.string());
  out.precision(12);
  const int n = S.dim();
  out << "x";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out << ",re_s" << r << c << ",im_s" << r << c;
  out << '\n';
  for (std::size_t i = 0; i < S.S.size(); ++i) {
    out << S.grid[i];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out << ',' << S.S[i](r, c).real() << ',' << S.S[i](r, c).imag();
    out << '\n';
  }
}

}  // namespace relaxstab

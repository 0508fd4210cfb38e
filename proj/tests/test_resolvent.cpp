#include <doctest.h>

#include <cmath>
#include <numbers>

#include "relaxstab/error.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/systems.hpp"

using namespace relaxstab;

namespace {

Mat jx_flux() {
  Mat a(2, 2);
  a << 0.0, 1.0, 4.0, 0.0;
  return a;
}

Mat jx_relax() {
  Mat b(2, 2);
  b << 0.0, 0.0, 0.0, -1.0;
  return b;
}

/// Jin-Xin linearized at u = 0 as a constant-coefficient system.
SystemSpec frozen_jin_xin() { return linear_system("frozen", {jx_flux()}, jx_relax()); }

GridFunction gaussian_forcing(const ResolventField& field, const CVec& c, double center = 0.0) {
  GridFunction f(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = field.grid[i] - center;
    f[i] = std::exp(-0.5 * x * x) * c;
  }
  return f;
}

}  // namespace

TEST_CASE("manufactured solution on the Jin-Xin front") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  for (cplx lambda : {cplx(2.0, 0.0), cplx(0.05, 3.0), cplx(-0.05, 30.0)}) {
    const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), lambda});
    const ResolventSolver solver(field);
    CVec c(2);
    c << 1.0, cplx(0.0, 1.0);
    GridFunction v(field.size()), f(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
      const double x = field.grid[i];
      const double e = std::exp(-0.5 * x * x);
      v[i] = e * c;
      const CVec dv = -x * e * c;
      f[i] = field.A1inv[i].inverse().cast<cplx>() * (dv - field.G[i] * v[i]);
    }
    const auto u = solver.solve(f);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, (u[i] - v[i]).norm());
    INFO("lambda = " << lambda);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("constant coefficients match the Fourier-multiplier oracle") {
  const auto sys = frozen_jin_xin();
  const auto profile = constant_profile(Vec::Zero(2), 0.0, 40.0, 401);
  const cplx lambda(0.5, 1.0);
  const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), lambda});
  const ResolventSolver solver(field);
  CVec c(2);
  c << 1.0, -0.5;
  const auto v = solver.solve(gaussian_forcing(field, c));

  // v(x) = (1/2π) ∫ e^{iξx} (λ + iξ A + E)^{-1} f̂(ξ) dξ with f̂ = √(2π) e^{-ξ²/2} c, E = -B.
  const CMat A = jx_flux().cast<cplx>();
  const CMat E = -jx_relax().cast<cplx>();
  const CMat I = CMat::Identity(2, 2);
  double err = 0.0;
  for (double x : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
    CVec acc = CVec::Zero(2);
    const double dxi = 1e-3;
    for (double xi = -12.0; xi <= 12.0; xi += dxi) {
      const CMat symbol = lambda * I + cplx(0.0, xi) * A + E;
      acc += std::exp(cplx(0.0, xi * x)) * std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * xi * xi) *
             symbol.partialPivLu().solve(c) * dxi;
    }
    acc /= 2.0 * std::numbers::pi;
    const auto i = static_cast<std::size_t>(std::lround((x + 40.0) / field.h));
    REQUIRE(std::abs(field.grid[i] - x) < 1e-9);
    err = std::max(err, (v[i] - acc).norm());
  }
  CHECK(err < 1e-6);
}

TEST_CASE("randomized L2 gain is within a factor two of the symbol norm") {
  const auto sys = frozen_jin_xin();
  const auto profile = constant_profile(Vec::Zero(2), 0.0, 40.0, 401);
  const cplx lambda(0.3, 0.0);
  const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), lambda});
  const ResolventSolver solver(field);
  const auto responses = sample_responses(solver, GainOptions{0, 16, 8}, 3, 0);
  double gain = 0.0;
  for (const auto& r : responses) gain = std::max(gain, r.v_l2 / r.f_l2);

  const CMat A = jx_flux().cast<cplx>();
  const CMat E = -jx_relax().cast<cplx>();
  double oracle = 0.0;
  for (double xi = -50.0; xi <= 50.0; xi += 1e-3) {
    const CMat symbol = lambda * CMat::Identity(2, 2) + cplx(0.0, xi) * A + E;
    const Eigen::JacobiSVD<CMat> svd(symbol);
    oracle = std::max(oracle, 1.0 / svd.singularValues().minCoeff());
  }
  CHECK(gain <= oracle * 1.01);
  CHECK(gain >= 0.5 * oracle);
}

TEST_CASE("residual and adjoint consistency on the front") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), cplx(2.0, 0.0)});
  const ResolventSolver solver(field);
  CVec c(2);
  c << 1.0, 1.0;
  const auto f = gaussian_forcing(field, c, 1.0);
  const auto v = solver.solve(f);
  CHECK(solver.residual(f, v) <= 1e-8);

  GridFunction g(field.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = CVec::Constant(2, cplx(std::sin(0.1 * i), std::cos(0.07 * i)));
  const auto adj = solver.adjoint(g);
  cplx lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    lhs += g[i].dot(v[i]);
    rhs += adj[i].dot(f[i]);
  }
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  CHECK(solver.boundary_ranks().first + solver.boundary_ranks().second == 2);
}

TEST_CASE("essential spectrum at the endstates raises center spectrum") {
  const auto sys = frozen_jin_xin();
  const auto profile = constant_profile(Vec::Zero(2), 0.0, 10.0, 101);
  const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), cplx(0.0, 0.0)});
  try {
    ResolventSolver solver(field);
    FAIL("expected center spectrum");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::center_spectrum);
  }
}

TEST_CASE("norms") {
  const double h = 0.01;
  GridFunction one(2001, CVec::Ones(1));
  CHECK(l2_norm(one, h) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-12));
  CHECK(sobolev_norm(one, h, 2) == doctest::Approx(std::sqrt(20.0)).epsilon(1e-9));
  CHECK(hat_norm(one, h, 1, 3.0) == doctest::Approx(5.0 * std::sqrt(20.0)).epsilon(1e-9));

  GridFunction wave(2001);
  for (std::size_t i = 0; i < wave.size(); ++i) {
    const double x = -10.0 + h * static_cast<double>(i);
    wave[i] = CVec::Constant(1, std::exp(-x * x));
  }
  // ‖e^{-x²}‖² = √(π/2), ‖(e^{-x²})'‖² = √(π/2)
  const double base = std::sqrt(std::numbers::pi / 2.0);
  CHECK(sobolev_norm(wave, h, 1) == doctest::Approx(std::sqrt(2.0 * base)).epsilon(1e-6));
  GridFunction twice = wave;
  for (auto& x : twice) x *= 2.0;
  CHECK(hat_norm(twice, h, 2, 5.0) == doctest::Approx(2.0 * hat_norm(wave, h, 2, 5.0)).epsilon(1e-14));
}

TEST_CASE("frequency grid") {
  const auto grid = frequency_grid({-0.08, -0.04, 0.0, 0.05}, 0.1, 100.0, 25);
  CHECK(grid.size() == 200);
  for (const auto& fp : grid) {
    CHECK(std::abs(fp.lambda) >= 0.1 - 1e-12);
    CHECK(std::abs(fp.lambda) <= 100.0 + 1e-9);
  }
  std::size_t conj = 0;
  for (const auto& a : grid)
    for (const auto& b : grid)
      if (std::abs(a.lambda - std::conj(b.lambda)) < 1e-14) ++conj;
  CHECK(conj == grid.size());
}

TEST_CASE("weight conjugation shifts G by the rate") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), cplx(1.0, 0.0)});
  const auto w = weight_conjugate(field, 0.1);
  for (std::size_t i = 0; i < field.size(); i += 97)
    CHECK((w.G[i] - field.G[i] - 0.1 * CMat::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("frozen perturbations enter through the state-dependent Jacobians") {
  const auto sys = saint_venant(1.5);
  const auto profile = constant_profile(Vec::Ones(2), 0.0, 20.0, 201);
  const FrequencyPoint fp{Vec(), cplx(1.0, 2.0)};
  const auto a = assemble_G(sys, profile, fp);
  const auto b = assemble_G(sys, profile, fp, {}, gaussian_perturbation(Vec::Ones(2), 0.0));
  const auto c = assemble_G(sys, profile, fp, {}, gaussian_perturbation(Vec::Ones(2), 0.05));
  double diff0 = 0.0, diff1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff0 = std::max(diff0, (a.G[i] - b.G[i]).norm());
    diff1 = std::max(diff1, (a.G[i] - c.G[i]).norm());
  }
  CHECK(diff0 == 0.0);
  CHECK(diff1 > 1e-3);
}

TEST_CASE("small sweep on the front agrees and is reproducible") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  const auto grid = frequency_grid({0.0, 0.05}, 0.5, 20.0, 4);
  SweepOptions opt;
  opt.gamma_star = -0.125;
  opt.gain = {1, 4, 2};
  opt.seed = 11;
  const auto a = verify_equivalence(sys, profile, grid, opt);
  const auto b = verify_equivalence(sys, profile, grid, opt);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(a.nonsingular_count == grid.size());
  CHECK(a.agreement == 1.0);
  CHECK(a.max_residual <= 1e-8);
  for (const auto& p : a.points) {
    CHECK(p.pdamp_pass == (p.pdamp_ratio <= a.C));
    CHECK(p.gain > 0.0);
  }
}

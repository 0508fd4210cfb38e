#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "relaxstab/error.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/symmetrizer.hpp"
#include "relaxstab/systems.hpp"
#include "support.hpp"

using namespace relaxstab;
using relaxstab::testing::constant_field;
using relaxstab::testing::diag2;

namespace {

std::vector<double> uniform(double L, std::size_t nodes) {
  std::vector<double> x(nodes);
  for (std::size_t i = 0; i < nodes; ++i) x[i] = -L + 2.0 * L * static_cast<double>(i) / static_cast<double>(nodes - 1);
  return x;
}

CMat scalar(cplx z) { return CMat::Constant(1, 1, z); }

/// ∫0^∞ e^{Λ* t} e^{Λ t} dt by composite Simpson on [0, T] with exact matrix exponentials.
CMat quadrature_Q(const CMat& lambda, double T = 60.0, std::size_t panels = 12000) {
  const double dt = T / static_cast<double>(panels);
  const CMat step = (lambda * dt).exp();
  CMat E = CMat::Identity(lambda.rows(), lambda.cols());
  CMat acc = CMat::Zero(lambda.rows(), lambda.cols());
  for (std::size_t i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * E.adjoint() * E;
    E = E * step;
  }
  return acc * dt / 3.0;
}

}  // namespace

TEST_CASE("scalar Lyapunov forms equal 1/(2c)") {
  const auto grid = uniform(10.0, 401);
  for (double c : {1.0, 0.3, 4.0}) {
    const std::vector<CMat> lp(grid.size(), scalar(-c)), lm(grid.size(), scalar(c));
    const auto forms = lyapunov_Q(lp, lm, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      err = std::max(err, std::abs(forms.Q_plus[i](0, 0) - 1.0 / (2.0 * c)));
      err = std::max(err, std::abs(forms.Q_minus[i](0, 0) - 1.0 / (2.0 * c)));
    }
    INFO("c = " << c);
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("constant matrix Lyapunov form matches propagator quadrature") {
  CMat lambda(2, 2);
  lambda << cplx(-0.7, 0.4), cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(-1.1, -0.3);
  const auto grid = uniform(5.0, 201);
  const std::vector<CMat> lp(grid.size(), lambda), lm(grid.size(), scalar(1.0));
  const auto forms = lyapunov_Q(lp, lm, grid);
  const CMat oracle = quadrature_Q(lambda);
  double err = 0.0;
  for (const auto& Q : forms.Q_plus) err = std::max(err, (Q - oracle).norm());
  CHECK(err <= 1e-8);
}

TEST_CASE("variable Lyapunov form satisfies the contraction identity") {
  const auto grid = uniform(8.0, 1601);
  std::vector<CMat> lp, lm;
  for (double x : grid) {
    CMat a(2, 2);
    a << cplx(-1.0 - 0.5 * std::tanh(x), 0.2), cplx(0.5 * std::sin(x), 0.0), cplx(0.0, 0.3),
        cplx(-0.8, -0.1 * x / (1.0 + x * x));
    lp.push_back(a);
    lm.push_back(scalar(1.0 + 0.3 * std::tanh(x)));
  }
  const auto forms = lyapunov_Q(lp, lm, grid);
  CHECK(lyapunov_identity_defect(lp, forms, 20, 3) <= 1e-6);
}

TEST_CASE("unstable blocks are rejected") {
  const auto grid = uniform(5.0, 101);
  const std::vector<CMat> bad(grid.size(), scalar(0.5)), good(grid.size(), scalar(1.0));
  try {
    lyapunov_Q(bad, good, grid);
    FAIL("expected a stability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::stability);
  }
}

TEST_CASE("diagonal example gives theta = 1/2") {
  const auto field = constant_field(diag2(-1.0, 1.0), 10.0, 1001);
  LyapunovForms forms;
  forms.grid = field.grid;
  forms.Q_plus.assign(field.size(), scalar(0.5));
  forms.Q_minus.assign(field.size(), scalar(0.5));
  const std::vector<CMat> frame(field.size(), CMat::Identity(2, 2));
  const auto S = assemble_symmetrizer(frame, forms);
  CHECK((S.S[17] - diag2(-0.5, 0.5)).norm() < 1e-15);
  CHECK(S.C0 == doctest::Approx(0.5));
  const auto cert = verify_symmetrizer(S, field, 1e-6, 100, 2);
  CHECK(std::abs(cert.theta_measured - 0.5) <= 1e-12);
  CHECK(cert.energy_check <= 1.0);
  CHECK(cert.pass);
}

TEST_CASE("scalar energy example u' = -u + f") {
  const auto field = constant_field(scalar(-1.0), 20.0, 2001);
  SymmetrizerField S;
  S.S = {scalar(-1.0)};
  S.C0 = 1.0;
  S.theta = 1.0;
  const auto cert = verify_symmetrizer(S, field, 0.9, 100, 4);
  CHECK(cert.theta_measured == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.energy_trials == 100);
  CHECK(cert.energy_check <= 1.0);
  CHECK(cert.pass);
}

TEST_CASE("non-Hermitian candidates are rejected") {
  const auto field = constant_field(diag2(-1.0, 1.0), 5.0, 101);
  SymmetrizerField S;
  CMat m = diag2(-0.5, 0.5);
  m(0, 1) = 0.3;
  S.S = {m};
  S.C0 = 1.0;
  CHECK_THROWS_AS(verify_symmetrizer(S, field, 0.0, 0), Error);
}

TEST_CASE("Lyapunov symmetrizer on the Jin-Xin front") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  for (cplx lambda : {cplx(2.0, 0.0), cplx(0.05, 3.0)}) {
    const auto field = assemble_G(sys, profile, FrequencyPoint{Vec(), lambda});
    const auto S = lyapunov_symmetrizer(field);
    const auto cert = verify_symmetrizer(S, field, 1e-6, 100, 9);
    INFO("lambda = " << lambda);
    CHECK(cert.hermitian_defect <= 1e-12);
    CHECK(cert.theta_measured > 0.0);
    CHECK(cert.energy_check <= 1.0);
    CHECK(cert.pass);
  }
}

TEST_CASE("constant-frame symmetrizer at the sonic state") {
  const auto sys = jin_xin(2.0);
  Vec eta(1);
  eta << 10.0;
  const auto S = constant_symmetrizer(sys, Vec::Zero(2), eta);
  REQUIRE(S.is_constant());
  CHECK((S.S[0] - S.S[0].adjoint()).norm() < 1e-14);
  CHECK(S.C0 == doctest::Approx(1.0));
  CHECK(S.theta == doctest::Approx(0.5).epsilon(1e-10));
}

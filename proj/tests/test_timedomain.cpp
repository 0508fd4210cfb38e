#include <doctest.h>

#include <cmath>
#include <numbers>

#include "relaxstab/error.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/systems.hpp"
#include "relaxstab/timedomain.hpp"

using namespace relaxstab;

namespace {

/// Max error of a periodic linearized Jin-Xin run against the Fourier mode e^{ikx} e^{M t} c.
double periodic_error(std::size_t nodes) {
  const auto sys = jin_xin(2.0);
  const Vec w0 = Vec::Zero(2);
  const auto profile = constant_profile(w0, 0.0, 10.0, 11);
  const double k = 2.0 * std::numbers::pi / 5.0;
  SimConfig cfg;
  cfg.L = 5.0;
  cfg.nodes = nodes;
  cfg.boundary = SimBoundary::periodic;
  cfg.T = 1.0;
  cfg.cfl = 0.4;
  cfg.keep_history = false;
  CVec c(2);
  c << 1.0, cplx(0.3, 0.2);
  const Simulator sim(sys, profile, cfg);
  const auto run = sim.run([&](double x) { return Vec((std::exp(I_unit * k * x) * c).real()); });

  const CMat M = -I_unit * k * sys.jacobian(w0, 0).cast<cplx>() + sys.relaxation_jacobian(w0).cast<cplx>();
  const Eigen::ComplexEigenSolver<CMat> es(M);
  const CMat eM = es.eigenvectors() * (es.eigenvalues() * run.final_state.t).array().exp().matrix().asDiagonal() *
                  es.eigenvectors().inverse();
  double err = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = sim.grid()[i];
    const Vec exact = (std::exp(I_unit * k * x) * (eM * c)).real();
    err = std::max(err, (exact - run.final_state.v[i]).cwiseAbs().maxCoeff());
  }
  return err;
}

EnergyTrace exponential_trace(double rate, double l2_fraction, double T = 10.0, double dt = 0.01) {
  EnergyTrace tr;
  for (double t = 0.0; t <= T + 1e-12; t += dt) {
    tr.times.push_back(t);
    tr.E.push_back(std::exp(-rate * t));
    tr.L2.push_back(l2_fraction * std::exp(-rate * t));
    tr.F.push_back(0.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("periodic constant-coefficient runs converge at third order") {
  const double e1 = periodic_error(100), e2 = periodic_error(200), e3 = periodic_error(400);
  CHECK(e3 < 1e-4);
  CHECK(std::log2(e1 / e2) > 2.7);
  CHECK(std::log2(e2 / e3) > 2.7);
}

TEST_CASE("weighted energy follows the weight law under shifts") {
  const double a = 0.2, dx = 0.01;
  std::vector<double> grid;
  for (int i = -3000; i <= 3000; ++i) grid.push_back(dx * i);
  const double shift = std::log(2.0) / (2.0 * a);
  auto bump = [&](double center) {
    std::vector<Vec> v;
    for (double x : grid) v.push_back(Vec::Constant(2, std::exp(-(x - center) * (x - center))));
    return v;
  };
  const auto base = measure_energy(bump(0.0), grid, dx, 0, a);
  const auto moved = measure_energy(bump(shift), grid, dx, 0, a);
  CHECK(moved.second / base.second == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(base.first == doctest::Approx(base.second).epsilon(1e-14));
  const auto h1 = measure_energy(bump(0.0), grid, dx, 1, 0.0);
  // ‖e^{-x²}‖² = √(π/2) per component, ‖(e^{-x²})'‖² = √(π/2) per component
  CHECK(h1.first == doctest::Approx(4.0 * std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-6));
}

TEST_CASE("damping fit on an exact exponential trace") {
  const auto tr = exponential_trace(0.5, 0.1);
  const auto fit = verify_classical_damping(tr);
  CHECK(fit.feasible);
  CHECK(fit.eta > 0.0);
  CHECK(verify_integrated_damping(tr, fit.eta, fit.C) >= -1e-9);
  CHECK(verify_integrated_damping(tr, 0.5, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(verify_integrated_damping(tr, 1.0, 0.0) < 0.0);
}

TEST_CASE("a growing trace admits no positive damping rate within the caps") {
  auto tr = exponential_trace(-0.5, 0.0);
  DampingFitOptions opt;
  opt.C_cap = 10.0;
  const auto fit = verify_classical_damping(tr, opt);
  CHECK_FALSE(fit.feasible);
  CHECK(fit.refutation_time.has_value());
}

TEST_CASE("damping window must hold enough samples") {
  const auto tr = exponential_trace(0.5, 0.1);
  DampingFitOptions opt;
  opt.t0 = 1.0;
  opt.t1 = 1.0;
  CHECK_THROWS_AS(verify_classical_damping(tr, opt), Error);
}

TEST_CASE("short-time constant") {
  CHECK(verify_short_time(exponential_trace(0.5, 0.1)).C_short <= 1.0 + 1e-12);
  auto growing = exponential_trace(-1.0, 0.0, 40.0);
  const auto r = verify_short_time(growing, 1e8);
  CHECK(r.refuted);
}

TEST_CASE("cutoffs are C2 ramps") {
  const CutoffPair cut{2.0, 10.0};
  CHECK(cut.chi1(0.0) == 0.0);
  CHECK(cut.chi1(2.0) == 1.0);
  CHECK(cut.chiT(10.0) == 0.0);
  CHECK(cut.chiT(8.0) == 1.0);
  CHECK(cut.dchi1(0.0) == 0.0);
  CHECK(cut.d2chi1(0.0) == 0.0);
  CHECK(cut.dchi1(2.0) == 0.0);
  CHECK(cut.d2chiT(10.0) == 0.0);
  for (double t = 0.0; t <= 10.0; t += 0.01) {
    CHECK(cut.chi(t) >= 0.0);
    CHECK(cut.chi(t) <= 1.0);
    const double fd = (cut.chi1(t + 1e-6) - cut.chi1(t - 1e-6)) / 2e-6;
    if (t > 1e-3) CHECK(std::abs(fd - cut.dchi1(t)) < 1e-6);
  }
}

TEST_CASE("CFL violations and blowups are reported") {
  const auto sys = jin_xin(2.0);
  const auto profile = constant_profile(Vec::Zero(2), 0.0, 10.0, 11);
  SimConfig cfg;
  cfg.L = 5.0;
  cfg.nodes = 101;
  cfg.boundary = SimBoundary::periodic;
  const Simulator sim(sys, profile, cfg);
  auto state = sim.initial_state([](double x) { return Vec::Constant(2, std::sin(x)); });
  try {
    sim.step(state, 10.0 * sim.stable_dt());
    FAIL("expected a step error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::step);
  }

  Mat grow(2, 2);
  grow << 1.0, 0.0, 0.0, 1.0;
  const auto bad = linear_system("growing", {Mat::Identity(2, 2)}, grow);
  cfg.T = 50.0;
  cfg.blowup_cap = 10.0;
  const Simulator unstable(bad, profile, cfg);
  try {
    unstable.run([](double x) { return Vec::Constant(2, 1.0 + 0.1 * std::sin(x)); });
    FAIL("expected an instability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::instability);
  }
}

TEST_CASE("nonlinear runs agree with the linearization to second order in the amplitude") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0, 20.0, 2001);
  SimConfig cfg;
  cfg.L = 20.0;
  cfg.nodes = 401;
  cfg.T = 2.0;
  cfg.keep_history = false;
  Vec dir(2);
  dir << 1.0, 0.5;
  auto difference = [&](double amp) {
    SimConfig lin = cfg, non = cfg;
    non.mode = SimMode::nonlinear;
    const auto a = Simulator(sys, profile, lin).run(gaussian_data(dir, amp)).final_state;
    const auto b = Simulator(sys, profile, non).run(gaussian_data(dir, amp)).final_state;
    double d = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) d = std::max(d, (a.v[i] - b.v[i]).cwiseAbs().maxCoeff());
    return d;
  };
  const double d1 = difference(1e-2), d2 = difference(5e-3);
  CHECK(d1 < 1e-3);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("linearized front run is damped and truncates with a finite constant") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  SimConfig cfg;
  cfg.nodes = 401;
  cfg.T = 12.0;
  Vec dir(2);
  dir << 1.0, 0.5;
  const auto run = Simulator(sys, profile, cfg).run(gaussian_data(dir, 1e-2));
  const auto fit = verify_classical_damping(run.trace);
  CHECK(fit.feasible);
  CHECK(fit.eta > 0.0);
  CHECK(verify_integrated_damping(run.trace, fit.eta, fit.C) >= 0.0);
  const auto tr = truncation_pipeline(run.history, CutoffPair{2.0, 12.0}, -0.15, 1);
  CHECK(std::isfinite(tr.C2));
  CHECK(tr.tkey_holds);
  CHECK(tr.plateau_defect == 0.0);
}

TEST_CASE("forced runs have a finite short-time constant") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0, 20.0, 2001);
  SimConfig cfg;
  cfg.L = 20.0;
  cfg.nodes = 401;
  cfg.T = 4.0;
  const Forcing f = [](double t, double x) { return Vec::Constant(2, 1e-3 * std::exp(-x * x) * std::cos(t)); };
  const auto run = Simulator(sys, profile, cfg, f).run([](double) { return Vec::Zero(2); });
  const auto r = verify_short_time(run.trace);
  CHECK_FALSE(r.refuted);
  CHECK(std::isfinite(r.C_short));
}

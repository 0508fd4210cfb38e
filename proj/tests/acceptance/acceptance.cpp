// Acceptance driver: runs the ten criteria at their stated tolerances and prints one line each.
// Usage: relaxstab_acceptance [scratch-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "relaxstab/dichotomy.hpp"
#include "relaxstab/model.hpp"
#include "relaxstab/pipeline.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/symmetrizer.hpp"
#include "relaxstab/systems.hpp"
#include "relaxstab/timedomain.hpp"
#include "support.hpp"

using namespace relaxstab;
using relaxstab::testing::constant_field;
using relaxstab::testing::diag2;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

CMat scalar(cplx z) { return CMat::Constant(1, 1, z); }

std::vector<double> uniform(double a, double b, std::size_t nodes) {
  std::vector<double> x(nodes);
  for (std::size_t i = 0; i < nodes; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(nodes - 1);
  return x;
}

const cplx kLambdas[] = {{2.0, 0.0}, {0.05, 3.0}, {0.5, 0.0}, {1.0, 10.0}};

Outcome profile_criterion() {
  const auto sys = jin_xin(2.0);
  const auto ref = solve_profile_jinxin(2.0, 1.0, 0.0, 40.0, 4001);
  const auto p = solve_profile_shooting(sys, ref.w_minus, ref.w_plus, 0.5);
  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double u = 1.0 / (1.0 + std::exp(p.grid[i] / 7.5));  // v = u/2 along the front
    err = std::max({err, std::abs(p.values[i](0) - u), std::abs(p.values[i](1) - 0.5 * u)});
  }
  return {err <= 1e-8 && p.grid.front() == -40.0 && p.grid.back() == 40.0, fmt("sup error %.2e on [-40,40]", err)};
}

Outcome hypotheses_criterion() {
  const auto sys = jin_xin(2.0);
  const auto front = solve_profile_jinxin(2.0, 1.0, 0.0);
  const auto a1 = check_noncharacteristic(sys, front, 1e-8);
  bool a2 = true, a3 = true;
  for (std::size_t i = 0; i < front.size(); i += 400) {
    a2 = a2 && check_hyperbolicity(sys, front.values[i], unit_directions(1, 2)).pass;
    a3 = a3 && check_geometric_regularity(sys, front.values[i], half_loop(1, 2)).pass;
  }
  const auto grid = ray_grid(unit_directions(1, 2), 0.1, 1000.0, 40);
  const auto at_rest = check_chf(sys, Vec::Zero(2), 10.0, grid, 0.4);
  const auto at_left = check_chf(sys, front.w_minus, 10.0, grid, 1e-6);
  const auto super = check_chf(jin_xin(0.8), vec2(1.0, 0.5), 10.0, grid, 1e-6);
  const bool pass = a1.pass && a2 && a3 && at_rest.pass && at_rest.theta >= 0.4 && !super.pass;
  return {pass, fmt("A1 margin %.4f, A2 %s, A3 %s; chf theta %.4f at u=0 (limit 1/2), %.4f at u=1 (limit 1/4); "
                    "supercharacteristic theta %.4f",
                    a1.margin, a2 ? "ok" : "fail", a3 ? "ok" : "fail", at_rest.theta, at_left.theta, super.theta)};
}

Outcome kawashima_criterion() {
  const auto samples = ray_grid(unit_directions(1, 2), 1.0, 100.0, 8);
  const auto e = partially_damped_3x3();
  const auto k = check_kawashima(e.system, e.state, samples);
  const auto chf = check_chf(e.system, e.state, 10.0, ray_grid(unit_directions(1, 2), 0.1, 1000.0, 40), 1e-6);

  std::size_t implied = 0, kawashima_count = 0, chf_only = 0;
  for (const auto& c : structural_corpus()) {
    const auto dirs = unit_directions(c.system.d, 16);
    const bool kp = check_kawashima(c.system, c.state, ray_grid(dirs, 1.0, 100.0, 8)).pass;
    const bool cp = check_chf(c.system, c.state, 10.0, ray_grid(dirs, 0.1, 1000.0, 40), 1e-6).pass;
    kawashima_count += kp;
    implied += kp && cp;
    chf_only += cp && !kp;
  }
  const bool pass = !k.genuine_coupling && std::isfinite(chf.theta) && implied == kawashima_count && chf_only > 0;
  return {pass, fmt("3x3 genuine coupling %s (worst %.1e), chf theta %.3f; corpus: %zu/%zu Kawashima entries "
                    "pass chf, %zu pass chf only",
                    k.genuine_coupling ? "holds" : "fails", k.worst_coupling, chf.theta, implied, kawashima_count,
                    chf_only)};
}

Outcome resolvent_criterion(const fs::path& dir) {
  auto cfg = default_config();
  cfg.pipeline = "resolvent-sweep";
  cfg.output = dir;
  const auto result = run(cfg);
  const auto& s = result.summary["pipelines"]["resolvent-sweep"];
  if (!s.contains("points")) return {false, "sweep did not run: " + s.dump()};
  const auto points = s["points"].get<std::size_t>();
  const double agreement = s["agreement"].get<double>();
  const double exponent = s["absorption_exponent"].is_number() ? s["absorption_exponent"].get<double>() : NAN;
  const bool pass = points == 200 && agreement == 1.0 && std::abs(-exponent - 1.0) <= 0.2 &&
                    s["max_residual"].get<double>() <= 1e-8;
  return {pass, fmt("%zu points, agreement %.3f over %d non-singular, ratio ~ |lambda|^%.3f", points, agreement,
                    s["nonsingular"].get<int>(), exponent)};
}

Outcome dichotomy_criterion() {
  const auto sys = jin_xin(2.0);
  const auto front = solve_profile_jinxin(2.0, 1.0, 0.0);
  double worst_comm = 0.0, worst_rel = 0.0;
  bool pass = true;
  for (cplx lambda : {cplx(2.0, 0.0), cplx(0.05, 3.0)}) {
    const auto field = assemble_G(sys, front, FrequencyPoint{Vec(), lambda});
    const auto data = propagate_subspaces(field);
    const auto check = verify_dichotomy(data, field, 50, 1e-6, 17);
    const double rel = std::abs(data.theta - data.endstate_gap) / data.endstate_gap;
    worst_comm = std::max(worst_comm, check.worst_commutator);
    worst_rel = std::max(worst_rel, rel);
    pass = pass && check.pass && check.pairs == 50 && check.worst_commutator <= 1e-6 && rel <= 0.25;
  }
  return {pass, fmt("commutator %.1e on 50 pairs, fitted theta within %.1f%% of the gap", worst_comm, 100 * worst_rel)};
}

Outcome lyapunov_criterion() {
  const auto grid = uniform(-10.0, 10.0, 401);
  double scalar_err = 0.0;
  for (double c : {0.3, 1.0, 4.0}) {
    const std::vector<CMat> lp(grid.size(), scalar(-c)), lm(grid.size(), scalar(c));
    const auto f = lyapunov_Q(lp, lm, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      scalar_err = std::max({scalar_err, std::abs(f.Q_plus[i](0, 0) - 1.0 / (2.0 * c)),
                             std::abs(f.Q_minus[i](0, 0) - 1.0 / (2.0 * c))});
  }

  // Matrix case against composite Simpson on [0, 60] with exact exponentials.
  CMat lambda(2, 2);
  lambda << cplx(-0.7, 0.4), cplx(2.0, 0.0), cplx(0.0, 0.0), cplx(-1.1, -0.3);
  const auto g5 = uniform(-5.0, 5.0, 201);
  const auto forms = lyapunov_Q(std::vector<CMat>(g5.size(), lambda), std::vector<CMat>(g5.size(), scalar(1.0)), g5);
  const std::size_t panels = 12000;
  const double dt = 60.0 / panels;
  const CMat step = (lambda * dt).exp();
  CMat E = CMat::Identity(2, 2), Q = CMat::Zero(2, 2);
  for (std::size_t i = 0; i <= panels; ++i) {
    Q += ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * E.adjoint() * E;
    E = E * step;
  }
  Q *= dt / 3.0;
  double matrix_err = 0.0;
  for (const auto& q : forms.Q_plus) matrix_err = std::max(matrix_err, (q - Q).norm());

  // Derivative identity on a variable block at two resolutions.
  auto defect = [](std::size_t nodes) {
    const auto g = uniform(-8.0, 8.0, nodes);
    std::vector<CMat> lp, lm;
    for (double x : g) {
      CMat a(2, 2);
      a << cplx(-1.0 - 0.5 * std::tanh(x), 0.2), cplx(0.5 * std::sin(x), 0.0), cplx(0.0, 0.3),
          cplx(-0.8, -0.1 * x / (1.0 + x * x));
      lp.push_back(a);
      lm.push_back(scalar(1.0 + 0.3 * std::tanh(x)));
    }
    return lyapunov_identity_defect(lp, lyapunov_Q(lp, lm, g), 20, 3);
  };
  const double coarse = defect(801), fine = defect(1601);
  const bool pass = scalar_err <= 1e-10 && matrix_err <= 1e-8 && fine <= 1e-6 && fine < coarse;
  return {pass, fmt("scalar %.1e, quadrature %.1e, identity defect %.1e -> %.1e under h/2", scalar_err, matrix_err,
                    coarse, fine)};
}

Outcome symmetrizer_criterion() {
  const auto diag = constant_field(diag2(-1.0, 1.0), 10.0, 1001);
  LyapunovForms forms;
  forms.grid = diag.grid;
  forms.Q_plus.assign(diag.G.size(), scalar(0.5));
  forms.Q_minus.assign(diag.G.size(), scalar(0.5));
  const auto S = assemble_symmetrizer(std::vector<CMat>(diag.G.size(), CMat::Identity(2, 2)), forms);
  const auto cert = verify_symmetrizer(S, diag, 1e-6, 100, 2);
  const double diag_err = std::abs(cert.theta_measured - 0.5);

  const auto sys = jin_xin(2.0);
  const auto front = solve_profile_jinxin(2.0, 1.0, 0.0);
  double theta_min = INFINITY, energy_max = 0.0;
  bool front_ok = true;
  for (cplx lambda : kLambdas) {
    const auto field = assemble_G(sys, front, FrequencyPoint{Vec(), lambda});
    const auto c = verify_symmetrizer(lyapunov_symmetrizer(field), field, 1e-6, 100, 9);
    theta_min = std::min(theta_min, c.theta_measured);
    energy_max = std::max(energy_max, c.energy_check);
    front_ok = front_ok && c.theta_measured > 0.0 && c.energy_check <= 1.0 && c.energy_trials == 100;
  }
  const bool pass = diag_err <= 1e-12 && cert.energy_check <= 1.0 && front_ok;
  return {pass, fmt("diag |theta - 1/2| = %.1e; front min theta %.4f over %zu frequencies, energy ratio %.3f", diag_err,
                    theta_min, std::size(kLambdas), energy_max)};
}

Outcome turning_criterion() {
  const double h = 0.01;
  std::vector<double> xs;
  for (double x = -1.0037; x <= 1.0; x += h) xs.push_back(x);
  const auto airy = detect_turning_points(
      [](double x) {
        CMat m(2, 2);
        m << 0.0, 1.0, x, 0.0;
        return m;
      },
      xs);
  const auto flat = detect_turning_points([](double) { return diag2(1.0, -1.0); }, xs);
  const bool pass = airy.locations.size() == 1 && std::abs(airy.locations.front().x) <= h && flat.locations.empty();
  return {pass, fmt("Airy: %zu located at x = %.4f; constant field: %zu", airy.locations.size(),
                    airy.locations.empty() ? NAN : airy.locations.front().x, flat.locations.size())};
}

Outcome damping_criterion() {
  const auto cfg = default_config();
  const auto sys = jin_xin(2.0);
  const auto front = solve_profile_jinxin(2.0, 1.0, 0.0);
  double theta = INFINITY;
  for (cplx lambda : cfg.dichotomy.lambdas) {
    const auto field = assemble_G(sys, front, FrequencyPoint{Vec(), lambda});
    theta = std::min(theta, verify_symmetrizer(lyapunov_symmetrizer(field), field, 1e-6, 0).theta_measured);
  }
  const double gamma = -0.5 * theta;
  const auto& s = cfg.simulate;
  const auto v0 = gaussian_data(s.direction, s.amplitude, 0.0, s.width);
  const auto run = Simulator(sys, front, s.sim).run(v0);
  const auto fit = verify_classical_damping(run.trace);
  const double slack = verify_integrated_damping(run.trace, fit.eta, fit.C);
  SimConfig fine = s.sim;
  fine.nodes = 2 * s.sim.nodes - 1;
  fine.keep_history = false;
  const auto fit2 = verify_classical_damping(Simulator(sys, front, fine).run(v0).trace);
  const double rel = std::abs(fit2.eta - fit.eta) / fit.eta;
  const auto trunc = truncation_pipeline(run.history, CutoffPair{s.tau_c, run.history.times.back()}, gamma, s.sim.s);
  const bool pass = fit.feasible && fit.eta > 0.0 && fit2.feasible && rel <= 0.2 && slack >= 0.0 &&
                    std::isfinite(trunc.C2) && trunc.pass;
  return {pass, fmt("eta %.4f, halved step eta %.4f (%.1f%%), slack %.2e, C2 %.3f at gamma %.4f", fit.eta, fit2.eta,
                    100 * rel, slack, trunc.C2, gamma)};
}

Outcome determinism_criterion(const fs::path& dir) {
  std::string bytes[2];
  int status[2];
  for (int i = 0; i < 2; ++i) {
    auto cfg = default_config();
    cfg.pipeline = "full";
    cfg.seed = 7;
    cfg.output = dir / "full";
    status[i] = run(cfg).exit_status;
    std::ifstream in(fs::path(cfg.output) / "summary.json", std::ios::binary);
    bytes[i].assign(std::istreambuf_iterator<char>(in), {});
  }
  const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
  return {same, fmt("%zu-byte summaries %s, exit status %d/%d", bytes[0].size(), same ? "identical" : "differ",
                    status[0], status[1])};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "relaxstab_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  struct Criterion {
    const char* name;
    double budget_s;  // 0: no runtime bound
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"jin-xin profile by shooting", 5, profile_criterion},
      {"hypothesis suite", 10, hypotheses_criterion},
      {"kawashima vs chf", 0, kawashima_criterion},
      {"resolvent equivalence sweep", 300, [&] { return resolvent_criterion(scratch / "sweep"); }},
      {"dichotomy axioms", 0, dichotomy_criterion},
      {"lyapunov construction", 0, lyapunov_criterion},
      {"symmetrizer certificate", 0, symmetrizer_criterion},
      {"turning points", 0, turning_criterion},
      {"time-domain damping", 120, damping_criterion},
      {"determinism of full runs", 0, [&] { return determinism_criterion(scratch); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0) {
      timing += fmt(" / %.0f s", c.budget_s);
      if (secs > c.budget_s) out.pass = false;
    }
    failures += !out.pass;
    std::printf("%s  %2zu %-30s %s [%s]\n", out.pass ? "PASS" : "FAIL", i + 1, c.name, out.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

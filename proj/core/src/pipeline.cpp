#include "relaxstab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "relaxstab/dichotomy.hpp"
#include "relaxstab/error.hpp"
#include "relaxstab/model.hpp"
#include "relaxstab/resolvent.hpp"
#include "relaxstab/symmetrizer.hpp"
#include "relaxstab/systems.hpp"
#include "relaxstab/timedomain.hpp"

namespace relaxstab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json lambda_json(cplx z) { return {z.real(), z.imag()}; }

/// Writes through `writer` into a staging directory, then renames every produced file into `dir`.
void write_artifact(const fs::path& dir, const std::string& name, const std::function<void(const fs::path&)>& writer) {
  const fs::path stage = dir / (".staging-" + name);
  fs::remove_all(stage);
  fs::create_directories(stage);
  writer(stage / name);
  for (const auto& entry : fs::directory_iterator(stage)) fs::rename(entry.path(), dir / entry.path().filename());
  fs::remove_all(stage);
}

struct Context {
  Context(const RunConfig& config, SystemSpec system, fs::path output, std::ostream* sink)
      : cfg(config), sys(std::move(system)), out(std::move(output)), log(sink) {}

  const RunConfig& cfg;
  SystemSpec sys;
  fs::path out;
  std::ostream* log = nullptr;

  std::optional<WaveProfile> profile;
  std::optional<Error> profile_error;
  std::optional<double> theta_chf;
  std::optional<double> theta_measured;
  json certificates = json::object();

  void note(const std::string& line) const {
    if (log) *log << line << '\n' << std::flush;
  }

  const WaveProfile& need_profile() {
    if (profile) return *profile;
    if (profile_error) throw *profile_error;
    try {
      profile = build_profile(sys, cfg);
    } catch (const Error& e) {
      profile_error = e;
      throw;
    }
    return *profile;
  }

  Vec transverse_eta() const {
    const Vec& eta = cfg.sweep.eta;
    if (eta.size() == 0) return Vec::Zero(sys.d - 1);
    require(eta.size() == sys.d - 1, ErrorKind::usage,
            "frequency.eta: expected " + std::to_string(sys.d - 1) + " entries (d - 1)");
    return eta;
  }

  ResolventGrid resolvent_grid() const {
    ResolventGrid g;
    g.L = cfg.sweep.L;
    g.h_max = cfg.sweep.h_max;
    return g;
  }
};

std::vector<Vec> eta_grid(const Context& c) {
  const auto& h = c.cfg.hypotheses;
  return ray_grid(unit_directions(c.sys.d, h.directions), std::min(0.1, h.eta_min), h.eta_max, h.radii);
}

/// chf at both endstates; the returned result is the worse of the two.
std::pair<ChfResult, json> chf_at_endstates(const Context& c) {
  const auto grid = eta_grid(c);
  const auto& h = c.cfg.hypotheses;
  ChfResult worst;
  worst.theta = std::numeric_limits<double>::infinity();
  json per_state = json::object();
  for (const auto& [label, w] : {std::pair{"w_minus", c.cfg.profile.w_minus}, std::pair{"w_plus", c.cfg.profile.w_plus}}) {
    ChfResult r = check_chf(c.sys, w, h.eta_min, grid, h.theta_req);
    per_state[label] = {{"theta", r.theta}, {"pass", r.pass}, {"eta_threshold", finite_or_null(r.eta_threshold)}};
    if (r.theta < worst.theta) worst = r;
  }
  return {worst, per_state};
}

double chf_theta(Context& c) {
  if (!c.theta_chf) c.theta_chf = chf_at_endstates(c).first.theta;
  return *c.theta_chf;
}

double gamma_star(Context& c) {
  if (c.cfg.sweep.gamma_star) return *c.cfg.sweep.gamma_star;
  const double theta = chf_theta(c);
  require(theta > 0.0, ErrorKind::model, "frequency.gamma_star: chf margin is not positive, set it explicitly");
  return -0.5 * theta;
}

json stage_hypotheses(Context& c) {
  const auto& h = c.cfg.hypotheses;
  const HypothesisTolerances tol;
  const auto directions = unit_directions(c.sys.d, h.directions);
  const auto loop = half_loop(c.sys.d, 64);

  std::vector<std::pair<std::string, Vec>> states{{"w_minus", c.cfg.profile.w_minus},
                                                  {"w_plus", c.cfg.profile.w_plus}};
  HypothesisReport report;
  json a1_error;
  try {
    const WaveProfile& p = c.need_profile();
    report.a1 = check_noncharacteristic(c.sys, p, tol.delta);
    for (int q = 1; q < 4; ++q) {
      const std::size_t i = q * (p.size() - 1) / 4;
      states.emplace_back("profile(x=" + std::to_string(p.grid[i]) + ")", p.values[i]);
    }
  } catch (const Error& e) {
    report.a1.pass = false;
    a1_error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
  }

  report.a2.worst_imag = 0.0;
  report.a2.worst_cond = 1.0;
  for (const auto& [label, w] : states) {
    const auto r = check_hyperbolicity(c.sys, w, directions, tol);
    report.a2.pass = report.a2.pass && r.pass;
    report.a2.worst_imag = std::max(report.a2.worst_imag, r.worst_imag);
    if (!(r.worst_cond <= report.a2.worst_cond)) {
      report.a2.worst_cond = r.worst_cond;
      report.a2.worst_eta = r.worst_eta;
    }
    const auto g = check_geometric_regularity(c.sys, w, loop, tol);
    report.a3.pass = report.a3.pass && g.pass;
    report.a3.benign_crossings += g.benign_crossings;
    report.a3.flags.insert(report.a3.flags.end(), g.flags.begin(), g.flags.end());
  }

  auto [chf, chf_states] = chf_at_endstates(c);
  report.chf = chf;
  c.theta_chf = chf.theta;

  const auto samples = ray_grid(directions, 1.0, h.eta_max, 8);
  report.kawashima = check_kawashima(c.sys, c.cfg.profile.w_minus, samples, tol);
  const auto kp = check_kawashima(c.sys, c.cfg.profile.w_plus, samples, tol);
  if (!kp.pass) report.kawashima = kp;

  json section = to_json(report);
  if (!a1_error.is_null()) section["a1"]["error"] = a1_error;
  section["chf"]["endstates"] = chf_states;
  json labels = json::array();
  for (const auto& s : states) labels.push_back(s.first);
  section["states"] = labels;
  section["pass"] = report.pass();
  if (!report.chf.pass && !a1_error.is_null()) section["refuted_by"] = "chf";

  c.certificates["A1"] = {{"pass", report.a1.pass}, {"margin", report.a1.margin}};
  c.certificates["A2"] = {{"pass", report.a2.pass}};
  c.certificates["A3"] = {{"pass", report.a3.pass}};
  c.certificates["chf"] = {{"pass", report.chf.pass}, {"theta", report.chf.theta}};
  c.certificates["kawashima"] = {{"pass", report.kawashima.pass},
                                 {"genuine_coupling", report.kawashima.genuine_coupling}};

  // A profile failure alone is an error, a failed chf is a refutation regardless.
  if (!a1_error.is_null() && report.chf.pass) throw *c.profile_error;
  return section;
}

json stage_profile(Context& c) {
  const WaveProfile& p = c.need_profile();
  const double residual = profile_residual(c.sys, p);
  json section = {{"method", p.params.value("method", c.cfg.profile.method)},
                  {"speed", p.speed},
                  {"L", p.half_length()},
                  {"nodes", p.size()},
                  {"residual", residual},
                  {"decay_rate", finite_or_null(p.decay_rate)},
                  {"fitted_decay_rate", p.is_constant() ? json(nullptr) : finite_or_null(fit_decay_rate(p))},
                  {"suggested_half_length", p.is_constant() ? json(nullptr)
                                                            : finite_or_null(suggested_half_length(p))}};
  bool pass = residual <= c.cfg.profile.tol;
  if (c.sys.name == "jin-xin" && c.sys.n == 2 && !p.is_constant() && section["method"] == "shooting") {
    const double a = c.cfg.system_params.at("a").get<double>();
    const WaveProfile ref = solve_profile_jinxin(a, p.w_minus(0), p.w_plus(0), p.half_length(), p.size());
    double err = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) err = std::max(err, (p.values[i] - ref.values[i]).cwiseAbs().maxCoeff());
    section["closed_form_sup_error"] = err;
  }
  section["pass"] = pass;
  write_artifact(c.out, "profile.csv", [&](const fs::path& path) { write_profile(p, path); });
  c.certificates["profile"] = {{"pass", pass}, {"residual", residual}, {"speed", p.speed}};
  return section;
}

json stage_sweep(Context& c) {
  const WaveProfile& p = c.need_profile();
  const auto& f = c.cfg.sweep;
  const auto grid = frequency_grid(f.gammas, f.r_min, f.r_max, f.radii, c.transverse_eta());
  SweepOptions opt;
  opt.gain = {c.cfg.s, f.trials, f.power_iterations};
  opt.grid = c.resolvent_grid();
  opt.gamma_star = gamma_star(c);
  opt.C = f.C;
  opt.weight_rate = c.cfg.alpha;
  opt.seed = c.cfg.seed;
  for (double g : f.gammas)
    require(g > opt.gamma_star, ErrorKind::usage, "frequency.gammas: every line must lie right of gamma_star");
  const EquivalenceReport report = verify_equivalence(c.sys, p, grid, opt);
  json section = to_json(report);
  section["gain_method"] = "randomized smooth forcings with L2 power iteration (lower bound)";
  const bool exponent_ok =
      !std::isfinite(report.absorption_exponent) || std::abs(-report.absorption_exponent - 1.0) <= 0.2;
  const bool pass = report.nonsingular_count > 0 && report.agree_count == report.nonsingular_count && exponent_ok &&
                    report.max_residual <= 1e-8;
  section["absorption_exponent_ok"] = exponent_ok;
  section["pass"] = pass;
  write_artifact(c.out, "sweep.csv", [&](const fs::path& path) { write_sweep_csv(report, path); });
  c.certificates["resolvent"] = {{"pass", pass},
                                 {"C", report.C},
                                 {"gamma_star", report.gamma_star},
                                 {"agreement", report.agreement},
                                 {"absorption_exponent", finite_or_null(report.absorption_exponent)}};
  return section;
}

json stage_dichotomy(Context& c) {
  const WaveProfile& p = c.need_profile();
  const auto& d = c.cfg.dichotomy;
  json points = json::array();
  bool pass = true;
  double worst_comm = 0.0, worst_rel = 0.0;
  for (std::size_t i = 0; i < d.lambdas.size(); ++i) {
    const FrequencyPoint fp{c.transverse_eta(), d.lambdas[i]};
    const ResolventField field = assemble_G(c.sys, p, fp, c.resolvent_grid());
    DichotomyOptions opt;
    opt.seed = c.cfg.seed + i;
    const DichotomyData data = propagate_subspaces(field, opt);
    const DichotomyCheck check = verify_dichotomy(data, field, d.pairs, d.commutator_tol, c.cfg.seed + i);
    const double rel = std::abs(data.theta - data.endstate_gap) / data.endstate_gap;
    const bool ok = check.pass && rel <= d.gap_tolerance;
    json entry = to_json(check, data);
    entry["lambda"] = lambda_json(d.lambdas[i]);
    entry["theta_gap_deviation"] = rel;
    entry["pass"] = ok;
    points.push_back(entry);
    pass = pass && ok;
    worst_comm = std::max(worst_comm, check.worst_commutator);
    worst_rel = std::max(worst_rel, rel);
  }

  json turning = json::array();
  const std::size_t nodes = static_cast<std::size_t>(std::floor(2.0 * p.half_length() / d.turning_spacing)) + 1;
  std::vector<double> xs(nodes);
  for (std::size_t i = 0; i < nodes; ++i)
    xs[i] = -p.half_length() + 2.0 * p.half_length() * static_cast<double>(i) / static_cast<double>(nodes - 1);
  std::size_t located = 0;
  for (std::size_t i = 0; i < d.turning_rays.size(); ++i) {
    const Vec& ray = d.turning_rays[i];
    require(ray.size() == c.sys.d, ErrorKind::usage,
            "dichotomy.turning_rays[" + std::to_string(i) + "]: expected " + std::to_string(c.sys.d) +
                " entries (eta_2.., tau)");
    const auto report = detect_turning_points(c.sys, p, ray, xs);
    located += report.locations.size();
    turning.push_back(to_json(report));
  }

  c.certificates["dichotomy"] = {{"pass", pass}, {"worst_commutator", worst_comm}, {"worst_gap_deviation", worst_rel}};
  c.certificates["turning_points"] = {{"count", located}};
  return {{"points", points}, {"turning_points", turning}, {"pass", pass}};
}

json stage_symmetrizer(Context& c) {
  const WaveProfile& p = c.need_profile();
  const auto& d = c.cfg.dichotomy;
  const double theta_req = c.cfg.symmetrizer.theta_req.value_or(c.cfg.hypotheses.theta_req);
  json points = json::array();
  bool pass = true;
  double theta_min = std::numeric_limits<double>::infinity(), c0_max = 0.0, energy_max = 0.0;
  for (std::size_t i = 0; i < d.lambdas.size(); ++i) {
    const FrequencyPoint fp{c.transverse_eta(), d.lambdas[i]};
    const ResolventField field = assemble_G(c.sys, p, fp, c.resolvent_grid());
    DichotomyOptions opt;
    opt.seed = c.cfg.seed + i;
    const SymmetrizerField S = lyapunov_symmetrizer(field, opt);
    const Certificate cert = verify_symmetrizer(S, field, theta_req, c.cfg.symmetrizer.energy_trials, c.cfg.seed + i);
    const auto plus = limit_spectral_split(field.G_plus, 1e-8);
    const auto minus = limit_spectral_split(field.G_minus, 1e-8);
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& mu : plus.stable_values) gap = std::min(gap, -mu.real());
    for (const auto& mu : minus.unstable_values) gap = std::min(gap, mu.real());
    json entry = to_json(cert, S);
    entry["lambda"] = lambda_json(d.lambdas[i]);
    entry["half_endstate_gap"] = 0.5 * gap;
    entry["theta_over_C0"] = cert.theta_measured / cert.c0_measured;
    points.push_back(entry);
    pass = pass && cert.pass;
    theta_min = std::min(theta_min, cert.theta_measured);
    c0_max = std::max(c0_max, cert.c0_measured);
    energy_max = std::max(energy_max, cert.energy_check);
    write_artifact(c.out, "symmetrizer_" + std::to_string(i) + ".csv",
                   [&](const fs::path& path) { write_symmetrizer_csv(S, path); });
  }
  c.theta_measured = theta_min;

  json constant = json::array();
  Vec eta = Vec::Zero(c.sys.d);
  eta(0) = c.cfg.hypotheses.eta_min;
  for (const auto& [label, w] : {std::pair{"w_minus", c.cfg.profile.w_minus}, std::pair{"w_plus", c.cfg.profile.w_plus}}) {
    try {
      const SymmetrizerField S = constant_symmetrizer(c.sys, w, eta);
      constant.push_back({{"state", label}, {"eta", vec_json(eta)}, {"theta", S.theta}});
    } catch (const Error& e) {
      constant.push_back({{"state", label}, {"eta", vec_json(eta)}, {"error", e.what()}});
    }
  }

  c.certificates["symmetrizer"] = {
      {"pass", pass}, {"theta", theta_min}, {"C0", c0_max}, {"energy_check", energy_max}, {"theta_req", theta_req}};
  return {{"points", points}, {"constant_frame", constant}, {"theta_req", theta_req}, {"pass", pass}};
}

json stage_simulate(Context& c) {
  const WaveProfile& p = c.need_profile();
  const auto& s = c.cfg.simulate;
  double gamma = 0.0;
  std::string gamma_source = "config";
  if (s.gamma) {
    gamma = *s.gamma;
  } else if (c.theta_measured) {
    gamma = -0.5 * *c.theta_measured;
    gamma_source = "symmetrizer theta/2";
  } else {
    gamma = -0.5 * chf_theta(c);
    gamma_source = "chf theta/2";
  }

  const InitialData v0 = gaussian_data(s.direction, s.amplitude, 0.0, s.width);
  const Simulator sim(c.sys, p, s.sim);
  const SimRun run = sim.run(v0);
  const DampingFit fit = verify_classical_damping(run.trace);
  const double slack = fit.feasible ? verify_integrated_damping(run.trace, fit.eta, fit.C)
                                    : -std::numeric_limits<double>::infinity();
  const ShortTimeResult shortt = verify_short_time(run.trace);
  const CutoffPair cut{s.tau_c, run.history.times.back()};
  const TruncationReport trunc = truncation_pipeline(run.history, cut, gamma, s.sim.s, s.sim.weight_rate);

  json section = {{"damping", to_json(fit)},
                  {"integrated_slack", finite_or_null(slack)},
                  {"C_short", finite_or_null(shortt.C_short)},
                  {"short_time_refuted", shortt.refuted},
                  {"truncation", to_json(trunc)},
                  {"gamma", gamma},
                  {"gamma_source", gamma_source},
                  {"dt", sim.stable_dt()},
                  {"boundary_max", run.boundary_max},
                  {"boundary_ok", run.boundary_ok}};
  bool pass = fit.feasible && fit.eta > 0.0 && slack >= 0.0 && !shortt.refuted && trunc.pass;

  if (s.refinement_check) {
    SimConfig fine = s.sim;
    fine.nodes = 2 * s.sim.nodes - 1;
    fine.keep_history = false;
    const SimRun run2 = Simulator(c.sys, p, fine).run(v0);
    const DampingFit fit2 = verify_classical_damping(run2.trace);
    const double rel = fit.eta > 0.0 ? std::abs(fit2.eta - fit.eta) / fit.eta : std::numeric_limits<double>::infinity();
    const bool ok = fit2.feasible && rel <= s.refinement_tolerance;
    section["refinement"] = {{"nodes", fine.nodes}, {"eta", fit2.eta}, {"C", fit2.C},
                             {"relative_change", finite_or_null(rel)}, {"pass", ok}};
    pass = pass && ok;
  }
  section["pass"] = pass;
  write_artifact(c.out, "trace.csv", [&](const fs::path& path) { write_trace_csv(run.trace, path); });
  c.certificates["damping"] = {{"pass", pass}, {"eta", fit.eta}, {"C", fit.C}, {"gamma", gamma},
                               {"C2", finite_or_null(trunc.C2)}};
  return section;
}

}  // namespace

double profile_speed(const SystemSpec& sys, const ProfileSettings& settings) {
  if (settings.speed) return *settings.speed;
  const Vec& wm = settings.w_minus;
  const Vec& wp = settings.w_plus;
  const double jump = wp(0) - wm(0);
  if (jump == 0.0) return 0.0;
  return (sys.flux(wp, 0)(0) - sys.flux(wm, 0)(0)) / jump;
}

WaveProfile build_profile(const SystemSpec& sys, const RunConfig& cfg) {
  const auto& ps = cfg.profile;
  require(ps.w_minus.size() == sys.n, ErrorKind::usage,
          "profile.w_minus: expected " + std::to_string(sys.n) + " entries for " + sys.name);
  const double s = profile_speed(sys, ps);
  std::string method = ps.method;
  if (method == "auto") {
    if ((ps.w_minus - ps.w_plus).norm() == 0.0)
      method = "constant";
    else
      method = (sys.name == "jin-xin" && sys.n == 2) ? "closed-form" : "shooting";
  }
  WaveProfile p;
  if (method == "constant") {
    p = constant_profile(ps.w_minus, s, ps.L, ps.nodes);
  } else if (method == "closed-form") {
    require(sys.name == "jin-xin" && sys.n == 2, ErrorKind::model, "profile.method: closed form exists only for 1-d Jin-Xin");
    for (const Vec* w : {&ps.w_minus, &ps.w_plus})
      require(std::abs((*w)(1) - 0.5 * (*w)(0) * (*w)(0)) <= 1e-12, ErrorKind::model,
              "profile endstates must be Burgers equilibria v = u^2/2");
    p = solve_profile_jinxin(cfg.system_params.at("a").get<double>(), ps.w_minus(0), ps.w_plus(0), ps.L, ps.nodes);
  } else {
    ShootingOptions opt;
    opt.L = ps.L;
    opt.nodes = ps.nodes;
    opt.tol = ps.tol;
    p = solve_profile_shooting(sys, ps.w_minus, ps.w_plus, s, opt);
  }
  p.params["method"] = method;
  return p;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    require(out.good(), ErrorKind::usage, "cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

RunResult run(const RunConfig& cfg, std::ostream* log) {
  Context c(cfg, make_system(cfg.system_name, cfg.system_params), cfg.output, log);
  fs::create_directories(c.out);

  using Stage = json (*)(Context&);
  const std::vector<std::pair<std::string, Stage>> all{
      {"hypotheses", stage_hypotheses}, {"profile", stage_profile},         {"resolvent-sweep", stage_sweep},
      {"dichotomy", stage_dichotomy},   {"symmetrizer", stage_symmetrizer}, {"simulate", stage_simulate}};

  RunResult result;
  json sections = json::object();
  bool any_fail = false;
  std::optional<int> error_code;
  for (const auto& [name, stage] : all) {
    if (cfg.pipeline != "full" && cfg.pipeline != name) continue;
    const auto start = std::chrono::steady_clock::now();
    json section;
    try {
      section = stage(c);
      section["status"] = section.value("pass", false) ? "pass" : "fail";
      any_fail = any_fail || !section.value("pass", false);
    } catch (const Error& e) {
      section = {{"status", "error"}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
      if (!error_code) error_code = exit_code_for(e.kind());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.note(name + ": " + section["status"].get<std::string>() + " (" + std::to_string(secs) + " s)");
    if (section["status"] == "error") c.note("  " + section["error"]["message"].get<std::string>());
    sections[name] = section;
  }

  result.exit_status = error_code ? *error_code : any_fail ? exit_code::refuted : exit_code::ok;
  result.summary = {{"schema_version", kSchemaVersion},
                    {"tool_version", kToolVersion},
                    {"config", to_json(cfg)},
                    {"pipelines", sections},
                    {"certificates", c.certificates},
                    {"pass", result.exit_status == exit_code::ok},
                    {"exit_status", result.exit_status}};
  write_atomic(c.out / "summary.json", dump_json(result.summary));
  return result;
}

json merge_reports(const std::vector<fs::path>& paths) {
  require(!paths.empty(), ErrorKind::usage, "report: no summaries given");
  json runs = json::array();
  std::optional<std::string> version;
  std::map<std::string, std::vector<double>> values;
  for (const auto& given : paths) {
    const fs::path file = fs::is_directory(given) ? given / "summary.json" : given;
    std::ifstream in(file);
    require(in.good(), ErrorKind::usage, "report: cannot open " + file.string());
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::usage, "report: " + file.string() + ": " + e.what());
    }
    require(doc.value("schema_version", -1) == kSchemaVersion, ErrorKind::compatibility,
            "report: " + file.string() + " has schema_version " + doc.value("schema_version", json(nullptr)).dump() +
                ", expected " + std::to_string(kSchemaVersion));
    const std::string v = doc.value("tool_version", "");
    if (!version) version = v;
    require(v == *version, ErrorKind::compatibility,
            "report: " + file.string() + " was written by version " + v + ", others by " + *version);
    const json& certs = doc.at("certificates");
    runs.push_back({{"path", given.string()},
                    {"pipeline", doc.at("config").value("pipeline", "")},
                    {"seed", doc.at("config").value("seed", 0)},
                    {"pass", doc.value("pass", false)},
                    {"certificates", certs}});
    for (auto it = certs.begin(); it != certs.end(); ++it)
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
        if (jt.value().is_number()) values[it.key() + "." + jt.key()].push_back(jt.value().get<double>());
  }
  json constants = json::object();
  for (const auto& [key, xs] : values) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    constants[key] = {{"min", *lo}, {"max", *hi}, {"mean", mean}, {"runs", xs.size()}};
  }
  bool all_pass = true;
  for (const auto& r : runs) all_pass = all_pass && r["pass"].get<bool>();
  return {{"schema_version", kSchemaVersion},
          {"tool_version", *version},
          {"runs", runs},
          {"constants", constants},
          {"pass", all_pass}};
}

}  // namespace relaxstab

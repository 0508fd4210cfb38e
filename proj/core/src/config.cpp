#include "relaxstab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "relaxstab/error.hpp"

namespace relaxstab {

using nlohmann::json;

namespace {

/// View of one JSON object that remembers its path and which keys were consumed.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
    require(node.is_object(), ErrorKind::usage, where() + ": expected an object");
  }

  bool has(const std::string& key) const { return node_->contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_->at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  Reader child(const std::string& key) { return Reader(raw(key), field(key)); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return as_number(raw(key), field(key));
  }

  std::optional<double> optional_number(const std::string& key, std::optional<double> fallback) {
    if (!has(key) || node_->at(key).is_null()) {
      if (has(key)) seen_.insert(key);
      return fallback;
    }
    return as_number(raw(key), field(key));
  }

  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min_value = 1) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    require(v.is_number_integer() || v.is_number_unsigned(), ErrorKind::usage, field(key) + ": expected an integer");
    const auto value = v.get<long long>();
    require(value >= static_cast<long long>(min_value), ErrorKind::usage,
            field(key) + ": must be at least " + std::to_string(min_value));
    return static_cast<std::size_t>(value);
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    require(v.is_number_integer() || v.is_number_unsigned(), ErrorKind::usage, field(key) + ": expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    require(v.is_boolean(), ErrorKind::usage, field(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    require(v.is_string(), ErrorKind::usage, field(key) + ": expected a string");
    return v.get<std::string>();
  }

  Vec vector(const std::string& key) {
    const json& v = raw(key);
    return as_vector(v, field(key));
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const Vec v = vector(key);
    return {v.data(), v.data() + v.size()};
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = node_->begin(); it != node_->end(); ++it)
      require(seen_.count(it.key()) > 0, ErrorKind::usage, field(it.key()) + ": unknown key");
  }

  static double as_number(const json& v, const std::string& path) {
    require(v.is_number(), ErrorKind::usage, path + ": expected a number");
    const double x = v.get<double>();
    require(std::isfinite(x), ErrorKind::usage, path + ": must be finite");
    return x;
  }

  static Vec as_vector(const json& v, const std::string& path) {
    require(v.is_array(), ErrorKind::usage, path + ": expected an array of numbers");
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
      out(static_cast<Eigen::Index>(i)) = as_number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void positive(double x, const std::string& path) {
  require(x > 0.0, ErrorKind::usage, path + ": must be positive");
}

void read_profile(Reader r, ProfileSettings& p) {
  p.method = r.string("method", p.method);
  static const std::vector<std::string> methods{"auto", "closed-form", "shooting", "constant"};
  require(std::find(methods.begin(), methods.end(), p.method) != methods.end(), ErrorKind::usage,
          r.field("method") + ": expected auto, closed-form, shooting or constant");
  require(r.has("w_minus"), ErrorKind::usage, r.field("w_minus") + ": missing endstate");
  p.w_minus = r.vector("w_minus");
  if (p.method == "constant" && !r.has("w_plus")) {
    p.w_plus = p.w_minus;
  } else {
    require(r.has("w_plus"), ErrorKind::usage, r.field("w_plus") + ": missing endstate");
    p.w_plus = r.vector("w_plus");
  }
  require(p.w_minus.size() == p.w_plus.size() && p.w_minus.size() > 0, ErrorKind::usage,
          r.field("w_plus") + ": endstates must have the same nonzero length");
  p.speed = r.optional_number("speed", p.speed);
  p.L = r.number("L", p.L);
  positive(p.L, r.field("L"));
  p.nodes = r.count("nodes", p.nodes, 5);
  p.tol = r.number("tol", p.tol);
  positive(p.tol, r.field("tol"));
  r.finish();
}

void read_hypotheses(Reader r, HypothesisSettings& h) {
  h.eta_min = r.number("eta_min", h.eta_min);
  h.eta_max = r.number("eta_max", h.eta_max);
  positive(h.eta_min, r.field("eta_min"));
  require(h.eta_max >= h.eta_min, ErrorKind::usage, r.field("eta_max") + ": must be at least eta_min");
  h.radii = r.count("radii", h.radii);
  h.directions = r.count("directions", h.directions);
  h.theta_req = r.number("theta_req", h.theta_req);
  r.finish();
}

void read_sweep(Reader r, SweepSettings& f) {
  f.gammas = r.numbers("gammas", f.gammas);
  require(!f.gammas.empty(), ErrorKind::usage, r.field("gammas") + ": must not be empty");
  f.r_min = r.number("r_min", f.r_min);
  f.r_max = r.number("r_max", f.r_max);
  positive(f.r_min, r.field("r_min"));
  require(f.r_max >= f.r_min, ErrorKind::usage, r.field("r_max") + ": must be at least r_min");
  f.radii = r.count("radii", f.radii);
  if (r.has("eta")) f.eta = r.vector("eta");
  f.gamma_star = r.optional_number("gamma_star", f.gamma_star);
  f.C = r.optional_number("C", f.C);
  f.L = r.number("L", f.L);
  positive(f.L, r.field("L"));
  f.h_max = r.number("h_max", f.h_max);
  positive(f.h_max, r.field("h_max"));
  f.trials = static_cast<int>(r.count("trials", static_cast<std::size_t>(f.trials)));
  f.power_iterations = static_cast<int>(r.count("power_iterations", static_cast<std::size_t>(f.power_iterations), 0));
  r.finish();
}

void read_norms(Reader r, RunConfig& cfg) {
  cfg.s = r.integer("s", cfg.s);
  require(cfg.s >= 0 && cfg.s <= 3, ErrorKind::usage, r.field("s") + ": integer order 0..3 supported");
  cfg.alpha = r.number("alpha", cfg.alpha);
  r.finish();
}

void read_dichotomy(Reader r, DichotomySettings& d) {
  if (r.has("lambdas")) {
    const json& v = r.raw("lambdas");
    const std::string path = r.field("lambdas");
    require(v.is_array() && !v.empty(), ErrorKind::usage, path + ": expected a nonempty array of [re, im] pairs");
    d.lambdas.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const Vec z = Reader::as_vector(v[i], p);
      require(z.size() == 2, ErrorKind::usage, p + ": expected [re, im]");
      d.lambdas.emplace_back(z(0), z(1));
    }
  }
  d.pairs = r.count("pairs", d.pairs);
  d.commutator_tol = r.number("commutator_tol", d.commutator_tol);
  d.gap_tolerance = r.number("gap_tolerance", d.gap_tolerance);
  if (r.has("turning_rays")) {
    const json& v = r.raw("turning_rays");
    const std::string path = r.field("turning_rays");
    require(v.is_array(), ErrorKind::usage, path + ": expected an array of rays");
    d.turning_rays.clear();
    for (std::size_t i = 0; i < v.size(); ++i)
      d.turning_rays.push_back(Reader::as_vector(v[i], path + "[" + std::to_string(i) + "]"));
  }
  d.turning_spacing = r.number("turning_spacing", d.turning_spacing);
  positive(d.turning_spacing, r.field("turning_spacing"));
  r.finish();
}

void read_symmetrizer(Reader r, SymmetrizerSettings& s) {
  s.theta_req = r.optional_number("theta_req", s.theta_req);
  s.energy_trials = r.count("energy_trials", s.energy_trials, 0);
  r.finish();
}

void read_simulate(Reader r, SimulateSettings& s) {
  SimConfig& c = s.sim;
  c.L = r.number("L", c.L);
  positive(c.L, r.field("L"));
  c.nodes = r.count("nodes", c.nodes, 9);
  c.cfl = r.number("cfl", c.cfl);
  positive(c.cfl, r.field("cfl"));
  const std::string mode = r.string("mode", c.mode == SimMode::linearized ? "linearized" : "nonlinear");
  require(mode == "linearized" || mode == "nonlinear", ErrorKind::usage,
          r.field("mode") + ": expected linearized or nonlinear");
  c.mode = mode == "linearized" ? SimMode::linearized : SimMode::nonlinear;
  const std::string boundary = r.string("boundary", c.boundary == SimBoundary::outflow ? "outflow" : "periodic");
  require(boundary == "outflow" || boundary == "periodic", ErrorKind::usage,
          r.field("boundary") + ": expected outflow or periodic");
  c.boundary = boundary == "outflow" ? SimBoundary::outflow : SimBoundary::periodic;
  c.T = r.number("T", c.T);
  positive(c.T, r.field("T"));
  c.record_dt = r.number("record_dt", c.record_dt);
  positive(c.record_dt, r.field("record_dt"));
  c.blowup_cap = r.number("blowup_cap", c.blowup_cap);
  if (r.has("direction")) s.direction = r.vector("direction");
  s.amplitude = r.number("amplitude", s.amplitude);
  s.width = r.number("width", s.width);
  positive(s.width, r.field("width"));
  s.tau_c = r.number("tau_c", s.tau_c);
  positive(s.tau_c, r.field("tau_c"));
  require(2.0 * s.tau_c < c.T, ErrorKind::usage, r.field("tau_c") + ": cutoff ramps must fit inside T");
  s.gamma = r.optional_number("gamma", s.gamma);
  s.refinement_check = r.boolean("refinement_check", s.refinement_check);
  s.refinement_tolerance = r.number("refinement_tolerance", s.refinement_tolerance);
  r.finish();
}

}  // namespace

const std::vector<std::string>& pipeline_names() {
  static const std::vector<std::string> names{"hypotheses", "profile",     "resolvent-sweep", "dichotomy",
                                              "symmetrizer", "simulate", "full"};
  return names;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.profile.w_minus = Vec::Zero(2);
  cfg.profile.w_minus << 1.0, 0.5;
  cfg.profile.w_plus = Vec::Zero(2);
  cfg.simulate.direction = Vec::Ones(2);
  cfg.simulate.direction(1) = 0.5;
  cfg.dichotomy.turning_rays = {Vec::Ones(1)};
  return cfg;
}

RunConfig parse_config(const json& doc) {
  require(doc.is_object(), ErrorKind::usage, "config: expected a JSON object");
  RunConfig cfg;
  Reader root(doc, "");
  require(root.has("schema_version"), ErrorKind::usage, "schema_version: missing");
  cfg.schema_version = root.integer("schema_version", 0);
  require(cfg.schema_version == kSchemaVersion, ErrorKind::usage,
          "schema_version: expected " + std::to_string(kSchemaVersion) + ", got " +
              std::to_string(cfg.schema_version));

  if (root.has("system")) {
    Reader sys = root.child("system");
    cfg.system_name = sys.string("name", cfg.system_name);
    if (sys.has("params")) {
      cfg.system_params = sys.raw("params");
      require(cfg.system_params.is_object(), ErrorKind::usage, "system.params: expected an object");
    }
    sys.finish();
  }
  require(root.has("profile"), ErrorKind::usage, "profile: missing section (endstates are required)");
  read_profile(root.child("profile"), cfg.profile);
  if (root.has("hypotheses")) read_hypotheses(root.child("hypotheses"), cfg.hypotheses);
  if (root.has("frequency")) read_sweep(root.child("frequency"), cfg.sweep);
  if (root.has("norms")) read_norms(root.child("norms"), cfg);
  if (root.has("dichotomy")) read_dichotomy(root.child("dichotomy"), cfg.dichotomy);
  if (root.has("symmetrizer")) read_symmetrizer(root.child("symmetrizer"), cfg.symmetrizer);
  if (root.has("simulate")) read_simulate(root.child("simulate"), cfg.simulate);
  cfg.pipeline = root.string("pipeline", cfg.pipeline);
  const auto& names = pipeline_names();
  require(std::find(names.begin(), names.end(), cfg.pipeline) != names.end(), ErrorKind::usage,
          "pipeline: unknown pipeline '" + cfg.pipeline + "'");
  cfg.output = root.string("output", cfg.output.string());
  if (root.has("seed")) {
    const json& v = root.raw("seed");
    require(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0), ErrorKind::usage,
            "seed: expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  root.finish();

  const auto n = cfg.profile.w_minus.size();
  if (cfg.simulate.direction.size() == 0) cfg.simulate.direction = Vec::Ones(n);
  require(cfg.simulate.direction.size() == n, ErrorKind::usage,
          "simulate.direction: expected " + std::to_string(n) + " entries");
  if (cfg.dichotomy.turning_rays.empty()) cfg.dichotomy.turning_rays = {Vec::Ones(1)};
  cfg.simulate.sim.s = cfg.s;
  cfg.simulate.sim.weight_rate = cfg.alpha;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::usage, "cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, "config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["system"] = {{"name", cfg.system_name}, {"params", cfg.system_params}};
  const auto& p = cfg.profile;
  j["profile"] = {{"method", p.method}, {"w_minus", vec_json(p.w_minus)}, {"w_plus", vec_json(p.w_plus)},
                  {"L", p.L},           {"nodes", p.nodes},               {"tol", p.tol}};
  if (p.speed) j["profile"]["speed"] = *p.speed;
  const auto& h = cfg.hypotheses;
  j["hypotheses"] = {{"eta_min", h.eta_min}, {"eta_max", h.eta_max},       {"radii", h.radii},
                     {"directions", h.directions}, {"theta_req", h.theta_req}};
  const auto& f = cfg.sweep;
  j["frequency"] = {{"gammas", f.gammas}, {"r_min", f.r_min}, {"r_max", f.r_max}, {"radii", f.radii},
                    {"eta", vec_json(f.eta)}, {"L", f.L}, {"h_max", f.h_max}, {"trials", f.trials},
                    {"power_iterations", f.power_iterations}};
  if (f.gamma_star) j["frequency"]["gamma_star"] = *f.gamma_star;
  if (f.C) j["frequency"]["C"] = *f.C;
  j["norms"] = {{"s", cfg.s}, {"alpha", cfg.alpha}};
  const auto& d = cfg.dichotomy;
  json lambdas = json::array();
  for (const auto& z : d.lambdas) lambdas.push_back({z.real(), z.imag()});
  json rays = json::array();
  for (const auto& r : d.turning_rays) rays.push_back(vec_json(r));
  j["dichotomy"] = {{"lambdas", lambdas},
                    {"pairs", d.pairs},
                    {"commutator_tol", d.commutator_tol},
                    {"gap_tolerance", d.gap_tolerance},
                    {"turning_rays", rays},
                    {"turning_spacing", d.turning_spacing}};
  j["symmetrizer"] = {{"energy_trials", cfg.symmetrizer.energy_trials}};
  if (cfg.symmetrizer.theta_req) j["symmetrizer"]["theta_req"] = *cfg.symmetrizer.theta_req;
  const auto& s = cfg.simulate;
  j["simulate"] = {{"L", s.sim.L},
                   {"nodes", s.sim.nodes},
                   {"cfl", s.sim.cfl},
                   {"mode", s.sim.mode == SimMode::linearized ? "linearized" : "nonlinear"},
                   {"boundary", s.sim.boundary == SimBoundary::outflow ? "outflow" : "periodic"},
                   {"T", s.sim.T},
                   {"record_dt", s.sim.record_dt},
                   {"blowup_cap", s.sim.blowup_cap},
                   {"direction", vec_json(s.direction)},
                   {"amplitude", s.amplitude},
                   {"width", s.width},
                   {"tau_c", s.tau_c},
                   {"refinement_check", s.refinement_check},
                   {"refinement_tolerance", s.refinement_tolerance}};
  if (s.gamma) j["simulate"]["gamma"] = *s.gamma;
  j["pipeline"] = cfg.pipeline;
  j["output"] = cfg.output.string();
  j["seed"] = cfg.seed;
  return j;
}

}  // namespace relaxstab

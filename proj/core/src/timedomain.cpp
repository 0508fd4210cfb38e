#include "relaxstab/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "relaxstab/error.hpp"

namespace relaxstab {

namespace {

double spectral_radius(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<Vec> derivative(const std::vector<Vec>& f, double dx, bool periodic) {
  if (!periodic) return differentiate4(f, dx);
  const std::size_t n = f.size();
  std::vector<Vec> d(n);
  const double c = 1.0 / (12.0 * dx);
  for (std::size_t i = 0; i < n; ++i) {
    auto at = [&](long k) -> const Vec& { return f[static_cast<std::size_t>((static_cast<long>(n) + k) % static_cast<long>(n))]; };
    const long li = static_cast<long>(i);
    d[i] = (at(li - 2) - 8.0 * at(li - 1) + 8.0 * at(li + 1) - at(li + 2)) * c;
  }
  return d;
}

void require_uniform(const std::vector<double>& t, const char* what) {
  require(t.size() >= 2, ErrorKind::argument, std::string(what) + " needs at least two samples");
  const double dt = t[1] - t[0];
  require(dt > 0.0, ErrorKind::argument, std::string(what) + " times must increase");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * std::max(1.0, dt))
      fail(ErrorKind::argument, std::string(what) + " has a gap or uneven spacing at t = " + std::to_string(t[i]));
}

/// Trapezoid integral of y over samples with lo <= t <= hi.
double integrate(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
  const double eps = 1e-9 * std::max(1.0, std::abs(hi));
  double sum = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i - 1] >= lo - eps && t[i] <= hi + eps) sum += 0.5 * (t[i] - t[i - 1]) * (y[i - 1] + y[i]);
  return sum;
}

double ratio(double num, double den) {
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

double smoothstep(double u) { return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u); }
double dsmoothstep(double u) { return 30.0 * u * u * (1.0 - u) * (1.0 - u); }
double d2smoothstep(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

}  // namespace

// ---------------------------------------------------------------- simulator

Simulator::Simulator(const SystemSpec& sys, const WaveProfile& profile, const SimConfig& cfg, Forcing forcing)
    : sys_(&sys), cfg_(cfg), forcing_(std::move(forcing)) {
  require(cfg.nodes >= 8, ErrorKind::argument, "simulation needs at least eight nodes");
  require(cfg.L > 0.0 && cfg.T > 0.0 && cfg.record_dt > 0.0, ErrorKind::argument,
          "simulation length, horizon and record interval must be positive");
  require(cfg.cfl > 0.0, ErrorKind::argument, "CFL number must be positive");
  require(cfg.s >= 0 && cfg.s <= 3, ErrorKind::argument, "energy order s must be in [0, 3]");
  require(profile.dim() == sys.n, ErrorKind::argument, "profile and system dimensions differ");
  const bool periodic = cfg.boundary == SimBoundary::periodic;
  require(!periodic || profile.is_constant(), ErrorKind::argument, "periodic runs need a constant profile");
  const std::size_t N = cfg.nodes;
  dx_ = 2.0 * cfg.L / static_cast<double>(periodic ? N : N - 1);
  grid_.resize(N);
  for (std::size_t i = 0; i < N; ++i) grid_[i] = -cfg.L + dx_ * static_cast<double>(i);
  const ProfileSampler sampler(profile);
  wbar_.resize(N);
  f1bar_.resize(N);
  rbar_.resize(N);
  a_.resize(N);
  dr_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    wbar_[i] = sampler(grid_[i]).first;
    f1bar_[i] = sys.flux(wbar_[i], 0);
    rbar_[i] = sys.source(wbar_[i]);
    a_[i] = sys.comoving_jacobian(wbar_[i], profile.speed);
    dr_[i] = sys.relaxation_jacobian(wbar_[i]);
    alpha_ = std::max(alpha_, spectral_radius(a_[i]));
  }
  if (cfg.mode == SimMode::nonlinear) alpha_ *= 1.1;
  speed_ = profile.speed;
}

double Simulator::stable_dt() const {
  if (alpha_ <= 0.0) return cfg_.record_dt;
  return std::min(cfg_.record_dt, cfg_.cfl * dx_ / alpha_);
}

SimState Simulator::initial_state(const InitialData& v0) const {
  SimState st;
  st.grid = grid_;
  st.dx = dx_;
  st.v.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    st.v[i] = v0 ? v0(grid_[i]) : Vec::Zero(sys_->n);
    require(st.v[i].size() == sys_->n && st.v[i].allFinite(), ErrorKind::argument,
            "initial data must be finite with n components");
  }
  return st;
}

std::vector<Vec> Simulator::rhs(const std::vector<Vec>& v, bool linear) const {
  const std::size_t N = v.size();
  const int n = sys_->n;
  const bool periodic = cfg_.boundary == SimBoundary::periodic;
  std::vector<Vec> flux(N + 4), state(N + 4);
  for (std::size_t i = 0; i < N; ++i) {
    state[i + 2] = v[i];
    flux[i + 2] = linear ? Vec(a_[i] * v[i])
                         : Vec(sys_->flux(wbar_[i] + v[i], 0) - f1bar_[i] - speed_ * v[i]);
  }
  for (int g = 0; g < 2; ++g) {
    const std::size_t lo = static_cast<std::size_t>(g), hi = N + 3 - static_cast<std::size_t>(g);
    const std::size_t src_lo = periodic ? N - 2 + g : 0, src_hi = periodic ? 1 - g : N - 1;
    state[lo] = state[src_lo + 2];
    flux[lo] = flux[src_lo + 2];
    state[hi] = state[src_hi + 2];
    flux[hi] = flux[src_hi + 2];
  }
  std::vector<Vec> fp(N + 4), fm(N + 4);
  for (std::size_t e = 0; e < N + 4; ++e) {
    fp[e] = 0.5 * (flux[e] + alpha_ * state[e]);
    fm[e] = 0.5 * (flux[e] - alpha_ * state[e]);
  }
  // Interface between extended cells e and e+1, for e = 1 .. N+1.
  std::vector<Vec> face(N + 4, Vec::Zero(n));
  for (std::size_t e = 1; e + 2 < N + 4; ++e)
    face[e] = (-fp[e - 1] + 5.0 * fp[e] + 2.0 * fp[e + 1]) / 6.0 + (2.0 * fm[e] + 5.0 * fm[e + 1] - fm[e + 2]) / 6.0;
  std::vector<Vec> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t e = i + 2;
    out[i] = -(face[e] - face[e - 1]) / dx_;
    out[i] += linear ? Vec(dr_[i] * v[i]) : Vec(sys_->source(wbar_[i] + v[i]) - rbar_[i]);
  }
  return out;
}

std::vector<Vec> Simulator::operator_rhs(const std::vector<Vec>& v) const {
  return rhs(v, cfg_.mode == SimMode::linearized);
}

std::vector<Vec> Simulator::linear_rhs(const std::vector<Vec>& v) const { return rhs(v, true); }

std::vector<Vec> Simulator::forcing_at(double t) const {
  std::vector<Vec> f(grid_.size(), Vec::Zero(sys_->n));
  if (forcing_)
    for (std::size_t i = 0; i < grid_.size(); ++i) f[i] = forcing_(t, grid_[i]);
  return f;
}

void Simulator::step(SimState& st, double dt) const {
  if (alpha_ > 0.0 && dt > cfg_.cfl * dx_ / alpha_ * (1.0 + 1e-12))
    fail(ErrorKind::step, "time step " + std::to_string(dt) + " violates the CFL bound " +
                              std::to_string(cfg_.cfl * dx_ / alpha_));
  const std::size_t N = st.v.size();
  auto L = [&](const std::vector<Vec>& v, double t) {
    std::vector<Vec> r = operator_rhs(v);
    if (forcing_)
      for (std::size_t i = 0; i < N; ++i) r[i] += forcing_(t, grid_[i]);
    return r;
  };
  const std::vector<Vec> k1 = L(st.v, st.t);
  std::vector<Vec> v1(N), v2(N);
  for (std::size_t i = 0; i < N; ++i) v1[i] = st.v[i] + dt * k1[i];
  const std::vector<Vec> k2 = L(v1, st.t + dt);
  for (std::size_t i = 0; i < N; ++i) v2[i] = 0.75 * st.v[i] + 0.25 * (v1[i] + dt * k2[i]);
  const std::vector<Vec> k3 = L(v2, st.t + 0.5 * dt);
  double vmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    st.v[i] = (1.0 / 3.0) * st.v[i] + (2.0 / 3.0) * (v2[i] + dt * k3[i]);
    const double m = st.v[i].cwiseAbs().maxCoeff();
    vmax = std::isfinite(m) ? std::max(vmax, m) : std::numeric_limits<double>::infinity();
  }
  st.t += dt;
  if (!(vmax <= cfg_.blowup_cap))
    fail(ErrorKind::instability, "solution exceeded the blowup cap at t = " + std::to_string(st.t));
}

SimRun Simulator::run(const InitialData& v0) const {
  SimRun out;
  SimState st = initial_state(v0);
  const std::size_t substeps = static_cast<std::size_t>(std::ceil(cfg_.record_dt / stable_dt() - 1e-12));
  const double dt = cfg_.record_dt / static_cast<double>(substeps);
  const std::size_t records = static_cast<std::size_t>(std::llround(cfg_.T / cfg_.record_dt));
  const bool periodic = cfg_.boundary == SimBoundary::periodic;
  if (cfg_.keep_history) {
    out.history.grid = grid_;
    out.history.dx = dx_;
  }
  auto record = [&](std::size_t k) {
    const double t = static_cast<double>(k) * cfg_.record_dt;
    std::vector<Vec> f = forcing_at(t);
    if (cfg_.mode == SimMode::nonlinear) {
      const std::vector<Vec> rn = operator_rhs(st.v), rl = linear_rhs(st.v);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += rn[i] - rl[i];
    }
    const auto [E, L2] = measure_energy(st.v, grid_, dx_, cfg_.s, cfg_.weight_rate, periodic);
    out.trace.times.push_back(t);
    out.trace.E.push_back(E);
    out.trace.L2.push_back(L2);
    out.trace.F.push_back(measure_energy(f, grid_, dx_, cfg_.s, cfg_.weight_rate, periodic).first);
    if (!periodic)
      out.boundary_max = std::max({out.boundary_max, st.v.front().cwiseAbs().maxCoeff(), st.v.back().cwiseAbs().maxCoeff()});
    if (cfg_.keep_history) {
      out.history.times.push_back(t);
      out.history.v.push_back(st.v);
      out.history.f.push_back(std::move(f));
    }
  };
  record(0);
  for (std::size_t k = 1; k <= records; ++k) {
    for (std::size_t j = 0; j < substeps; ++j) step(st, dt);
    st.t = static_cast<double>(k) * cfg_.record_dt;
    record(k);
  }
  out.boundary_ok = out.boundary_max <= cfg_.boundary_tol;
  out.final_state = std::move(st);
  return out;
}

std::pair<double, double> measure_energy(const std::vector<Vec>& v, const std::vector<double>& grid, double dx, int s,
                                         double weight_rate, bool periodic) {
  require(s >= 0 && s <= 3, ErrorKind::argument, "energy order s must be in [0, 3]");
  require(v.size() == grid.size(), ErrorKind::argument, "state and grid sizes differ");
  const std::size_t N = v.size();
  if (N == 0) return {0.0, 0.0};
  std::vector<double> w(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double alpha = std::exp(weight_rate * grid[i]);
    w[i] = alpha * alpha * dx * (!periodic && (i == 0 || i + 1 == N) ? 0.5 : 1.0);
  }
  auto weighted = [&](const std::vector<Vec>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) sum += w[i] * f[i].squaredNorm();
    return sum;
  };
  const double l2 = weighted(v);
  double e = l2;
  std::vector<Vec> d = v;
  for (int k = 1; k <= s; ++k) {
    d = derivative(d, dx, periodic);
    e += weighted(d);
  }
  return {e, l2};
}

// ---------------------------------------------------------------- damping checks

DampingFit verify_classical_damping(const EnergyTrace& tr, const DampingFitOptions& opt) {
  require_uniform(tr.times, "energy trace");
  const std::size_t n = tr.times.size();
  const double dt = tr.times[1] - tr.times[0];
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; ++i)
    if (tr.times[i] >= opt.t0 - 1e-12 && tr.times[i] <= opt.t1 + 1e-12) idx.push_back(i);
  require(n >= 5 && idx.size() >= 5, ErrorKind::argument, "damping window holds fewer than five samples");
  const std::vector<double> dE = differentiate4(tr.E, dt);
  DampingFit out;
  out.samples = idx.size();
  double best = std::numeric_limits<double>::infinity();
  double de_scale = 0.0;
  for (auto i : idx) de_scale += dE[i] * dE[i];
  std::optional<double> first_witness;
  for (std::size_t k = 1; k <= opt.eta_points; ++k) {
    const double eta = opt.eta_max * static_cast<double>(k) / static_cast<double>(opt.eta_points);
    double c_req = 0.0, sxy = 0.0, syy = 0.0;
    bool feasible = true;
    std::optional<double> witness;
    for (auto i : idx) {
      const double num = dE[i] + eta * tr.E[i];
      const double den = tr.L2[i] + tr.F[i];
      sxy += num * den;
      syy += den * den;
      if (den > 1e-14 * std::max(tr.E[i], 1e-300)) {
        c_req = std::max(c_req, num / den);
      } else if (num > opt.rel_tol * tr.E[i] + 1e-300) {
        feasible = false;
        if (!witness) witness = tr.times[i];
      }
    }
    if (c_req > opt.C_cap) {
      feasible = false;
      if (!witness) witness = tr.times[idx.front()];
    }
    if (k == 1) first_witness = witness;
    if (!feasible) continue;
    const double c_ls = syy > 0.0 ? std::max(0.0, sxy / syy) : 0.0;
    double res = 0.0;
    for (auto i : idx) {
      const double r = dE[i] + eta * tr.E[i] - c_ls * (tr.L2[i] + tr.F[i]);
      res += r * r;
    }
    res = de_scale > 0.0 ? std::sqrt(res / de_scale) : std::sqrt(res);
    if (res < best) {
      best = res;
      out.feasible = true;
      out.eta = eta;
      out.C = c_req;
      out.residual = res;
    }
  }
  if (!out.feasible) out.refutation_time = first_witness.value_or(tr.times[idx.front()]);
  return out;
}

double verify_integrated_damping(const EnergyTrace& tr, double eta, double C) {
  require_uniform(tr.times, "energy trace");
  const std::size_t n = tr.times.size();
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double T = tr.times[k];
    double integral = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      const double a = std::exp(-eta * (T - tr.times[i - 1])) * (tr.L2[i - 1] + tr.F[i - 1]);
      const double b = std::exp(-eta * (T - tr.times[i])) * (tr.L2[i] + tr.F[i]);
      integral += 0.5 * (tr.times[i] - tr.times[i - 1]) * (a + b);
    }
    const double rhs = std::max(C, 1.0) * std::exp(-eta * (T - tr.times.front())) * tr.E.front() + C * integral;
    worst = std::min(worst, rhs - tr.E[k]);
  }
  return worst;
}

ShortTimeResult verify_short_time(const EnergyTrace& tr, double cap) {
  require(!tr.times.empty(), ErrorKind::argument, "empty energy trace");
  ShortTimeResult out;
  double integral = 0.0;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (k > 0) integral += 0.5 * (tr.times[k] - tr.times[k - 1]) * (tr.F[k] + tr.F[k - 1]);
    const double c = std::isfinite(tr.E[k]) ? ratio(tr.E[k], tr.E.front() + integral)
                                            : std::numeric_limits<double>::infinity();
    out.C_short = std::max(out.C_short, c);
  }
  out.refuted = !(out.C_short <= cap);
  return out;
}

// ---------------------------------------------------------------- truncation

double CutoffPair::chi1(double t) const { return smoothstep(std::clamp(t / tau_c, 0.0, 1.0)); }
double CutoffPair::chiT(double t) const { return smoothstep(std::clamp((T - t) / tau_c, 0.0, 1.0)); }
double CutoffPair::dchi1(double t) const { return dsmoothstep(std::clamp(t / tau_c, 0.0, 1.0)) / tau_c; }
double CutoffPair::dchiT(double t) const { return -dsmoothstep(std::clamp((T - t) / tau_c, 0.0, 1.0)) / tau_c; }
double CutoffPair::d2chi1(double t) const {
  return d2smoothstep(std::clamp(t / tau_c, 0.0, 1.0)) / (tau_c * tau_c);
}
double CutoffPair::d2chiT(double t) const {
  return d2smoothstep(std::clamp((T - t) / tau_c, 0.0, 1.0)) / (tau_c * tau_c);
}

TruncationReport truncation_pipeline(const History& h, const CutoffPair& cut, double gamma, int s, double weight_rate,
                                     double C2_cap) {
  require(!h.times.empty() && h.v.size() == h.times.size() && h.f.size() == h.times.size(), ErrorKind::argument,
          "history is empty or incomplete");
  require_uniform(h.times, "history");
  require(cut.tau_c > 0.0 && 2.0 * cut.tau_c <= cut.T, ErrorKind::argument, "cutoff ramps must fit in [0, T]");
  const double t0 = h.times.front();
  require(std::abs(h.times.back() - t0 - cut.T) <= 1e-9 * std::max(1.0, cut.T), ErrorKind::argument,
          "cutoff horizon T must equal the history length");
  const std::size_t m = h.times.size();
  std::vector<double> t(m), hs_vt(m), l2_vt(m), hs_ft(m), hs_v(m), l2_v(m), hs_f(m), weight(m);
  TruncationReport out;
  out.gamma = gamma;
  out.tau_c = cut.tau_c;
  for (std::size_t k = 0; k < m; ++k) {
    t[k] = h.times[k] - t0;
    const double chi = cut.chi(t[k]), dchi = cut.dchi(t[k]);
    std::vector<Vec> vt(h.v[k].size()), ft(h.v[k].size());
    for (std::size_t i = 0; i < vt.size(); ++i) {
      vt[i] = chi * h.v[k][i];
      ft[i] = dchi * h.v[k][i] + chi * h.f[k][i];
    }
    std::tie(hs_vt[k], l2_vt[k]) = measure_energy(vt, h.grid, h.dx, s, weight_rate);
    hs_ft[k] = measure_energy(ft, h.grid, h.dx, s, weight_rate).first;
    std::tie(hs_v[k], l2_v[k]) = measure_energy(h.v[k], h.grid, h.dx, s, weight_rate);
    hs_f[k] = measure_energy(h.f[k], h.grid, h.dx, s, weight_rate).first;
    weight[k] = std::exp(2.0 * gamma * (cut.T - t[k]));
    if (t[k] >= cut.tau_c && t[k] <= cut.T - cut.tau_c)
      for (std::size_t i = 0; i < vt.size(); ++i)
        out.plateau_defect = std::max(out.plateau_defect, (vt[i] - h.v[k][i]).cwiseAbs().maxCoeff());
  }
  const double T = cut.T, tau = cut.tau_c;
  std::vector<double> lhs(m), rhs(m), plateau(m);
  for (std::size_t k = 0; k < m; ++k) {
    lhs[k] = weight[k] * hs_vt[k];
    rhs[k] = weight[k] * (hs_ft[k] + l2_vt[k]);
    plateau[k] = weight[k] * hs_v[k];
  }
  out.gparcor_lhs = integrate(t, lhs, 0.0, T);
  out.gparcor_rhs = integrate(t, rhs, 0.0, T);
  out.C2 = ratio(out.gparcor_lhs, out.gparcor_rhs);
  out.tkey_lhs = integrate(t, plateau, tau, T - tau);
  out.tkey_holds = out.tkey_lhs <= out.C2 * out.gparcor_rhs * (1.0 + 1e-12) + 1e-300;
  out.C_front = ratio(integrate(t, hs_v, 0.0, tau), hs_v.front() + integrate(t, hs_f, 0.0, tau));
  out.C_tail =
      ratio(integrate(t, hs_v, T - tau, T), integrate(t, hs_v, T - 2.0 * tau, T - tau) + integrate(t, hs_f, T - 2.0 * tau, T));
  const double eta = -2.0 * gamma;
  std::vector<double> forcing(m);
  for (std::size_t k = 0; k < m; ++k) forcing[k] = std::exp(-eta * (T - t[k])) * (l2_v[k] + hs_f[k]);
  out.C_idamp = ratio(hs_v.back(), std::exp(-eta * T) * hs_v.front() + integrate(t, forcing, 0.0, T));
  out.pass = out.C2 <= C2_cap && out.tkey_holds && std::isfinite(out.C_front) && std::isfinite(out.C_tail) &&
             std::isfinite(out.C_idamp) && out.plateau_defect == 0.0;
  return out;
}

InitialData gaussian_data(Vec direction, double amplitude, double center, double width) {
  return [=](double x) -> Vec {
    const double z = (x - center) / width;
    return amplitude * std::exp(-0.5 * z * z) * direction;
  };
}

nlohmann::json to_json(const DampingFit& f) {
  nlohmann::json j = {{"feasible", f.feasible}, {"eta", f.eta}, {"C", f.C}, {"residual", f.residual},
                      {"samples", f.samples}};
  j["refutation_time"] = f.refutation_time ? nlohmann::json(*f.refutation_time) : nlohmann::json();
  return j;
}

nlohmann::json to_json(const TruncationReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"gamma", r.gamma},         {"tau_c", r.tau_c},           {"C2", num(r.C2)},
          {"gparcor_lhs", r.gparcor_lhs}, {"gparcor_rhs", r.gparcor_rhs}, {"tkey_lhs", r.tkey_lhs},
          {"tkey_holds", r.tkey_holds}, {"C_front", num(r.C_front)},  {"C_tail", num(r.C_tail)},
          {"C_idamp", num(r.C_idamp)},  {"plateau_defect", r.plateau_defect}, {"pass", r.pass}};
}

void write_trace_csv(const EnergyTrace& tr, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::argument, "cannot write trace CSV " + path.string());
  out.precision(12);
  out << "t,E,L2,F\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    out << tr.times[k] << ',' << tr.E[k] << ',' << tr.L2[k] << ',' << tr.F[k] << '\n';
}

}  // namespace relaxstab

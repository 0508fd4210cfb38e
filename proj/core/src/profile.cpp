#include "relaxstab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "relaxstab/error.hpp"

namespace relaxstab {

namespace {

std::vector<double> uniform_grid(double L, std::size_t nodes) {
  require(L > 0.0 && std::isfinite(L), ErrorKind::argument, "profile half-length L must be positive");
  require(nodes >= 5, ErrorKind::argument, "profile needs at least 5 nodes");
  std::vector<double> x(nodes);
  const double dx = 2.0 * L / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) x[i] = -L + dx * static_cast<double>(i);
  x.back() = L;
  return x;
}

nlohmann::json to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vec_from_json(const nlohmann::json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(data.data(), static_cast<Eigen::Index>(data.size()));
}

/// Right-hand side of the profile ODE w' = (A1(w) - s)^{-1} r(w).
struct ProfileField {
  const SystemSpec& sys;
  double s;

  Vec operator()(const Vec& w) const {
    const Mat a = sys.comoving_jacobian(w, s);
    Eigen::FullPivLU<Mat> lu(a);
    require(lu.isInvertible(), ErrorKind::model, "A1 - s Id is singular along the profile (noncharacteristic condition fails)");
    return lu.solve(sys.source(w));
  }

  Mat jacobian(const Vec& w) const {
    const int n = static_cast<int>(w.size());
    Mat j(n, n);
    for (int k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(w(k)));
      Vec wp = w, wm = w;
      wp(k) += h;
      wm(k) -= h;
      j.col(k) = ((*this)(wp) - (*this)(wm)) / (2.0 * h);
    }
    return j;
  }

  Vec rk4(const Vec& w, double h) const {
    const Vec k1 = (*this)(w);
    const Vec k2 = (*this)(w + 0.5 * h * k1);
    const Vec k3 = (*this)(w + 0.5 * h * k2);
    const Vec k4 = (*this)(w + h * k3);
    return w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

/// Slowest nonzero approach rate at a rest point: unstable rates at w-, stable at w+.
double rest_point_rate(const ProfileField& field, const Vec& w, bool unstable) {
  Eigen::EigenSolver<Mat> es(field.jacobian(w));
  double rate = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double re = es.eigenvalues()(i).real();
    if (std::abs(re) < 1e-7) continue;
    if ((re > 0.0) == unstable) rate = std::min(rate, std::abs(re));
  }
  return rate;
}

}  // namespace

WaveProfile constant_profile(const Vec& w0, double s, double L, std::size_t nodes) {
  WaveProfile p;
  p.grid = uniform_grid(L, nodes);
  p.values.assign(nodes, w0);
  p.derivs.assign(nodes, Vec::Zero(w0.size()));
  p.speed = s;
  p.w_minus = w0;
  p.w_plus = w0;
  p.decay_rate = std::numeric_limits<double>::infinity();
  return p;
}

WaveProfile solve_profile_jinxin(double a, double u_minus, double u_plus, double L, std::size_t nodes) {
  const double s = 0.5 * (u_minus + u_plus);
  require(a > std::max({std::abs(u_minus), std::abs(u_plus), std::abs(s)}), ErrorKind::model,
          "Jin-Xin parameters are not subcharacteristic: need a > max(|u-|, |u+|, |s|)");
  auto state = [](double u, double v) {
    Vec w(2);
    w << u, v;
    return w;
  };
  const double c0 = -0.5 * u_minus * u_plus;
  if (u_minus == u_plus) {
    WaveProfile p = constant_profile(state(u_minus, 0.5 * u_minus * u_minus), s, L, nodes);
    p.params = {{"a", a}, {"u_minus", u_minus}, {"u_plus", u_plus}};
    return p;
  }
  require(u_minus > u_plus, ErrorKind::model,
          "Jin-Xin/Burgers profile requires u- > u+ (Lax entropy condition)");
  const double delta = u_minus - u_plus;
  const double k = delta / (2.0 * (a * a - s * s));
  WaveProfile p;
  p.grid = uniform_grid(L, nodes);
  p.values.resize(nodes);
  p.derivs.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    // u = u+ + delta / (1 + e^{kx}), written to stay finite for large |kx|.
    const double z = k * p.grid[i];
    const double sig = z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
    const double u = u_plus + delta * sig;
    const double du = -k * delta * sig * (1.0 - sig);
    p.values[i] = state(u, s * u + c0);
    p.derivs[i] = state(du, s * du);
  }
  p.speed = s;
  p.w_minus = state(u_minus, s * u_minus + c0);
  p.w_plus = state(u_plus, s * u_plus + c0);
  p.decay_rate = k * delta;
  p.params = {{"a", a}, {"u_minus", u_minus}, {"u_plus", u_plus}};
  return p;
}

WaveProfile solve_profile_shooting(const SystemSpec& sys, const Vec& w_minus, const Vec& w_plus, double s,
                                   const ShootingOptions& opt) {
  require(w_minus.size() == sys.n && w_plus.size() == sys.n, ErrorKind::argument, "endstate dimension mismatch");
  require(sys.source(w_minus).norm() <= 1e-10 && sys.source(w_plus).norm() <= 1e-10, ErrorKind::model,
          "profile endstates must be equilibria (r(w±) = 0)");
  if ((w_minus - w_plus).norm() == 0.0) return constant_profile(w_minus, s, opt.L, opt.nodes);
  require(opt.phase_component >= 0 && opt.phase_component < sys.n, ErrorKind::argument,
          "phase component out of range");

  const ProfileField field{sys, s};
  const int k = opt.phase_component;
  const double target = opt.phase_value.value_or(0.5 * (w_minus(k) + w_plus(k)));

  Eigen::EigenSolver<Mat> es(field.jacobian(w_minus));
  int unstable = 0;
  double mu = 0.0;
  Vec dir;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i).real() > 1e-7) {
      ++unstable;
      mu = es.eigenvalues()(i).real();
      dir = es.eigenvectors().col(i).real().normalized();
    }
  }
  if (unstable != 1)
    fail(ErrorKind::convergence, "unstable manifold of w- has dimension " + std::to_string(unstable) +
                                     "; shooting supports a one-dimensional departure");

  const std::vector<double> grid = uniform_grid(opt.L, opt.nodes);
  const double dx = grid[1] - grid[0];
  const double h = dx / opt.substeps;
  double best_residual = std::numeric_limits<double>::infinity();

  for (double sign : {1.0, -1.0}) {
    const Vec start = w_minus + sign * opt.epsilon * dir;
    if ((start(k) - target) * (w_minus(k) - target) <= 0.0) continue;
    // Locate the phase crossing X* in the shooting coordinate.
    Vec w = start;
    double x = 0.0, crossing = -1.0;
    try {
      while (x < opt.max_length) {
        const Vec next = field.rk4(w, h);
        if (!next.allFinite() || next.norm() > 1e8) break;
        if ((next(k) - target) * (w(k) - target) <= 0.0) {
          double lo = 0.0, hi = h;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((field.rk4(w, mid)(k) - target) * (w(k) - target) > 0.0) lo = mid; else hi = mid;
          }
          crossing = x + 0.5 * (lo + hi);
          break;
        }
        w = next;
        x += h;
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::evaluation && e.kind() != ErrorKind::model) throw;
    }
    if (crossing < 0.0) continue;

    // Re-integrate onto the grid: node x_i sits at shooting coordinate crossing + x_i.
    WaveProfile p;
    p.grid = grid;
    p.values.resize(grid.size());
    p.derivs.resize(grid.size());
    w = start;
    x = 0.0;
    bool ok = true;
    try {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double xt = crossing + grid[i];
        if (xt <= 0.0) {
          p.values[i] = w_minus + sign * opt.epsilon * std::exp(mu * xt) * dir;
        } else {
          const int m = std::max(1, static_cast<int>(std::ceil((xt - x) / h)));
          const double hs = (xt - x) / m;
          for (int j = 0; j < m; ++j) w = field.rk4(w, hs);
          x = xt;
          p.values[i] = w;
        }
        p.derivs[i] = field(p.values[i]);
      }
      // Confirm the connection by continuing past +L.
      double residual = (w - w_plus).norm();
      while (residual > opt.tol && x < opt.max_length) {
        const Vec next = field.rk4(w, h);
        if (!next.allFinite() || next.norm() > 1e8) break;
        if ((next - w).norm() < 1e-15 * h) break;
        w = next;
        x += h;
        residual = (w - w_plus).norm();
      }
      best_residual = std::min(best_residual, residual);
      ok = residual <= opt.tol;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::evaluation && e.kind() != ErrorKind::model) throw;
      ok = false;
    }
    if (!ok) continue;

    p.speed = s;
    p.w_minus = w_minus;
    p.w_plus = w_plus;
    p.decay_rate = std::min(rest_point_rate(field, w_minus, true), rest_point_rate(field, w_plus, false));
    p.params = {{"method", "shooting"}, {"phase_component", k}, {"phase_value", target}};
    return p;
  }
  std::ostringstream msg;
  msg << "no connection from w- to w+ at speed " << s << " (best endstate residual " << best_residual << ")";
  fail(ErrorKind::convergence, msg.str());
}

ProfileSampler::ProfileSampler(const WaveProfile& profile) : profile_(&profile) {
  std::vector<double> col(profile.size());
  for (int c = 0; c < profile.dim(); ++c) {
    for (std::size_t i = 0; i < profile.size(); ++i) col[i] = profile.values[i](c);
    values_.emplace_back(profile.grid, col);
    for (std::size_t i = 0; i < profile.size(); ++i) col[i] = profile.derivs[i](c);
    derivs_.emplace_back(profile.grid, col);
  }
}

std::pair<Vec, Vec> ProfileSampler::operator()(double x) const {
  require(std::isfinite(x), ErrorKind::argument, "sample point must be finite");
  const int n = profile_->dim();
  if (x < profile_->grid.front()) return {profile_->w_minus, Vec::Zero(n)};
  if (x > profile_->grid.back()) return {profile_->w_plus, Vec::Zero(n)};
  Vec w(n), dw(n);
  for (int c = 0; c < n; ++c) {
    w(c) = values_[c](x);
    dw(c) = derivs_[c](x);
  }
  return {w, dw};
}

std::pair<Vec, Vec> sample_profile(const WaveProfile& profile, double x) { return ProfileSampler(profile)(x); }

double profile_residual(const SystemSpec& sys, const WaveProfile& profile) {
  double worst = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const Vec res = sys.comoving_jacobian(profile.values[i], profile.speed) * profile.derivs[i] - sys.source(profile.values[i]);
    worst = std::max(worst, res.norm());
  }
  return worst;
}

double fit_decay_rate(const WaveProfile& profile) {
  if (profile.is_constant()) return std::numeric_limits<double>::infinity();
  auto fit = [&](bool right) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      const double x = profile.grid[i];
      if ((x > 0.0) != right) continue;
      const double dev = (profile.values[i] - (right ? profile.w_plus : profile.w_minus)).norm();
      if (dev < 1e-12 || dev > 1e-2) continue;
      const double y = std::log(dev);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++m;
    }
    if (m < 3) return std::numeric_limits<double>::quiet_NaN();
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return std::abs(slope);
  };
  const double l = fit(false), r = fit(true);
  if (std::isnan(l)) return r;
  if (std::isnan(r)) return l;
  return std::min(l, r);
}

double suggested_half_length(const WaveProfile& profile, double tol_end) {
  if (!(profile.decay_rate > 0.0) || !std::isfinite(profile.decay_rate)) return profile.half_length();
  const double amplitude = std::max(1.0, (profile.w_minus - profile.w_plus).norm());
  return std::log(amplitude / tol_end) / profile.decay_rate;
}

void write_profile(const WaveProfile& profile, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  require(static_cast<bool>(out), ErrorKind::argument, "cannot write profile CSV " + csv_path.string());
  const int n = profile.dim();
  out << "x";
  for (int c = 1; c <= n; ++c) out << ",w_" << c;
  for (int c = 1; c <= n; ++c) out << ",dw_" << c;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out << profile.grid[i];
    for (int c = 0; c < n; ++c) out << ',' << profile.values[i](c);
    for (int c = 0; c < n; ++c) out << ',' << profile.derivs[i](c);
    out << '\n';
  }
  nlohmann::json side = {{"speed", profile.speed},
                         {"w_minus", to_json(profile.w_minus)},
                         {"w_plus", to_json(profile.w_plus)},
                         {"decay_rate", std::isfinite(profile.decay_rate) ? nlohmann::json(profile.decay_rate) : nlohmann::json()},
                         {"params", profile.params}};
  std::ofstream js(std::filesystem::path(csv_path).replace_extension(".json"));
  js << side.dump(2) << '\n';
}

WaveProfile read_profile(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  require(static_cast<bool>(in), ErrorKind::argument, "cannot read profile CSV " + csv_path.string());
  std::ifstream js(std::filesystem::path(csv_path).replace_extension(".json"));
  require(static_cast<bool>(js), ErrorKind::argument, "missing JSON sidecar for " + csv_path.string());
  const auto side = nlohmann::json::parse(js);
  WaveProfile p;
  p.speed = side.at("speed").get<double>();
  p.w_minus = vec_from_json(side.at("w_minus"));
  p.w_plus = vec_from_json(side.at("w_plus"));
  p.decay_rate = side.at("decay_rate").is_null() ? std::numeric_limits<double>::infinity() : side.at("decay_rate").get<double>();
  p.params = side.value("params", nlohmann::json::object());
  const int n = p.dim();
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(static_cast<int>(row.size()) == 1 + 2 * n, ErrorKind::argument, "profile CSV row has wrong width");
    p.grid.push_back(row[0]);
    p.values.push_back(Eigen::Map<Vec>(row.data() + 1, n));
    p.derivs.push_back(Eigen::Map<Vec>(row.data() + 1 + n, n));
  }
  require(p.grid.size() >= 5, ErrorKind::argument, "profile CSV has too few rows");
  return p;
}

}  // namespace relaxstab

#include "relaxstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "relaxstab/error.hpp"

namespace relaxstab {

namespace {

std::string describe(const Vec& eta) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < eta.size(); ++i) os << (i ? ", " : "") << eta(i);
  os << ')';
  return os.str();
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

EigenDecomposition checked_eigen(const CMat& t, const Vec& eta) {
  EigenDecomposition ed = eigen_decompose(t);
  require(ed.values.allFinite() && ed.vectors.allFinite(), ErrorKind::numeric,
          "eigensolver failed for eta = " + describe(eta));
  return ed;
}

/// Symmetric matrices X with X A_j symmetric for all j, as an orthonormal (Frobenius) basis.
std::vector<Mat> symmetrizer_space(const std::vector<Mat>& a) {
  const int n = static_cast<int>(a.front().rows());
  std::vector<Mat> sym;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = e(j, i) = i == j ? 1.0 : std::numbers::sqrt2 / 2.0;
      sym.push_back(e);
    }
  const int m = static_cast<int>(sym.size());
  Mat c(static_cast<Eigen::Index>(a.size()) * n * n, m);
  for (int k = 0; k < m; ++k) {
    Eigen::Index row = 0;
    for (const Mat& aj : a) {
      const Mat comm = sym[k] * aj - aj.transpose() * sym[k];
      for (Eigen::Index q = 0; q < comm.size(); ++q) c(row++, k) = comm.data()[q];
    }
  }
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
  const double scale = std::max(1.0, svd.singularValues().size() ? svd.singularValues()(0) : 0.0);
  std::vector<Mat> basis;
  for (int k = 0; k < m; ++k) {
    const double sv = k < svd.singularValues().size() ? svd.singularValues()(k) : 0.0;
    if (sv > 1e-10 * scale) continue;
    Mat x = Mat::Zero(n, n);
    for (int q = 0; q < m; ++q) x += svd.matrixV()(q, k) * sym[q];
    basis.push_back(x);
  }
  return basis;
}

/// Downhill simplex minimization; returns the best point found.
Vec nelder_mead(const std::function<double(const Vec&)>& f, Vec x0, double step, int max_iter) {
  const Eigen::Index k = x0.size();
  std::vector<Vec> p(k + 1, x0);
  std::vector<double> fv(k + 1);
  for (Eigen::Index i = 0; i < k; ++i) p[i + 1](i) += step;
  for (Eigen::Index i = 0; i <= k; ++i) fv[i] = f(p[i]);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Eigen::Index> order(k + 1);
    for (Eigen::Index i = 0; i <= k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return fv[l] < fv[r]; });
    std::vector<Vec> ps;
    std::vector<double> fs;
    for (auto i : order) {
      ps.push_back(p[i]);
      fs.push_back(fv[i]);
    }
    p = ps;
    fv = fs;
    if (fv[k] - fv[0] < 1e-15 && (p[k] - p[0]).norm() < 1e-12) break;
    Vec centroid = Vec::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i) centroid += p[i];
    centroid /= static_cast<double>(k);
    const Vec xr = centroid + (centroid - p[k]);
    const double fr = f(xr);
    if (fr < fv[0]) {
      const Vec xe = centroid + 2.0 * (centroid - p[k]);
      const double fe = f(xe);
      if (fe < fr) { p[k] = xe; fv[k] = fe; } else { p[k] = xr; fv[k] = fr; }
    } else if (fr < fv[k - 1]) {
      p[k] = xr;
      fv[k] = fr;
    } else {
      const Vec xc = centroid + 0.5 * (p[k] - centroid);
      const double fc = f(xc);
      if (fc < fv[k]) {
        p[k] = xc;
        fv[k] = fc;
      } else {
        for (Eigen::Index i = 1; i <= k; ++i) {
          p[i] = p[0] + 0.5 * (p[i] - p[0]);
          fv[i] = f(p[i]);
        }
      }
    }
  }
  return p[std::min_element(fv.begin(), fv.end()) - fv.begin()];
}

double max_eig_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eig_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

SymbolMatrix assemble_symbol(const SystemSpec& sys, const Vec& w, const Vec& eta) {
  require(eta.size() == sys.d, ErrorKind::argument, "eta must have one entry per space dimension");
  require(eta.allFinite(), ErrorKind::argument, "eta must be finite");
  Mat t = Mat::Zero(sys.n, sys.n);
  for (int j = 0; j < sys.d; ++j)
    if (eta(j) != 0.0) t += eta(j) * sys.jacobian(w, j);
  return {w, eta, t};
}

CMat generator_symbol(const SystemSpec& sys, const Vec& w0, const Vec& eta) {
  return -I_unit * assemble_symbol(sys, w0, eta).matrix.cast<cplx>() + sys.relaxation_jacobian(w0).cast<cplx>();
}

NoncharacteristicResult check_noncharacteristic(const SystemSpec& sys, const WaveProfile& profile, double delta) {
  require(!profile.grid.empty(), ErrorKind::argument, "noncharacteristic check needs a nonempty profile grid");
  NoncharacteristicResult out;
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double sv = min_singular_value(sys.comoving_jacobian(profile.values[i], profile.speed).cast<cplx>());
    if (sv < out.margin) {
      out.margin = sv;
      out.worst_x = profile.grid[i];
    }
  }
  out.pass = out.margin >= delta;
  return out;
}

HyperbolicityResult check_hyperbolicity(const SystemSpec& sys, const Vec& w, const std::vector<Vec>& eta_samples,
                                        const HypothesisTolerances& tol) {
  require(!eta_samples.empty(), ErrorKind::argument, "hyperbolicity check needs eta samples");
  HyperbolicityResult out;
  out.worst_eta = eta_samples.front();
  for (const Vec& eta : eta_samples) {
    require(std::abs(eta.norm() - 1.0) < 1e-10, ErrorKind::argument, "eta samples must be unit vectors");
    const Mat t = assemble_symbol(sys, w, eta).matrix;
    const EigenDecomposition ed = checked_eigen(t.cast<cplx>(), eta);
    const double scale = std::max(1.0, t.norm());
    const double imag = ed.values.imag().cwiseAbs().maxCoeff();
    const double cond = condition_number(ed.vectors);
    const bool ok = imag <= tol.imag_tol * scale && cond < tol.cond_cap;
    if (imag / scale > out.worst_imag || cond > out.worst_cond || (!ok && out.pass)) out.worst_eta = eta;
    out.worst_imag = std::max(out.worst_imag, imag / scale);
    out.worst_cond = std::max(out.worst_cond, cond);
    out.pass = out.pass && ok;
  }
  return out;
}

GeometricResult check_geometric_regularity(const SystemSpec& sys, const Vec& w, const std::vector<Vec>& sphere_path,
                                           const HypothesisTolerances& tol) {
  require(!sphere_path.empty(), ErrorKind::argument, "geometric regularity check needs a path");
  GeometricResult out;
  const int n = sys.n;
  CVec prev;
  double prev_sep = 0.0;
  bool in_flag = false;
  for (std::size_t p = 0; p < sphere_path.size(); ++p) {
    const Vec& eta = sphere_path[p];
    const Mat t = assemble_symbol(sys, w, eta).matrix;
    const EigenDecomposition ed = checked_eigen(t.cast<cplx>(), eta);
    const double scale = std::max(1.0, t.norm());

    // Projector norm of branch i: |r_i| |l_i| with l_i the i-th row of V^{-1}.
    std::vector<double> proj(n, std::numeric_limits<double>::infinity());
    if (condition_number(ed.vectors) < tol.cond_cap) {
      const CMat vinv = ed.vectors.inverse();
      for (int i = 0; i < n; ++i) proj[i] = ed.vectors.col(i).norm() * vinv.row(i).norm();
    }

    // Nearest-match continuation from the previous point.
    CVec cur = ed.values;
    if (p > 0 && sys.d > 1) {
      std::vector<int> perm(n, -1);
      std::vector<bool> used(n, false);
      double jump = 0.0;
      for (int i = 0; i < n; ++i) {
        int best = -1;
        for (int k = 0; k < n; ++k)
          if (!used[k] && (best < 0 || std::abs(cur(k) - prev(i)) < std::abs(cur(best) - prev(i)))) best = k;
        used[best] = true;
        perm[i] = best;
        jump = std::max(jump, std::abs(cur(best) - prev(i)));
      }
      CVec matched(n);
      std::vector<double> pm(n);
      for (int i = 0; i < n; ++i) {
        matched(i) = cur(perm[i]);
        pm[i] = proj[perm[i]];
      }
      cur = matched;
      proj = pm;
      double sep_now = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) sep_now = std::min(sep_now, std::abs(cur(i) - cur(k)));
      if (prev_sep > tol.sep_tol * scale && sep_now > tol.sep_tol * scale && jump > 0.5 * std::min(prev_sep, sep_now))
        fail(ErrorKind::geometric, "eigenvalue matching is ambiguous near eta = " + describe(eta) +
                                       "; refine the sphere path");
    }

    double sep = std::numeric_limits<double>::infinity();
    double pnorm = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        const double d = std::abs(cur(i) - cur(k));
        if (d < sep) sep = d;
        if (d < tol.sep_tol * scale) pnorm = std::max({pnorm, proj[i], proj[k]});
      }
    if (sep < tol.sep_tol * scale) {
      if (pnorm > tol.projector_cap) {
        if (!in_flag) {
          out.flags.push_back({p, eta, sep, pnorm});
        } else if (sep < out.flags.back().separation) {
          out.flags.back() = {p, eta, sep, pnorm};
        }
        in_flag = true;
      } else {
        ++out.benign_crossings;
        in_flag = false;
      }
    } else {
      in_flag = false;
    }
    prev = cur;
    prev_sep = sep;
  }
  out.pass = out.flags.empty();
  return out;
}

ChfResult check_chf(const SystemSpec& sys, const Vec& w0, double eta_min, const std::vector<Vec>& eta_grid,
                    double theta_req) {
  require(sys.is_equilibrium(w0), ErrorKind::argument, "chf check requires an equilibrium state (r(w0) = 0)");
  ChfResult out;
  out.theta_req = theta_req;
  std::vector<std::pair<double, double>> samples;
  for (const Vec& eta : eta_grid) {
    const double r = eta.norm();
    if (r < eta_min) continue;
    const EigenDecomposition ed = checked_eigen(generator_symbol(sys, w0, eta), eta);
    samples.emplace_back(r, ed.values.real().maxCoeff());
  }
  require(!samples.empty(), ErrorKind::argument, "no eta grid point satisfies |eta| >= eta_min");
  std::sort(samples.begin(), samples.end());
  for (const auto& [r, re] : samples) {
    if (!out.radial_profile.empty() && std::abs(out.radial_profile.back().first - r) <= 1e-9 * r)
      out.radial_profile.back().second = std::max(out.radial_profile.back().second, re);
    else
      out.radial_profile.emplace_back(r, re);
  }
  double suffix = -std::numeric_limits<double>::infinity();
  out.eta_threshold = std::numeric_limits<double>::infinity();
  for (auto it = out.radial_profile.rbegin(); it != out.radial_profile.rend(); ++it) {
    suffix = std::max(suffix, it->second);
    if (-suffix >= theta_req) out.eta_threshold = it->first;
  }
  out.theta = -suffix;
  out.pass = out.theta >= theta_req;
  return out;
}

KawashimaResult check_kawashima(const SystemSpec& sys, const Vec& w0, const std::vector<Vec>& eta_samples,
                                const HypothesisTolerances& tol) {
  require(sys.is_equilibrium(w0), ErrorKind::argument, "Kawashima check requires an equilibrium state (r(w0) = 0)");
  require(!eta_samples.empty(), ErrorKind::argument, "Kawashima check needs eta samples");
  KawashimaResult out;
  const Mat b = sys.relaxation_jacobian(w0);
  const CMat bc = b.cast<cplx>();
  out.worst_coupling = std::numeric_limits<double>::infinity();
  for (const Vec& eta : eta_samples) {
    const Mat t = assemble_symbol(sys, w0, eta).matrix;
    const EigenDecomposition ed = checked_eigen(t.cast<cplx>(), eta);
    require(condition_number(ed.vectors) < tol.cond_cap, ErrorKind::numeric,
            "defective eigenvector basis for eta = " + describe(eta));
    const double scale = std::max(1.0, t.norm());
    std::vector<bool> done(sys.n, false);
    for (int i = 0; i < sys.n; ++i) {
      if (done[i]) continue;
      std::vector<int> cluster;
      for (int k = i; k < sys.n; ++k)
        if (!done[k] && std::abs(ed.values(k) - ed.values(i)) < tol.sep_tol * scale) {
          cluster.push_back(k);
          done[k] = true;
        }
      CMat v(sys.n, static_cast<Eigen::Index>(cluster.size()));
      for (std::size_t c = 0; c < cluster.size(); ++c) v.col(c) = ed.vectors.col(cluster[c]);
      const double coupling = min_singular_value(bc * orthonormalize(v));
      if (coupling < out.worst_coupling) {
        out.worst_coupling = coupling;
        out.worst_eta = eta;
      }
    }
  }
  out.genuine_coupling = out.worst_coupling > tol.coupling_tol;

  std::vector<Mat> a;
  for (int j = 0; j < sys.d; ++j) a.push_back(sys.jacobian(w0, j));
  const double bnorm = std::max(b.norm(), 1e-300);
  auto defect_of = [&](const Mat& x) {
    const Mat xs = x / x.norm();
    return max_eig_sym(xs * b) / bnorm;
  };
  if (sys.symmetrizer) {
    const Mat x = sys.symmetrizer(w0);
    bool sym_ok = min_eig_sym(x) > 0.0 && (x - x.transpose()).norm() <= 1e-10 * x.norm();
    for (const Mat& aj : a) sym_ok = sym_ok && ((x * aj) - (x * aj).transpose()).norm() <= 1e-8 * x.norm() * aj.norm();
    out.symmetrizer = x;
    out.dissipation_defect = sym_ok ? std::max(0.0, defect_of(x)) : std::numeric_limits<double>::infinity();
  } else {
    const std::vector<Mat> basis = symmetrizer_space(a);
    out.dissipation_defect = std::numeric_limits<double>::infinity();
    if (!basis.empty()) {
      const auto k = static_cast<Eigen::Index>(basis.size());
      auto assemble = [&](const Vec& c) {
        Mat x = Mat::Zero(sys.n, sys.n);
        for (Eigen::Index i = 0; i < k; ++i) x += c(i) * basis[i];
        return x;
      };
      auto objective = [&](const Vec& c) {
        const Mat x = assemble(c);
        const double nx = x.norm();
        if (!(nx > 0.0)) return 10.0;
        const double lmin = min_eig_sym(x / nx);
        if (lmin <= 1e-6) return 1.0 + (1e-6 - lmin);
        return defect_of(x);
      };
      std::vector<Vec> starts;
      Vec proj_identity(k);
      for (Eigen::Index i = 0; i < k; ++i) proj_identity(i) = basis[i].trace();
      starts.push_back(proj_identity);
      for (Eigen::Index i = 0; i < k; ++i) {
        starts.push_back(Vec::Unit(k, i));
        starts.push_back(-Vec::Unit(k, i));
      }
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& s0 : starts) {
        if (!(s0.norm() > 0.0)) continue;
        const Vec c = nelder_mead(objective, s0 / s0.norm(), 0.25, 4000);
        const double val = objective(c);
        if (val < best) {
          best = val;
          out.symmetrizer = assemble(c) / assemble(c).norm();
        }
      }
      out.dissipation_defect = best;
    }
  }
  out.symmetric_dissipative = out.dissipation_defect <= 1e-9;
  out.pass = out.genuine_coupling && out.symmetric_dissipative;
  return out;
}

std::vector<Vec> unit_directions(int d, std::size_t count) {
  require(d >= 1, ErrorKind::argument, "dimension must be positive");
  std::vector<Vec> out;
  if (d == 1) {
    out.push_back(Vec::Constant(1, 1.0));
    out.push_back(Vec::Constant(1, -1.0));
    return out;
  }
  require(count >= 1, ErrorKind::argument, "direction count must be positive");
  if (d == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      Vec e(2);
      e << std::cos(phi), std::sin(phi);
      out.push_back(e);
    }
    return out;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double rho = std::sqrt(1.0 - z * z);
    Vec e = Vec::Zero(d);
    e(0) = rho * std::cos(golden * static_cast<double>(i));
    e(1) = rho * std::sin(golden * static_cast<double>(i));
    e(2) = z;
    out.push_back(e);
  }
  return out;
}

std::vector<Vec> half_loop(int d, std::size_t count) {
  if (d == 1) return unit_directions(1, 2);
  require(count >= 3, ErrorKind::argument, "half loop needs at least 3 points");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double phi = std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1);
    Vec e = Vec::Zero(d);
    e(0) = std::cos(phi);
    e(1) = std::sin(phi);
    out.push_back(e);
  }
  return out;
}

std::vector<Vec> ray_grid(const std::vector<Vec>& directions, double r_min, double r_max, std::size_t radii) {
  require(r_min > 0.0 && r_max >= r_min && radii >= 1, ErrorKind::argument, "invalid ray grid radii");
  std::vector<Vec> out;
  for (std::size_t k = 0; k < radii; ++k) {
    const double t = radii == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(radii - 1);
    const double r = r_min * std::pow(r_max / r_min, t);
    for (const Vec& e : directions) out.push_back(r * e);
  }
  return out;
}

nlohmann::json to_json(const HypothesisReport& r) {
  nlohmann::json flags = nlohmann::json::array();
  for (const auto& f : r.a3.flags)
    flags.push_back({{"index", f.index}, {"eta", vec_json(f.eta)}, {"separation", f.separation},
                     {"projector_norm", finite_or_null(f.projector_norm)}});
  return {
      {"a1", {{"pass", r.a1.pass}, {"margin", r.a1.margin}, {"worst_x", r.a1.worst_x}}},
      {"a2", {{"pass", r.a2.pass}, {"worst_imag", r.a2.worst_imag}, {"worst_cond", finite_or_null(r.a2.worst_cond)}}},
      {"a3", {{"pass", r.a3.pass}, {"flags", flags}, {"benign_crossings", r.a3.benign_crossings}}},
      {"chf",
       {{"pass", r.chf.pass}, {"theta", r.chf.theta}, {"theta_req", r.chf.theta_req},
        {"eta_threshold", finite_or_null(r.chf.eta_threshold)}}},
      {"kawashima",
       {{"pass", r.kawashima.pass}, {"genuine_coupling", r.kawashima.genuine_coupling},
        {"worst_coupling", finite_or_null(r.kawashima.worst_coupling)},
        {"symmetric_dissipative", r.kawashima.symmetric_dissipative},
        {"dissipation_defect", finite_or_null(r.kawashima.dissipation_defect)}}},
      {"pass", r.pass()},
  };
}

}  // namespace relaxstab

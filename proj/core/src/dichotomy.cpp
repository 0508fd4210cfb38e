#include "relaxstab/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "relaxstab/error.hpp"

namespace relaxstab {

namespace {

/// Closest orthonormal matrix with the same span, Q (Q*Q)^{-1/2}; smooth in Q.
CMat polar_orthonormalize(const CMat& q) {
  if (q.cols() == 0) return q;
  Eigen::SelfAdjointEigenSolver<CMat> es(q.adjoint() * q);
  const Vec ev = es.eigenvalues();
  require(ev.minCoeff() > 0.0, ErrorKind::numeric, "frame collapsed during continuous orthonormalization");
  const CMat inv_sqrt = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().cast<cplx>().asDiagonal() *
                        es.eigenvectors().adjoint();
  return q * inv_sqrt;
}

CMat frame_rhs(const CMat& g, const CMat& q) { return g * q - q * (q.adjoint() * (g * q)); }

/// One RK4 step of Q' = (I - QQ*) G Q with signed step h, G at start, midpoint and end.
CMat frame_step(const CMat& q, const CMat& g0, const CMat& gm, const CMat& g1, double h) {
  const CMat k1 = frame_rhs(g0, q);
  const CMat k2 = frame_rhs(gm, q + 0.5 * h * k1);
  const CMat k3 = frame_rhs(gm, q + 0.5 * h * k2);
  const CMat k4 = frame_rhs(g1, q + h * k3);
  return polar_orthonormalize(q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

double max_generator_norm(const ResolventField& f) {
  double m = std::max(spectral_norm(f.G_minus), spectral_norm(f.G_plus));
  for (std::size_t i = 0; i < f.size(); i += std::max<std::size_t>(1, f.size() / 64)) m = std::max(m, spectral_norm(f.G[i]));
  return m;
}

/// Window length in nodes: factor / gap, capped so |G| * width <= 30.
std::size_t window_nodes(const ResolventField& f, double gap, double factor) {
  double width = factor / std::max(gap, 1e-12);
  width = std::min(width, 30.0 / std::max(max_generator_norm(f), 1e-12));
  width = std::min(width, f.grid.back() - f.grid.front());
  return std::max<std::size_t>(1, static_cast<std::size_t>(width / f.h));
}

double min_pairwise_gap(const CVec& mu) {
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < mu.size(); ++a)
    for (Eigen::Index b = a + 1; b < mu.size(); ++b) m = std::min(m, std::abs(mu(a) - mu(b)));
  return m;
}

}  // namespace

SpectralSplit limit_spectral_split(const CMat& g_inf, double gap_tol) {
  const int n = static_cast<int>(g_inf.rows());
  const EigenDecomposition ed = eigen_decompose(g_inf);
  SpectralSplit out;
  out.gap = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> s, u;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = ed.values(i).real();
    out.gap = std::min(out.gap, std::abs(re));
    (re < 0.0 ? s : u).push_back(i);
  }
  if (out.gap < gap_tol)
    fail(ErrorKind::center_spectrum, "limiting matrix has spectrum within " + std::to_string(gap_tol) +
                                         " of the imaginary axis (min |Re mu| = " + std::to_string(out.gap) + ")");
  auto pick = [&](const std::vector<Eigen::Index>& idx, CMat& basis, CVec& values) {
    CMat cols(n, static_cast<Eigen::Index>(idx.size()));
    values.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      cols.col(static_cast<Eigen::Index>(c)) = ed.vectors.col(idx[c]);
      values(static_cast<Eigen::Index>(c)) = ed.values(idx[c]);
    }
    basis = idx.empty() ? CMat(n, 0) : orthonormalize(cols);
  };
  pick(s, out.stable, out.stable_values);
  pick(u, out.unstable, out.unstable_values);
  CVec mask = CVec::Zero(n);
  for (auto i : s) mask(i) = 1.0;
  out.stable_projector = ed.vectors * mask.asDiagonal() * ed.vectors.inverse();
  return out;
}

CMat propagator(const ResolventField& field, std::size_t from, std::size_t to) {
  require(from < field.size() && to < field.size(), ErrorKind::argument, "propagator node out of range");
  const int n = field.dim();
  CMat phi = CMat::Identity(n, n);
  auto rhs = [](const CMat& g, const CMat& p) { return CMat(g * p); };
  const double h = field.h;
  if (to >= from) {
    for (std::size_t i = from; i < to; ++i) {
      const CMat k1 = rhs(field.G[i], phi);
      const CMat k2 = rhs(field.G_mid[i], phi + 0.5 * h * k1);
      const CMat k3 = rhs(field.G_mid[i], phi + 0.5 * h * k2);
      const CMat k4 = rhs(field.G[i + 1], phi + h * k3);
      phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  } else {
    for (std::size_t i = from; i > to; --i) {
      const CMat k1 = rhs(field.G[i], phi);
      const CMat k2 = rhs(field.G_mid[i - 1], phi - 0.5 * h * k1);
      const CMat k3 = rhs(field.G_mid[i - 1], phi - 0.5 * h * k2);
      const CMat k4 = rhs(field.G[i - 1], phi - h * k3);
      phi -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return phi;
}

DichotomyData propagate_subspaces(const ResolventField& field, const DichotomyOptions& opt) {
  const int n = field.dim();
  const std::size_t N = field.size();
  require(N >= 5, ErrorKind::argument, "dichotomy needs at least five grid nodes");
  const SpectralSplit right = limit_spectral_split(field.G_plus, opt.gap_tol);
  const SpectralSplit left = limit_spectral_split(field.G_minus, opt.gap_tol);
  DichotomyData out;
  out.grid = field.grid;
  out.j = right.rank_stable();
  out.k = left.rank_unstable();
  if (out.j + out.k != n)
    fail(ErrorKind::center_spectrum, "stable dimension at +L (" + std::to_string(out.j) +
                                         ") and unstable dimension at -L (" + std::to_string(out.k) +
                                         ") do not add up to n: no dichotomy on the whole line");
  out.endstate_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < right.stable_values.size(); ++i)
    out.endstate_gap = std::min(out.endstate_gap, -right.stable_values(i).real());
  for (Eigen::Index i = 0; i < left.unstable_values.size(); ++i)
    out.endstate_gap = std::min(out.endstate_gap, left.unstable_values(i).real());

  std::vector<CMat> qs(N), qu(N);
  qs[N - 1] = right.stable;
  for (std::size_t i = N - 1; i > 0; --i)
    qs[i - 1] = out.j ? frame_step(qs[i], field.G[i], field.G_mid[i - 1], field.G[i - 1], -field.h) : qs[i];
  qu[0] = left.unstable;
  for (std::size_t i = 0; i + 1 < N; ++i)
    qu[i + 1] = out.k ? frame_step(qu[i], field.G[i], field.G_mid[i], field.G[i + 1], field.h) : qu[i];

  out.frame.resize(N);
  out.P_plus.resize(N);
  out.P_minus.resize(N);
  out.min_frame_singular_value = std::numeric_limits<double>::infinity();
  CVec mask = CVec::Zero(n);
  mask.head(out.j).setOnes();
  for (std::size_t i = 0; i < N; ++i) {
    CMat t(n, n);
    t << qs[i], qu[i];
    out.frame[i] = t;
    const double smin = min_singular_value(t);
    out.min_frame_singular_value = std::min(out.min_frame_singular_value, smin);
    if (smin < opt.angle_tol)
      fail(ErrorKind::conditioning, "stable and unstable subspaces nearly intersect at x = " +
                                        std::to_string(field.grid[i]) + " (lambda close to an eigenvalue)");
    out.P_plus[i] = t * mask.asDiagonal() * t.inverse();
    out.P_minus[i] = CMat::Identity(n, n) - out.P_plus[i];
  }

  // Decay fit over random node pairs at most one window apart, per family; the dichotomy
  // rate is the slower of the two.
  const std::size_t win = window_nodes(field, out.endstate_gap, opt.window_factor);
  auto rng = make_rng(opt.seed, 0x0d1c);
  std::uniform_int_distribution<std::size_t> node(0, N - 1), offset(1, win);
  std::vector<double> dist[2], logn[2];
  for (std::size_t s = 0; s < opt.fit_samples; ++s) {
    const std::size_t a = node(rng);
    const std::size_t m = offset(rng);
    if (out.j && a + m < N) {
      dist[0].push_back(m * field.h);
      logn[0].push_back(std::log(std::max(spectral_norm(propagator(field, a, a + m) * out.P_plus[a]), 1e-300)));
    }
    if (out.k && a >= m) {
      dist[1].push_back(m * field.h);
      logn[1].push_back(std::log(std::max(spectral_norm(propagator(field, a, a - m) * out.P_minus[a]), 1e-300)));
    }
  }
  out.theta = std::numeric_limits<double>::infinity();
  for (int fam = 0; fam < 2; ++fam) {
    const auto& x = dist[fam];
    const auto& y = logn[fam];
    if (x.size() < 2) continue;
    const double cnt = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    const double denom = cnt * sxx - sx * sx;
    if (denom > 0) out.theta = std::min(out.theta, -(cnt * sxy - sx * sy) / denom);
  }
  if (!std::isfinite(out.theta)) out.theta = out.endstate_gap;
  double logc = 0.0;
  for (int fam = 0; fam < 2; ++fam)
    for (std::size_t i = 0; i < dist[fam].size(); ++i) logc = std::max(logc, logn[fam][i] + out.theta * dist[fam][i]);
  out.C = std::exp(logc);
  return out;
}

DichotomyCheck verify_dichotomy(const DichotomyData& data, const ResolventField& field, std::size_t pairs, double tol,
                                std::uint64_t seed, double decay_slack) {
  require(data.size() == field.size(), ErrorKind::argument, "dichotomy data and field grids differ");
  const std::size_t N = field.size();
  const std::size_t win = window_nodes(field, data.endstate_gap, 1.0);
  auto rng = make_rng(seed, 0xd1c4);
  std::uniform_int_distribution<std::size_t> node(0, N - 1), offset(1, win);
  std::bernoulli_distribution forward(0.5);
  DichotomyCheck out;
  while (out.pairs < pairs) {
    const std::size_t a = node(rng);
    const std::size_t m = offset(rng);
    const bool fwd = forward(rng);
    if (fwd ? a + m >= N : a < m) continue;
    const std::size_t b = fwd ? a + m : a - m;
    const CMat S = propagator(field, a, b);
    const double ns = spectral_norm(S);
    out.worst_commutator =
        std::max(out.worst_commutator, spectral_norm(data.P_plus[b] * S - S * data.P_plus[a]) / std::max(ns, 1e-300));
    const double bound = data.C * std::exp(-data.theta * m * field.h);
    const double decayed = spectral_norm(S * (fwd ? data.P_plus[a] : data.P_minus[a]));
    const bool relevant = fwd ? data.j > 0 : data.k > 0;
    if (relevant) out.worst_decay_excess = std::max(out.worst_decay_excess, decayed / bound);
    ++out.pairs;
  }
  out.pass = out.worst_commutator <= tol && out.worst_decay_excess <= decay_slack &&
             data.theta * decay_slack >= data.endstate_gap;
  return out;
}

BlockDiagonal block_diagonalize(const ResolventField& field, const DichotomyData& data, double cond_cap) {
  const std::size_t N = data.size();
  const int j = data.j, n = data.dim();
  BlockDiagonal out;
  out.frame_derivative = differentiate4(data.frame, field.h);
  out.lambda_plus.resize(N);
  out.lambda_minus.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const CMat& t = data.frame[i];
    const double cond = condition_number(t);
    out.worst_frame_condition = std::max(out.worst_frame_condition, cond);
    if (!(cond <= cond_cap))
      fail(ErrorKind::conditioning,
           "dichotomy frame condition " + std::to_string(cond) + " exceeds cap at x = " + std::to_string(data.grid[i]));
    const CMat tinv = t.inverse();
    const CMat lam = tinv * field.G[i] * t - tinv * out.frame_derivative[i];
    out.lambda_plus[i] = lam.topLeftCorner(j, j);
    out.lambda_minus[i] = lam.bottomRightCorner(n - j, n - j);
    double off = 0.0;
    if (j > 0 && j < n)
      off = std::max(spectral_norm(lam.topRightCorner(j, n - j)), spectral_norm(lam.bottomLeftCorner(n - j, j)));
    out.residual = std::max(out.residual, off / std::max(1.0, spectral_norm(lam)));
  }
  return out;
}

TurningPointReport detect_turning_points(const std::function<CMat(double)>& symbol, const std::vector<double>& x_grid,
                                         const TurningPointOptions& opt) {
  TurningPointReport out;
  const std::size_t m = x_grid.size();
  if (m < 3) return out;
  auto separation = [&](double x) { return min_pairwise_gap(eigen_decompose(symbol(x)).values); };
  std::vector<double> sep(m);
  for (std::size_t i = 0; i < m; ++i) sep[i] = separation(x_grid[i]);
  if (!std::isfinite(sep[0])) return out;  // scalar symbol
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (!(sep[i] <= sep[i - 1] && sep[i] < sep[i + 1])) continue;
    double a = x_grid[i - 1], b = x_grid[i + 1];
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = separation(c), fd = separation(d);
    for (int it = 0; it < 80 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = separation(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = separation(d);
      }
    }
    TurningPoint tp;
    tp.x = fc < fd ? c : d;
    tp.separation = std::min({fc, fd, sep[i]});
    if (sep[i] <= tp.separation) tp.x = x_grid[i];
    tp.condition = condition_number(eigen_decompose(symbol(tp.x)).vectors);
    const bool close = tp.separation < opt.gap_tol;
    const bool skewed = tp.condition > opt.cond_cap;
    if (close && skewed)
      out.locations.push_back(tp);
    else if (close || skewed)
      out.warnings.push_back(tp);
  }
  return out;
}

TurningPointReport detect_turning_points(const SystemSpec& sys, const WaveProfile& profile, const Vec& ray,
                                         const std::vector<double>& x_grid, const TurningPointOptions& opt) {
  require(ray.size() == sys.d, ErrorKind::argument, "turning-point ray must hold (eta_2, .., eta_d, tau)");
  const ProfileSampler sampler(profile);
  const int n = sys.n;
  auto symbol = [&](double x) -> CMat {
    const Vec w = sampler(x).first;
    const Mat a1 = sys.comoving_jacobian(w, profile.speed);
    CMat m = I_unit * ray(sys.d - 1) * CMat::Identity(n, n);
    for (int j = 1; j < sys.d; ++j) m += I_unit * ray(j - 1) * sys.jacobian(w, j).cast<cplx>();
    return -a1.cast<cplx>().inverse() * m;
  };
  TurningPointReport out = detect_turning_points(symbol, x_grid, opt);
  out.ray = ray;
  return out;
}

nlohmann::json to_json(const DichotomyCheck& check, const DichotomyData& data) {
  return {{"j", data.j},
          {"k", data.k},
          {"C", data.C},
          {"theta", data.theta},
          {"endstate_gap", data.endstate_gap},
          {"min_frame_singular_value", data.min_frame_singular_value},
          {"pairs", check.pairs},
          {"worst_commutator", check.worst_commutator},
          {"worst_decay_excess", check.worst_decay_excess},
          {"pass", check.pass}};
}

nlohmann::json to_json(const TurningPointReport& report) {
  auto list = [](const std::vector<TurningPoint>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& t : v) a.push_back({{"x", t.x}, {"separation", t.separation}, {"condition", t.condition}});
    return a;
  };
  std::vector<double> ray(report.ray.data(), report.ray.data() + report.ray.size());
  return {{"ray", ray}, {"locations", list(report.locations)}, {"warnings", list(report.warnings)}};
}

}  // namespace relaxstab

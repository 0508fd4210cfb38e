#include "relaxstab/resolvent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/QR>

#include "relaxstab/dichotomy.hpp"
#include "relaxstab/error.hpp"
#include "relaxstab/parallel.hpp"

namespace relaxstab {

namespace {

struct Stencil {
  std::array<std::size_t, 4> idx{};
  std::array<double, 4> w{};
  int count = 0;
};

/// Weights of midpoint4 for the midpoint of interval i on n nodes.
Stencil midpoint_stencil(std::size_t n, std::size_t i) {
  Stencil s;
  auto set = [&](std::initializer_list<std::pair<std::size_t, double>> items) {
    for (const auto& [k, w] : items) {
      s.idx[s.count] = k;
      s.w[s.count] = w;
      ++s.count;
    }
  };
  if (n < 4) {
    set({{i, 0.5}, {i + 1, 0.5}});
  } else if (i == 0) {
    set({{0, 5.0 / 16}, {1, 15.0 / 16}, {2, -5.0 / 16}, {3, 1.0 / 16}});
  } else if (i + 2 >= n) {
    set({{n - 4, 1.0 / 16}, {n - 3, -5.0 / 16}, {n - 2, 15.0 / 16}, {n - 1, 5.0 / 16}});
  } else {
    set({{i - 1, -1.0 / 16}, {i, 9.0 / 16}, {i + 1, 9.0 / 16}, {i + 2, -1.0 / 16}});
  }
  return s;
}

CVec midpoint_value(const GridFunction& f, std::size_t i) {
  const Stencil st = midpoint_stencil(f.size(), i);
  CVec out = CVec::Zero(f[i].size());
  for (int q = 0; q < st.count; ++q) out += st.w[q] * f[st.idx[q]];
  return out;
}

/// Orthonormal basis of the orthogonal complement of span(basis).
CMat complement(const CMat& basis, int n) {
  if (basis.cols() == 0) return CMat::Identity(n, n);
  Eigen::HouseholderQR<CMat> qr(basis);
  const CMat q = qr.householderQ() * CMat::Identity(n, n);
  return q.rightCols(n - basis.cols());
}

double spectral_radius_bound(const CMat& m) { return spectral_norm(m); }

}  // namespace

double FrequencyPoint::weight_frequency() const { return std::sqrt(eta.squaredNorm() + tau() * tau()); }

double FrequencyPoint::magnitude() const { return std::sqrt(eta.squaredNorm() + std::norm(lambda)); }

FrozenPerturbation gaussian_perturbation(Vec direction, double amplitude, double center, double width) {
  return [=](double x) -> Vec {
    const double z = (x - center) / width;
    return amplitude * std::exp(-0.5 * z * z) * direction;
  };
}

ResolventField assemble_G(const SystemSpec& sys, const WaveProfile& profile, const FrequencyPoint& fp,
                          const ResolventGrid& grid, const FrozenPerturbation& v) {
  const int n = sys.n;
  require(fp.eta.size() == sys.d - 1, ErrorKind::argument, "transverse frequency must have d - 1 entries");
  require(fp.eta.allFinite() && std::isfinite(fp.lambda.real()) && std::isfinite(fp.lambda.imag()),
          ErrorKind::argument, "frequency point must be finite");
  require(grid.L > 0.0, ErrorKind::argument, "resolvent half-length must be positive");
  const ProfileSampler sampler(profile);
  const double s = profile.speed;

  auto generator = [&](const Vec& wbar, const Vec& dw, const Vec& pert, Mat* a1inv_out, double x) {
    const Vec w = wbar + pert;
    const Mat a1 = sys.comoving_jacobian(w, s);
    Eigen::FullPivLU<Mat> lu(a1);
    if (!lu.isInvertible())
      fail(ErrorKind::model, "A1 - s Id is singular at x = " + std::to_string(x) + "; the resolvent ODE is undefined");
    const Mat a1inv = lu.inverse();
    CMat m = fp.lambda * CMat::Identity(n, n) + sys.zero_order(wbar, dw).cast<cplx>();
    for (int j = 1; j < sys.d; ++j) m += I_unit * fp.eta(j - 1) * sys.jacobian(w, j).cast<cplx>();
    if (a1inv_out) *a1inv_out = a1inv;
    return CMat(-a1inv.cast<cplx>() * m);
  };

  ResolventField out;
  out.fp = fp;
  const Vec zero = Vec::Zero(n);
  out.G_minus = generator(profile.w_minus, zero, zero, nullptr, -std::numeric_limits<double>::infinity());
  out.G_plus = generator(profile.w_plus, zero, zero, nullptr, std::numeric_limits<double>::infinity());

  const double rate = std::max({1.0, spectral_radius_bound(out.G_minus), spectral_radius_bound(out.G_plus)});
  double h = std::min(grid.h_max, grid.cells_per_unit_rate / rate);
  std::size_t nodes = static_cast<std::size_t>(std::ceil(2.0 * grid.L / h)) + 1;
  nodes = std::clamp<std::size_t>(nodes, 5, grid.max_nodes);
  h = 2.0 * grid.L / static_cast<double>(nodes - 1);
  out.h = h;
  out.grid.resize(nodes);
  out.G.resize(nodes);
  out.A1inv.resize(nodes);
  out.G_mid.resize(nodes - 1);
  out.A1inv_mid.resize(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    const double x = i + 1 == nodes ? grid.L : -grid.L + h * static_cast<double>(i);
    out.grid[i] = x;
    const auto [w, dw] = sampler(x);
    out.G[i] = generator(w, dw, v ? v(x) : zero, &out.A1inv[i], x);
    if (i + 1 < nodes) {
      const double xm = x + 0.5 * h;
      const auto [wm, dwm] = sampler(xm);
      out.G_mid[i] = generator(wm, dwm, v ? v(xm) : zero, &out.A1inv_mid[i], xm);
    }
  }
  return out;
}

ResolventField weight_conjugate(const ResolventField& field, double a) {
  ResolventField out = field;
  const CMat shift = a * CMat::Identity(field.dim(), field.dim());
  for (auto& g : out.G) g += shift;
  for (auto& g : out.G_mid) g += shift;
  out.G_minus += shift;
  out.G_plus += shift;
  out.weight_rate += a;
  return out;
}

// ---------------------------------------------------------------- solver

ResolventSolver::ResolventSolver(const ResolventField& field, double gap_tol) : field_(&field), n_(field.dim()) {
  const SpectralSplit left = limit_spectral_split(field.G_minus, gap_tol);
  const SpectralSplit right = limit_spectral_split(field.G_plus, gap_tol);
  k_minus_ = left.rank_stable();
  j_plus_ = right.rank_unstable();
  if (k_minus_ + j_plus_ != n_)
    fail(ErrorKind::center_spectrum, "Morse indices of the limiting matrices differ (stable dimension " +
                                         std::to_string(k_minus_) + " at -L, " + std::to_string(right.rank_stable()) +
                                         " at +L): the frequency lies in the essential spectrum");
  const CMat bc_left = complement(left.unstable, n_).adjoint();   // k_minus rows
  const CMat bc_right = complement(right.stable, n_).adjoint();   // j_plus rows

  const std::size_t N = field.size();
  const int size = static_cast<int>(N) * n_;
  const int kl = k_minus_ + n_ - 1, ku = 2 * n_ - 1;
  matrix_ = std::make_unique<BandedMatrix>(size, kl, ku);
  auto& m = *matrix_;
  for (int r = 0; r < k_minus_; ++r)
    for (int c = 0; c < n_; ++c) m.set(r, c, bc_left(r, c));
  const double h = field.h;
  const CMat id = CMat::Identity(n_, n_);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const CMat& gi = field.G[i];
    const CMat& gn = field.G[i + 1];
    const CMat& gm = field.G_mid[i];
    const CMat cl = -id - (h / 6.0) * gi - (2.0 * h / 3.0) * gm * (0.5 * id + (h / 8.0) * gi);
    const CMat cr = id - (h / 6.0) * gn - (2.0 * h / 3.0) * gm * (0.5 * id - (h / 8.0) * gn);
    const int row0 = k_minus_ + static_cast<int>(i) * n_;
    const int col0 = static_cast<int>(i) * n_;
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) {
        m.set(row0 + r, col0 + c, cl(r, c));
        m.set(row0 + r, col0 + n_ + c, cr(r, c));
      }
  }
  const int row_last = k_minus_ + static_cast<int>(N - 1) * n_;
  const int col_last = static_cast<int>(N - 1) * n_;
  for (int r = 0; r < j_plus_; ++r)
    for (int c = 0; c < n_; ++c) m.set(row_last + r, col_last + c, bc_right(r, c));
  m.factorize();
}

CVec ResolventSolver::forcing_rows(const GridFunction& f) const {
  const ResolventField& fld = *field_;
  const std::size_t N = fld.size();
  require(f.size() == N, ErrorKind::argument, "forcing must be sampled on the field grid");
  const double h = fld.h;
  CVec rhs = CVec::Zero(static_cast<Eigen::Index>(N) * n_);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const CVec gi = fld.A1inv[i].cast<cplx>() * f[i];
    const CVec gn = fld.A1inv[i + 1].cast<cplx>() * f[i + 1];
    const CVec gm = fld.A1inv_mid[i].cast<cplx>() * midpoint_value(f, i);
    rhs.segment(k_minus_ + static_cast<Eigen::Index>(i) * n_, n_) =
        (h / 6.0) * (gi + gn) + (2.0 * h / 3.0) * ((h / 8.0) * fld.G_mid[i] * (gi - gn) + gm);
  }
  return rhs;
}

GridFunction ResolventSolver::solve(const GridFunction& f) const {
  const CVec x = matrix_->solve(forcing_rows(f));
  GridFunction v(field_->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.segment(static_cast<Eigen::Index>(i) * n_, n_);
  return v;
}

GridFunction ResolventSolver::adjoint(const GridFunction& v) const {
  const ResolventField& fld = *field_;
  const std::size_t N = fld.size();
  require(v.size() == N, ErrorKind::argument, "adjoint input must be sampled on the field grid");
  CVec flat(static_cast<Eigen::Index>(N) * n_);
  for (std::size_t i = 0; i < N; ++i) flat.segment(static_cast<Eigen::Index>(i) * n_, n_) = v[i];
  const CVec z = matrix_->solve(flat, true);
  const double h = fld.h;
  GridFunction f(N, CVec::Zero(n_));
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const CVec r = z.segment(k_minus_ + static_cast<Eigen::Index>(i) * n_, n_);
    const CVec gr = (h * h / 12.0) * fld.G_mid[i].adjoint() * r;
    f[i] += fld.A1inv[i].transpose().cast<cplx>() * ((h / 6.0) * r + gr);
    f[i + 1] += fld.A1inv[i + 1].transpose().cast<cplx>() * ((h / 6.0) * r - gr);
    const CVec mid = (2.0 * h / 3.0) * (fld.A1inv_mid[i].transpose().cast<cplx>() * r);
    const Stencil st = midpoint_stencil(N, i);
    for (int q = 0; q < st.count; ++q) f[st.idx[q]] += st.w[q] * mid;
  }
  return f;
}

double ResolventSolver::residual(const GridFunction& f, const GridFunction& v) const {
  const ResolventField& fld = *field_;
  const double h = fld.h;
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < fld.size(); ++i) {
    const CVec gi = fld.A1inv[i].cast<cplx>() * f[i];
    const CVec gn = fld.A1inv[i + 1].cast<cplx>() * f[i + 1];
    const CVec gm = fld.A1inv_mid[i].cast<cplx>() * midpoint_value(f, i);
    const CVec fi = fld.G[i] * v[i] + gi;
    const CVec fn = fld.G[i + 1] * v[i + 1] + gn;
    const CVec vm = 0.5 * (v[i] + v[i + 1]) + (h / 8.0) * (fi - fn);
    const CVec fm = fld.G_mid[i] * vm + gm;
    const CVec defect = (v[i + 1] - v[i] - (h / 6.0) * (fi + 4.0 * fm + fn)) / h;
    sum += h * defect.squaredNorm();
  }
  return std::sqrt(sum);
}

GridFunction solve_resolvent_bvp(const ResolventField& field, const GridFunction& f) {
  return ResolventSolver(field).solve(f);
}

// ---------------------------------------------------------------- norms

double l2_norm(const GridFunction& f, double h) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = f[i].squaredNorm();
  return std::sqrt(trapezoid(sq, h));
}

double sobolev_norm(const GridFunction& f, double h, int s) {
  require(s >= 0 && s <= 3, ErrorKind::argument, "Sobolev order must be an integer in [0, 3]");
  double total = l2_norm(f, h);
  total *= total;
  GridFunction d = f;
  for (int k = 1; k <= s; ++k) {
    d = differentiate4(d, h);
    const double nk = l2_norm(d, h);
    total += nk * nk;
  }
  return std::sqrt(total);
}

double hat_norm(const GridFunction& f, double h, int s, double freq) {
  return sobolev_norm(f, h, s) + std::pow(1.0 + freq, s) * l2_norm(f, h);
}

// ---------------------------------------------------------------- gains

std::vector<ForcingResponse> sample_responses(const ResolventSolver& solver, const GainOptions& opt, std::uint64_t seed,
                                              std::uint64_t stream) {
  require(opt.trials >= 1, ErrorKind::argument, "at least one forcing trial is required");
  const ResolventField& fld = solver.field();
  const int n = fld.dim();
  const double h = fld.h;
  const double L = fld.grid.back();
  const double freq = fld.fp.weight_frequency();
  auto rng = make_rng(seed, stream);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const double k_max =
      std::min(std::numbers::pi / (8.0 * h), 1.0 + 2.0 * std::max(spectral_norm(fld.G_minus), spectral_norm(fld.G_plus)));

  auto respond = [&](const GridFunction& f, bool refined) {
    const GridFunction v = solver.solve(f);
    ForcingResponse r;
    r.f_hat = hat_norm(f, h, opt.s, freq);
    r.f_l2 = l2_norm(f, h);
    r.v_hat = hat_norm(v, h, opt.s, freq);
    r.v_l2 = l2_norm(v, h);
    r.v_h1 = sobolev_norm(v, h, 1);
    r.refined = refined;
    return std::pair{r, v};
  };

  std::vector<ForcingResponse> out;
  GridFunction best_f;
  double best_gain = -1.0;
  for (int t = 0; t < opt.trials; ++t) {
    const int bumps = 1 + static_cast<int>(unit(rng) * 3.0) % 3;
    std::vector<CVec> coef;
    std::vector<double> center, width, wave;
    for (int b = 0; b < bumps; ++b) {
      CVec c(n);
      for (int q = 0; q < n; ++q) c(q) = cplx(normal(rng), normal(rng));
      coef.push_back(c);
      center.push_back((unit(rng) - 0.5) * L);
      width.push_back(0.5 + 2.5 * unit(rng));
      wave.push_back((2.0 * unit(rng) - 1.0) * k_max);
    }
    GridFunction f(fld.size(), CVec::Zero(n));
    for (std::size_t i = 0; i < fld.size(); ++i) {
      const double x = fld.grid[i];
      for (int b = 0; b < bumps; ++b) {
        const double z = (x - center[b]) / width[b];
        f[i] += std::exp(-0.5 * z * z) * std::exp(I_unit * (wave[b] * x)) * coef[b];
      }
    }
    auto [r, v] = respond(f, false);
    out.push_back(r);
    if (r.v_l2 / r.f_l2 > best_gain) {
      best_gain = r.v_l2 / r.f_l2;
      best_f = f;
    }
  }
  GridFunction f = best_f;
  for (int it = 0; it < opt.power_iterations; ++it) {
    GridFunction g = solver.adjoint(solver.solve(f));
    const double norm = l2_norm(g, h);
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    for (auto& gi : g) gi /= norm;
    f = std::move(g);
    out.push_back(respond(f, true).first);
  }
  return out;
}

double estimate_resolvent_gain(const std::vector<ForcingResponse>& responses) {
  double g = 0.0;
  for (const auto& r : responses) g = std::max(g, r.v_hat / r.f_hat);
  return g;
}

DampingCheck verify_pdamp(const std::vector<ForcingResponse>& responses, const FrequencyPoint& fp, double C,
                          double gamma_star) {
  require(fp.gamma() > gamma_star, ErrorKind::argument, "pdamp requires Re lambda > gamma_*");
  DampingCheck out;
  for (const auto& r : responses)
    out.worst_ratio = std::max(out.worst_ratio, r.v_hat * (fp.gamma() - gamma_star) / (r.f_hat + r.v_l2));
  out.pass = out.worst_ratio <= C;
  return out;
}

DampingCheck verify_hfres(const std::vector<ForcingResponse>& responses, const FrequencyPoint& fp, double C,
                          double gamma_star) {
  require(fp.gamma() > gamma_star, ErrorKind::argument, "hfres requires Re lambda > gamma_*");
  DampingCheck out;
  for (const auto& r : responses) out.worst_ratio = std::max(out.worst_ratio, r.v_hat * (fp.gamma() - gamma_star) / r.f_hat);
  out.pass = out.worst_ratio <= C;
  return out;
}

// ---------------------------------------------------------------- sweep

EquivalenceReport verify_equivalence(const SystemSpec& sys, const WaveProfile& profile,
                                     const std::vector<FrequencyPoint>& grid, const SweepOptions& opt,
                                     const FrozenPerturbation& v) {
  require(!grid.empty(), ErrorKind::argument, "frequency grid is empty");
  for (const auto& fp : grid)
    require(fp.gamma() > opt.gamma_star, ErrorKind::argument, "every grid point needs Re lambda > gamma_*");
  EquivalenceReport rep;
  rep.gamma_star = opt.gamma_star;
  rep.points.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t idx) {
    SweepPoint& pt = rep.points[idx];
    pt.fp = grid[idx];
    try {
      ResolventField field = assemble_G(sys, profile, pt.fp, opt.grid, v);
      if (opt.weight_rate != 0.0) field = weight_conjugate(field, opt.weight_rate);
      const ResolventSolver solver(field, opt.gap_tol);
      const auto responses = sample_responses(solver, opt.gain, opt.seed, idx);
      pt.gain = estimate_resolvent_gain(responses);
      pt.pdamp_ratio = verify_pdamp(responses, pt.fp, std::numeric_limits<double>::infinity(), opt.gamma_star).worst_ratio;
      pt.hfres_ratio = verify_hfres(responses, pt.fp, std::numeric_limits<double>::infinity(), opt.gamma_star).worst_ratio;
      for (const auto& r : responses) {
        pt.absorption = std::max(pt.absorption, r.v_l2 / (r.v_h1 + r.f_l2));
        pt.apriori_ratio = std::max(pt.apriori_ratio, r.v_hat / r.v_l2);
        pt.l2_gain = std::max(pt.l2_gain, r.v_l2 / r.f_l2);
      }
      // Residual of one representative solve.
      GridFunction f(field.size(), CVec::Zero(field.dim()));
      for (std::size_t i = 0; i < field.size(); ++i) f[i].setConstant(std::exp(-0.5 * field.grid[i] * field.grid[i]));
      pt.residual = solver.residual(f, solver.solve(f));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::center_spectrum) throw;
      pt.singular = true;
      pt.singular_reason = e.what();
    }
  });

  double max_ratio = 0.0;
  for (const auto& pt : rep.points)
    if (!pt.singular) max_ratio = std::max(max_ratio, pt.pdamp_ratio);
  rep.C_fitted = !opt.C.has_value();
  rep.C = opt.C.value_or(opt.fit_safety * max_ratio);

  for (const auto& pt : rep.points) {
    if (pt.singular) continue;
    const double margin = pt.fp.gamma() - opt.gamma_star;
    if (!(rep.C * pt.absorption < margin))
      rep.bounded_hfres_constant = std::max(rep.bounded_hfres_constant, pt.apriori_ratio * pt.l2_gain * margin);
  }
  std::vector<double> lx, ly;
  for (auto& pt : rep.points) {
    if (pt.singular) {
      ++rep.singular_count;
      continue;
    }
    ++rep.nonsingular_count;
    const double margin = pt.fp.gamma() - opt.gamma_star;
    pt.pdamp_pass = pt.pdamp_ratio <= rep.C;
    pt.absorbable = rep.C * pt.absorption < margin;
    if (pt.absorbable) {
      const double c_abs = rep.C * (1.0 + pt.absorption) * margin / (margin - rep.C * pt.absorption);
      pt.hfres_pass = pt.hfres_ratio <= c_abs;
    } else {
      pt.hfres_pass = pt.hfres_ratio <= rep.bounded_hfres_constant * (1.0 + 1e-12);
    }
    if (pt.pdamp_pass == pt.hfres_pass) ++rep.agree_count;
    rep.max_residual = std::max(rep.max_residual, pt.residual);
    if (std::abs(pt.fp.lambda) >= opt.large_threshold) {
      lx.push_back(std::log(std::abs(pt.fp.lambda)));
      ly.push_back(std::log(pt.absorption));
      rep.hfres_constant = std::max(rep.hfres_constant, pt.hfres_ratio);
    }
  }
  rep.agreement = rep.nonsingular_count ? static_cast<double>(rep.agree_count) / rep.nonsingular_count : 0.0;
  if (lx.size() >= 2) {
    const double m = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sy += ly[i];
      sxx += lx[i] * lx[i];
      sxy += lx[i] * ly[i];
    }
    rep.absorption_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  } else {
    rep.absorption_exponent = std::numeric_limits<double>::quiet_NaN();
    rep.warnings.push_back("fewer than two non-singular points above the large-frequency threshold");
  }
  if (rep.singular_count)
    rep.warnings.push_back(std::to_string(rep.singular_count) + " grid points lie on the singular set and were excluded");
  return rep;
}

std::vector<FrequencyPoint> frequency_grid(const std::vector<double>& gammas, double r_min, double r_max,
                                           std::size_t radii, const Vec& eta) {
  require(r_min > 0.0 && r_max >= r_min && radii >= 1, ErrorKind::argument, "invalid frequency radii");
  std::vector<FrequencyPoint> out;
  for (std::size_t k = 0; k < radii; ++k) {
    const double t = radii == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(radii - 1);
    const double r = r_min * std::pow(r_max / r_min, t);
    for (double g : gammas) {
      if (r < std::abs(g)) continue;
      const double tau = std::sqrt(r * r - g * g);
      out.push_back({eta, cplx(g, tau)});
      if (tau > 0.0) out.push_back({eta, cplx(g, -tau)});
    }
  }
  return out;
}

nlohmann::json to_json(const EquivalenceReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  std::size_t pdamp_pass = 0, hfres_pass = 0, absorbable = 0;
  for (const auto& p : r.points) {
    pdamp_pass += p.pdamp_pass;
    hfres_pass += p.hfres_pass;
    absorbable += p.absorbable;
  }
  return {{"points", r.points.size()},
          {"singular", r.singular_count},
          {"nonsingular", r.nonsingular_count},
          {"agreement", r.agreement},
          {"pdamp_pass", pdamp_pass},
          {"hfres_pass", hfres_pass},
          {"absorbable", absorbable},
          {"C", num(r.C)},
          {"C_fitted", r.C_fitted},
          {"gamma_star", r.gamma_star},
          {"hfres_constant", num(r.hfres_constant)},
          {"bounded_hfres_constant", num(r.bounded_hfres_constant)},
          {"absorption_exponent", num(r.absorption_exponent)},
          {"max_residual", num(r.max_residual)},
          {"estimator", "max over randomized smooth forcings plus L2 power iteration (lower bound)"},
          {"warnings", r.warnings}};
}

void write_sweep_csv(const EquivalenceReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::argument, "cannot write sweep CSV " + path.string());
  out.precision(12);
  const Eigen::Index m = r.points.empty() ? 0 : r.points.front().fp.eta.size();
  out << "re_lambda,im_lambda";
  for (Eigen::Index j = 0; j < m; ++j) out << ",eta_" << j + 2;
  out << ",gain,pdamp_ratio,hfres_ratio,absorption,singular,pdamp_pass,hfres_pass\n";
  for (const auto& p : r.points) {
    out << p.fp.gamma() << ',' << p.fp.tau();
    for (Eigen::Index j = 0; j < m; ++j) out << ',' << p.fp.eta(j);
    out << ',' << p.gain << ',' << p.pdamp_ratio << ',' << p.hfres_ratio << ',' << p.absorption << ','
        << p.singular << ',' << p.pdamp_pass << ',' << p.hfres_pass << '\n';
  }
}

}  // namespace relaxstab

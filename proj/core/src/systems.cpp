#include "relaxstab/systems.hpp"

#include <cmath>
#include <utility>

#include "relaxstab/error.hpp"

namespace relaxstab {

// ---------------------------------------------------------------- SystemSpec

Mat SystemSpec::jacobian(const Vec& w, int j) const {
  require(j >= 0 && j < d, ErrorKind::argument, "flux direction index out of range");
  Mat a = flux_jac(w, j);
  require(a.rows() == n && a.cols() == n, ErrorKind::evaluation,
          "flux Jacobian A_" + std::to_string(j + 1) + " has wrong shape");
  require(a.allFinite(), ErrorKind::evaluation,
          "flux Jacobian A_" + std::to_string(j + 1) + " has non-finite entries");
  return a;
}

Mat SystemSpec::comoving_jacobian(const Vec& w, double s) const {
  return jacobian(w, 0) - s * Mat::Identity(n, n);
}

Mat SystemSpec::relaxation_jacobian(const Vec& w) const {
  Mat b = relax_jac(w);
  require(b.rows() == n && b.cols() == n && b.allFinite(), ErrorKind::evaluation,
          "relaxation Jacobian dr/dw is malformed or non-finite");
  return b;
}

Vec SystemSpec::source(const Vec& w) const {
  Vec r = relax(w);
  require(r.size() == n && r.allFinite(), ErrorKind::evaluation, "relaxation source r(w) is non-finite");
  return r;
}

bool SystemSpec::is_equilibrium(const Vec& w, double tol) const {
  if (equilibria) return equilibria(w);
  return source(w).norm() <= tol;
}

Mat SystemSpec::jacobian_derivative(const Vec& w, const Vec& dir, int j) const {
  const double scale = dir.norm();
  if (scale == 0.0) return Mat::Zero(n, n);
  const double h = 1e-5 * (1.0 + w.norm()) / scale;
  return (jacobian(w + h * dir, j) - jacobian(w - h * dir, j)) / (2.0 * h);
}

Mat SystemSpec::zero_order(const Vec& w, const Vec& wx) const {
  return -relaxation_jacobian(w) + jacobian_derivative(w, wx, 0);
}

// ---------------------------------------------------------------- built-ins

ScalarFlux burgers_flux() {
  return {[](double u) { return 0.5 * u * u; }, [](double u) { return u; }};
}

SystemSpec jin_xin(double a, int d, ScalarFlux f, ScalarFlux g) {
  require(a > 0.0, ErrorKind::argument, "Jin-Xin characteristic speed a must be positive");
  require(d == 1 || d == 2, ErrorKind::argument, "Jin-Xin is provided for d = 1 or 2");
  SystemSpec sys;
  sys.name = "jin-xin";
  sys.d = d;
  sys.n = d + 1;
  const double a2 = a * a;
  const int n = sys.n;
  sys.flux = [=](const Vec& w, int j) {
    Vec out = Vec::Zero(n);
    out(0) = w(1 + j);
    out(1 + j) = a2 * w(0);
    return out;
  };
  sys.flux_jac = [=](const Vec&, int j) {
    Mat m = Mat::Zero(n, n);
    m(0, 1 + j) = 1.0;
    m(1 + j, 0) = a2;
    return m;
  };
  sys.relax = [=](const Vec& w) {
    Vec r = Vec::Zero(n);
    r(1) = f.value(w(0)) - w(1);
    if (n == 3) r(2) = g.value(w(0)) - w(2);
    return r;
  };
  sys.relax_jac = [=](const Vec& w) {
    Mat m = Mat::Zero(n, n);
    m(1, 0) = f.slope(w(0));
    m(1, 1) = -1.0;
    if (n == 3) {
      m(2, 0) = g.slope(w(0));
      m(2, 2) = -1.0;
    }
    return m;
  };
  return sys;
}

SystemSpec saint_venant(double froude, int d) {
  require(froude > 0.0, ErrorKind::argument, "Froude number must be positive");
  require(d == 1 || d == 2, ErrorKind::argument, "Saint-Venant is provided for d = 1 or 2");
  SystemSpec sys;
  sys.name = "saint-venant";
  sys.d = d;
  sys.n = d + 1;
  const double k = 1.0 / (froude * froude);
  const int n = sys.n;
  auto unpack = [n](const Vec& w) {
    const double h = w(0), q = w(1), p = n == 3 ? w(2) : 0.0;
    require(h > 0.0, ErrorKind::evaluation, "Saint-Venant depth must stay positive");
    return std::tuple{h, q, p};
  };
  sys.flux = [=](const Vec& w, int j) {
    auto [h, q, p] = unpack(w);
    Vec out(n);
    if (j == 0) {
      out(0) = q;
      out(1) = q * q / h + 0.5 * k * h * h;
      if (n == 3) out(2) = q * p / h;
    } else {
      out(0) = p;
      out(1) = q * p / h;
      out(2) = p * p / h + 0.5 * k * h * h;
    }
    return out;
  };
  sys.flux_jac = [=](const Vec& w, int j) {
    auto [h, q, p] = unpack(w);
    const double u = q / h, v = p / h;
    Mat m = Mat::Zero(n, n);
    if (j == 0) {
      m(0, 1) = 1.0;
      m(1, 0) = -u * u + k * h;
      m(1, 1) = 2.0 * u;
      if (n == 3) {
        m(2, 0) = -u * v;
        m(2, 1) = v;
        m(2, 2) = u;
      }
    } else {
      m(0, 2) = 1.0;
      m(1, 0) = -u * v;
      m(1, 1) = v;
      m(1, 2) = u;
      m(2, 0) = -v * v + k * h;
      m(2, 2) = 2.0 * v;
    }
    return m;
  };
  sys.relax = [=](const Vec& w) {
    auto [h, q, p] = unpack(w);
    const double mag = std::sqrt(q * q + p * p);
    Vec r = Vec::Zero(n);
    r(1) = h - q * mag / (h * h);
    if (n == 3) r(2) = -p * mag / (h * h);
    return r;
  };
  sys.relax_jac = [=](const Vec& w) {
    auto [h, q, p] = unpack(w);
    const double mag = std::sqrt(q * q + p * p);
    const double h2 = h * h, h3 = h2 * h;
    Mat m = Mat::Zero(n, n);
    m(1, 0) = 1.0 + 2.0 * q * mag / h3;
    m(1, 1) = mag > 0.0 ? -(mag + q * q / mag) / h2 : 0.0;
    if (n == 3) {
      m(1, 2) = mag > 0.0 ? -q * p / (mag * h2) : 0.0;
      m(2, 0) = 2.0 * p * mag / h3;
      m(2, 1) = mag > 0.0 ? -q * p / (mag * h2) : 0.0;
      m(2, 2) = mag > 0.0 ? -(mag + p * p / mag) / h2 : 0.0;
    }
    return m;
  };
  return sys;
}

SystemSpec linear_system(std::string name, std::vector<Mat> flux_matrices, Mat relaxation) {
  require(!flux_matrices.empty(), ErrorKind::argument, "linear system needs at least one flux matrix");
  const int n = static_cast<int>(relaxation.rows());
  for (const auto& a : flux_matrices)
    require(a.rows() == n && a.cols() == n, ErrorKind::argument, "flux matrix shape mismatch");
  SystemSpec sys;
  sys.name = std::move(name);
  sys.n = n;
  sys.d = static_cast<int>(flux_matrices.size());
  sys.flux = [flux_matrices](const Vec& w, int j) -> Vec { return flux_matrices[j] * w; };
  sys.flux_jac = [flux_matrices](const Vec&, int j) { return flux_matrices[j]; };
  sys.relax = [relaxation](const Vec& w) -> Vec { return relaxation * w; };
  sys.relax_jac = [relaxation](const Vec&) { return relaxation; };
  return sys;
}

namespace {

Mat matrix_from_json(const nlohmann::json& j, const std::string& field) {
  require(j.is_array() && !j.empty(), ErrorKind::usage, "field '" + field + "' must be a nested array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    require(j.at(r).is_array() && static_cast<Eigen::Index>(j.at(r).size()) == cols, ErrorKind::usage,
            "field '" + field + "' is not rectangular");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
  }
  return m;
}

}  // namespace

SystemSpec make_system(const std::string& name, const nlohmann::json& params) {
  if (name == "jin-xin") {
    require(params.contains("a"), ErrorKind::usage, "field 'system.params.a' is required for jin-xin");
    return jin_xin(params.at("a").get<double>(), params.value("d", 1));
  }
  if (name == "saint-venant") {
    require(params.contains("froude"), ErrorKind::usage,
            "field 'system.params.froude' is required for saint-venant");
    return saint_venant(params.at("froude").get<double>(), params.value("d", 1));
  }
  if (name == "linear") {
    require(params.contains("flux") && params.contains("relaxation"), ErrorKind::usage,
            "fields 'system.params.flux' and 'system.params.relaxation' are required for linear");
    std::vector<Mat> flux;
    for (std::size_t j = 0; j < params.at("flux").size(); ++j)
      flux.push_back(matrix_from_json(params.at("flux").at(j), "system.params.flux"));
    return linear_system("linear", std::move(flux), matrix_from_json(params.at("relaxation"), "system.params.relaxation"));
  }
  fail(ErrorKind::usage, "unknown system name '" + name + "' (field 'system.name')");
}

CorpusEntry partially_damped_3x3() {
  Mat a = Eigen::Vector3d(1.0, -1.0, 2.0).asDiagonal();
  Mat b = Mat::Zero(3, 3);
  b << -1.0, 0.5, 0.0,
        0.5, -1.0, 0.0,
        0.0, 0.0, 0.0;
  return {"partially-damped-3x3", linear_system("partially-damped-3x3", {a}, b), Vec::Zero(3)};
}

CorpusEntry non_normal_damped_2x2() {
  Mat a = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  Mat b(2, 2);
  b << -1.0, 3.0,
        0.0, -1.0;
  return {"non-normal-damped-2x2", linear_system("non-normal-damped-2x2", {a}, b), Vec::Zero(2)};
}

std::vector<CorpusEntry> structural_corpus() {
  std::vector<CorpusEntry> out;
  auto jx_state = [](double u) { Vec w(2); w << u, 0.5 * u * u; return w; };
  out.push_back({"jin-xin a=2 u0=0", jin_xin(2.0), jx_state(0.0)});
  out.push_back({"jin-xin a=2 u0=0.5", jin_xin(2.0), jx_state(0.5)});
  out.push_back({"jin-xin a=1 u0=2 (supercharacteristic)", jin_xin(1.0), jx_state(2.0)});
  {
    Vec w(3);
    w << 0.5, 0.125, 0.125;
    out.push_back({"jin-xin 2-d a=2 u0=0.5", jin_xin(2.0, 2), w});
  }
  {
    Mat a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    out.push_back({"symmetric damped 2x2", linear_system("symmetric-damped", {a}, -Mat::Identity(2, 2)), Vec::Zero(2)});
    Mat jx(2, 2);
    jx << 0.0, 1.0, 4.0, 0.0;
    out.push_back({"undamped 2x2", linear_system("undamped", {jx}, Mat::Zero(2, 2)), Vec::Zero(2)});
  }
  {
    Vec w(2);
    w << 1.0, 1.0;
    out.push_back({"saint-venant F=1.5", saint_venant(1.5), w});
    out.push_back({"saint-venant F=3 (roll-wave unstable)", saint_venant(3.0), w});
  }
  out.push_back(partially_damped_3x3());
  out.push_back(non_normal_damped_2x2());
  return out;
}

}  // namespace relaxstab

#include <doctest.h>

#include <cmath>

#include "relaxstab/error.hpp"
#include "relaxstab/model.hpp"
#include "relaxstab/profile.hpp"
#include "relaxstab/systems.hpp"

using namespace relaxstab;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

std::vector<Vec> radial(int d, double r_min, double r_max) {
  return ray_grid(unit_directions(d, 16), r_min, r_max, 40);
}

}  // namespace

TEST_CASE("noncharacteristic margin of the Jin-Xin front matches the 2x2 singular value") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  const auto r = check_noncharacteristic(sys, profile, 1e-8);
  // σ_min([[-1/2, 1], [4, -1/2]]) = sqrt((17.5 - sqrt(250)) / 2)
  CHECK(r.margin == doctest::Approx(std::sqrt((17.5 - std::sqrt(250.0)) / 2.0)).epsilon(1e-12));
  CHECK(r.pass);
}

TEST_CASE("a characteristic speed inside the profile fails A1") {
  const auto sys = jin_xin(2.0);
  auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  profile.speed = 2.0;
  CHECK_FALSE(check_noncharacteristic(sys, profile, 1e-8).pass);
}

TEST_CASE("hyperbolicity") {
  SUBCASE("Jin-Xin is strictly hyperbolic") {
    const auto sys = jin_xin(2.0, 2);
    Vec w(3);
    w << 0.3, 0.045, 0.045;
    CHECK(check_hyperbolicity(sys, w, unit_directions(2, 32)).pass);
  }
  SUBCASE("a rotation generator has imaginary speeds") {
    const auto sys = linear_system("rotation", {mat2(0, 1, -1, 0)}, Mat::Zero(2, 2));
    const auto r = check_hyperbolicity(sys, Vec::Zero(2), unit_directions(1, 2));
    CHECK_FALSE(r.pass);
    CHECK(r.worst_imag > 0.5);
  }
}

TEST_CASE("geometric regularity along the half loop") {
  SUBCASE("a Jordan block at eta = e_2 is flagged") {
    const auto sys = linear_system("jordan", {mat2(1, 0, 0, -1), mat2(0, 1, 0, 0)}, -Mat::Identity(2, 2));
    const auto r = check_geometric_regularity(sys, Vec::Zero(2), half_loop(2, 65));
    CHECK_FALSE(r.pass);
    REQUIRE(r.flags.size() >= 1);
    CHECK(std::abs(r.flags.front().eta(0)) < 0.1);
  }
  SUBCASE("a diagonal crossing has bounded projectors") {
    const auto sys = linear_system("crossing", {mat2(1, 0, 0, -1), mat2(0, 0, 0, 0)}, -Mat::Identity(2, 2));
    const auto r = check_geometric_regularity(sys, Vec::Zero(2), half_loop(2, 65));
    CHECK(r.pass);
    CHECK(r.flags.empty());
  }
}

TEST_CASE("chf on Jin-Xin at a sonic-free state tends to 1/2") {
  const auto sys = jin_xin(2.0);
  // f'(0) = 0 gives μ^2 + μ + a^2 η^2 = 0, so Re μ = -1/2 once 2a|η| > 1.
  const auto r = check_chf(sys, Vec::Zero(2), 10.0, radial(1, 0.1, 1000.0), 0.4);
  CHECK(r.pass);
  CHECK(r.theta == doctest::Approx(0.5).epsilon(1e-10));
  for (const auto& [radius, re] : r.radial_profile)
    if (radius >= 10.0) CHECK(re <= -0.4);
}

TEST_CASE("chf at u0 = 1 approaches (1 - f'/a)/2") {
  const auto sys = jin_xin(2.0);
  const auto r = check_chf(sys, vec2(1.0, 0.5), 10.0, radial(1, 0.1, 1e4), 1e-6);
  CHECK(r.pass);
  CHECK(r.theta == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("supercharacteristic Jin-Xin fails chf") {
  const auto sys = jin_xin(1.0);
  const auto r = check_chf(sys, vec2(2.0, 2.0), 10.0, radial(1, 0.1, 1000.0), 1e-6);
  CHECK_FALSE(r.pass);
  CHECK(r.theta < 0.0);
}

TEST_CASE("undamped system has zero chf margin") {
  const auto sys = linear_system("undamped", {mat2(1, 0, 0, -1)}, Mat::Zero(2, 2));
  const auto r = check_chf(sys, Vec::Zero(2), 10.0, radial(1, 0.1, 100.0), 1e-6);
  CHECK_FALSE(r.pass);
  CHECK(std::abs(r.theta) < 1e-12);
}

TEST_CASE("chf rejects a non-equilibrium state") {
  const auto sys = jin_xin(2.0);
  CHECK_THROWS_AS(check_chf(sys, vec2(1.0, 0.0), 10.0, radial(1, 0.1, 100.0), 1e-6), Error);
}

TEST_CASE("Kawashima on the structural corpus") {
  const auto samples = ray_grid(unit_directions(1, 2), 1.0, 100.0, 8);
  SUBCASE("partially damped 3x3 fails genuine coupling but is evaluated by chf") {
    const auto e = partially_damped_3x3();
    const auto k = check_kawashima(e.system, e.state, samples);
    CHECK_FALSE(k.genuine_coupling);
    CHECK_FALSE(k.pass);
    const auto chf = check_chf(e.system, e.state, 10.0, radial(e.system.d, 0.1, 100.0), 1e-6);
    CHECK_FALSE(chf.pass);
  }
  SUBCASE("non-normal damped 2x2 passes with a diagonal symmetrizer") {
    const auto e = non_normal_damped_2x2();
    const auto k = check_kawashima(e.system, e.state, samples);
    CHECK(k.pass);
    CHECK(k.symmetric_dissipative);
  }
  SUBCASE("Kawashima implies chf on every corpus entry") {
    for (const auto& e : structural_corpus()) {
      const auto dirs = unit_directions(e.system.d, 16);
      const auto k = check_kawashima(e.system, e.state, ray_grid(dirs, 1.0, 100.0, 8));
      const auto chf = check_chf(e.system, e.state, 10.0, radial(e.system.d, 0.1, 1000.0), 1e-6);
      INFO(e.label);
      if (k.pass) CHECK(chf.pass);
    }
  }
}

TEST_CASE("2-d Jin-Xin off the sonic state passes chf without being Kawashima") {
  const auto sys = jin_xin(2.0, 2);
  Vec w(3);
  w << 0.5, 0.125, 0.125;
  const auto chf = check_chf(sys, w, 10.0, radial(2, 0.1, 1000.0), 1e-6);
  const auto k = check_kawashima(sys, w, ray_grid(unit_directions(2, 16), 1.0, 100.0, 8));
  CHECK(chf.pass);
  CHECK_FALSE(k.pass);
}

TEST_CASE("direction helpers") {
  for (int d : {1, 2, 3})
    for (const auto& v : unit_directions(d, 20)) CHECK(v.norm() == doctest::Approx(1.0));
  const auto loop = half_loop(2, 33);
  CHECK((loop.front() - vec2(1, 0)).norm() < 1e-14);
  CHECK((loop.back() - vec2(-1, 0)).norm() < 1e-14);
  CHECK((loop[16] - vec2(0, 1)).norm() < 1e-14);
}

TEST_CASE("hypothesis reports are deterministic") {
  const auto sys = jin_xin(2.0);
  const auto profile = solve_profile_jinxin(2.0, 1.0, 0.0);
  auto build = [&] {
    HypothesisReport r;
    r.a1 = check_noncharacteristic(sys, profile, 1e-8);
    r.a2 = check_hyperbolicity(sys, profile.w_minus, unit_directions(1, 2));
    r.a3 = check_geometric_regularity(sys, profile.w_minus, half_loop(1, 2));
    r.chf = check_chf(sys, profile.w_minus, 10.0, radial(1, 0.1, 1000.0), 1e-6);
    r.kawashima = check_kawashima(sys, profile.w_minus, unit_directions(1, 2));
    return to_json(r).dump();
  };
  CHECK(build() == build());
}

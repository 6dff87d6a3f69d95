#include <doctest.h>

#include <cmath>
#include <numbers>

#include "openkz/errors.hpp"
#include "openkz/models.hpp"

using namespace openkz;
using std::numbers::pi;

namespace {

double gap_norm(const ModelSpec& m, Momentum q) {
  if (m.dimension() == 1) q.x = std::remainder(q.x, 2.0 * pi);
  return std::abs(mode_drive(m, q).delta);
}

// Centered estimate of the cone slope: average of |Delta| at +h and -h along `dir`.
double cone_slope(const ModelSpec& m, Momentum qc, double ex, double ey, double h) {
  const double plus = gap_norm(m, {qc.x + h * ex, qc.y + h * ey});
  const double minus = gap_norm(m, {qc.x - h * ex, qc.y - h * ey});
  return (plus + minus) / (2.0 * h);
}

}  // namespace

TEST_CASE("bloch vectors vanish at the critical points") {
  const BlochVector rm = bloch_vector(rice_mele(1.0, -1.0), {0.0, 0.0}, 0.0);
  CHECK(rm.omega() == doctest::Approx(0.0).epsilon(1e-15));

  const BlochVector sh = bloch_vector(shockley(0.5, 0.5), {pi, 0.0}, -1.0);
  CHECK(std::abs(sh.dx) < 1e-15);
  CHECK(std::abs(sh.dy) < 1e-15);
  CHECK(std::abs(sh.dz) < 1e-15);

  const BlochVector hd =
      bloch_vector(haldane(1.0, 0.5, pi / 2), honeycomb::corner(1), 3.0 * std::sqrt(3.0) / 2.0);
  CHECK(std::abs(hd.dz) < 1e-12);
  CHECK(std::sqrt(hd.delta_norm_sq()) < 1e-12);
}

TEST_CASE("momentum outside the zone is rejected") {
  CHECK_THROWS_AS(bloch_vector(rice_mele(), {4.0, 0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(bloch_vector(shockley(), {-3.5, 0.0}, 0.0), DomainError);
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS(shockley(-0.5, 0.5).validate(), PreconditionError);
  CHECK_NOTHROW(haldane().validate());
}

TEST_CASE("bogoliubov coefficients") {
  SUBCASE("dominant positive dz") {
    const Bogoliubov r = bogoliubov({0.0, 0.0, 2.0});
    CHECK(std::abs(r.u) == doctest::Approx(1.0));
    CHECK(std::abs(r.v) == doctest::Approx(0.0));
    CHECK(r.omega == doctest::Approx(2.0));
  }
  SUBCASE("dominant negative dz") {
    const Bogoliubov r = bogoliubov({0.0, 0.0, -3.0});
    CHECK(std::abs(r.u) == doctest::Approx(0.0));
    CHECK(std::abs(r.v) == doctest::Approx(1.0));
    CHECK(r.omega == doctest::Approx(3.0));
  }
  SUBCASE("symmetric point") {
    const Bogoliubov r = bogoliubov({1.0, 0.0, 0.0});
    CHECK(std::norm(r.u) == doctest::Approx(0.5));
    CHECK(std::norm(r.v) == doctest::Approx(0.5));
  }
  SUBCASE("gapless input") { CHECK_THROWS_AS(bogoliubov({0.0, 0.0, 0.0}), SingularPointError); }
  SUBCASE("normalization and eigenvector property") {
    for (double dz : {-2.0, -0.3, 0.0, 0.7, 5.0}) {
      const BlochVector b{0.4, -1.1, dz};
      const Bogoliubov r = bogoliubov(b);
      CHECK(std::norm(r.u) + std::norm(r.v) == doctest::Approx(1.0).epsilon(1e-14));
      // (-v, u) is the lower eigenvector of [[dz, conj D], [D, -dz]].
      const cplx x0 = -r.v;
      const cplx x1 = r.u;
      const cplx h0 = b.dz * x0 + std::conj(b.delta()) * x1;
      const cplx h1 = b.delta() * x0 - b.dz * x1;
      CHECK(std::abs(h0 + r.omega * x0) < 1e-13);
      CHECK(std::abs(h1 + r.omega * x1) < 1e-13);
    }
  }
}

TEST_CASE("critical modes") {
  SUBCASE("rice-mele") {
    const auto cm = critical_modes(rice_mele(1.0, -1.0));
    REQUIRE(cm.size() == 1);
    CHECK(cm[0].q.x == 0.0);
    CHECK(cm[0].u_c == 0.0);
    CHECK(cm[0].slope == doctest::Approx(1.0));
  }
  SUBCASE("shockley") {
    const auto cm = critical_modes(shockley(0.5, 0.5));
    REQUIRE(cm.size() == 2);
    CHECK(cm[0].u_c == doctest::Approx(1.0));
    CHECK(cm[1].u_c == doctest::Approx(-1.0));
    CHECK(cm[0].slope == doctest::Approx(1.0));
    CHECK(cm[1].slope == doctest::Approx(1.0));
  }
  SUBCASE("haldane") {
    const auto cm = critical_modes(haldane(1.0, 0.5, pi / 2));
    REQUIRE(cm.size() == 2);
    CHECK(cm[0].u_c == doctest::Approx(3.0 * std::sqrt(3.0) / 2.0));
    CHECK(cm[1].u_c == doctest::Approx(-3.0 * std::sqrt(3.0) / 2.0));
    for (const auto& c : cm) {
      const BlochVector b = bloch_vector(haldane(1.0, 0.5, pi / 2), c.q, c.u_c);
      CHECK(b.omega() < 1e-12);
    }
  }
}

TEST_CASE("critical slopes agree with finite differences") {
  const double h = 1e-6;
  for (const ModelSpec& m : {rice_mele(1.0, -1.0), rice_mele(0.7, 0.7), shockley(0.5, 0.5),
                             shockley(0.3, 0.8)}) {
    for (const auto& c : critical_modes(m)) {
      CHECK(std::abs(cone_slope(m, c.q, 1.0, 0.0, h) - c.slope) < 1e-6);
    }
  }
  const ModelSpec hd = haldane(1.3, 0.2, 0.9);
  for (const auto& c : critical_modes(hd)) {
    for (double angle : {0.0, 0.6, 2.1, 4.0}) {
      CHECK(std::abs(cone_slope(hd, c.q, std::cos(angle), std::sin(angle), h) - c.slope) < 1e-6);
    }
  }
}

TEST_CASE("winding number") {
  const ModelSpec m = shockley(0.5, 0.5);
  CHECK(winding_number(m, 2.0) == 0);
  CHECK(std::abs(winding_number(m, 0.0)) == 1);
  CHECK_THROWS_AS(winding_number(m, 1.0), SingularPointError);
  for (int n : {256, 512, 4096, 10000}) {
    CHECK(winding_number(m, 0.3, n) == winding_number(m, 0.3, 256));
    CHECK(winding_number(m, -1.7, n) == winding_number(m, -1.7, 256));
  }
  CHECK(std::abs(winding_number(rice_mele(0.5, -1.0), 0.0)) == 1);
  CHECK(winding_number(rice_mele(1.5, -1.0), 0.0) == 0);
  CHECK_THROWS_AS(winding_number(haldane(), 0.0), DomainError);
}

TEST_CASE("brillouin-zone grids") {
  const MomentumGrid g = bz_grid(rice_mele(), 4);
  REQUIRE(g.size() == 4);
  CHECK(g.points[0].x == doctest::Approx(-pi));
  CHECK(g.points[1].x == doctest::Approx(-pi / 2));
  CHECK(g.points[2].x == doctest::Approx(0.0));
  CHECK(g.points[3].x == doctest::Approx(pi / 2));
  CHECK(g.weight == 0.25);

  const MomentumGrid h = bz_grid(haldane(), 140);
  CHECK(h.size() == 19600u);
  CHECK(h.weight * static_cast<double>(h.size()) == doctest::Approx(1.0).epsilon(1e-14));

  for (const ModelSpec& m : {rice_mele(), shockley(), haldane()}) {
    const MomentumGrid two = bz_grid(m, 2);
    CHECK(two.weight * static_cast<double>(two.size()) == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(bz_grid(rice_mele(), 1), DomainError);
}

TEST_CASE("honeycomb grid covers the zone once") {
  // A smooth periodic function averages to its zero mode: mean of |Delta|^2 is 3 t1^2.
  const ModelSpec m = haldane(1.0, 0.5, pi / 2);
  const MomentumGrid g = bz_grid(m, 60);
  double acc = 0.0;
  for (const Momentum& q : g.points) acc += std::norm(mode_drive(m, q).delta) * g.weight;
  CHECK(acc == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("quench protocol") {
  const QuenchProtocol p{2.0, -2.0, 50.0};
  CHECK(p.t_final() == 200.0);
  CHECK(p.u_bar() == 2.0);
  CHECK(p.u_at(0.0) == 2.0);
  CHECK(p.u_at(100.0) == doctest::Approx(0.0));
  CHECK(p.u_at(p.t_final()) == -2.0);
  CHECK_THROWS_AS((QuenchProtocol{-2.0, 2.0, 10.0}.validate()), PreconditionError);
  CHECK_THROWS_AS((QuenchProtocol{2.0, -2.0, 0.0}.validate()), PreconditionError);
  CHECK_THROWS_AS((QuenchProtocol{2.0, -2.0, 1e-16}.validate()), PreconditionError);
}

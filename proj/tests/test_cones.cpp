#include <catch2/catch_amalgamated.hpp>

#include "alcc/cones.hpp"
#include "support/oracles.hpp"

using namespace alcc;
using Catch::Approx;

TEST_CASE("nonneg projection clips negatives") {
  Cone k = Cone::nonneg(2);
  Vector p = k.project({1.0, -2.0});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(k.distance({1.0, -2.0}) == Approx(2.0));
}

TEST_CASE("psd projection clips eigenvalues at zero") {
  Cone k = Cone::psd(2);
  SymMatrix m = SymMatrix::from_full(2, {1, 0, 0, -1});
  Vector p = k.project(m.svec);
  SymMatrix expected = SymMatrix::from_full(2, {1, 0, 0, 0});
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == Approx(expected.svec[i]).margin(1e-12));
}

TEST_CASE("psd distance of the 2x2 exchange matrix is 1") {
  Cone k = Cone::psd(2);
  SymMatrix m = SymMatrix::from_full(2, {0, 1, 1, 0});
  CHECK(k.distance(m.svec) == Approx(1.0).margin(1e-10));
}

TEST_CASE("second-order cone closed-form projection") {
  Cone k = Cone::second_order(3);
  Vector p = k.project({0.0, 2.0, 0.0});
  CHECK(p[0] == Approx(1.0));
  CHECK(p[1] == Approx(1.0));
  CHECK(p[2] == Approx(0.0));
}

TEST_CASE("second-order cone projects the polar cone to zero") {
  Cone k = Cone::second_order(3);
  Vector p = k.project({-2.0, 1.0, 0.0});
  CHECK(norm2(p) == 0.0);
}

TEST_CASE("zero cone distance is the norm") {
  CHECK(Cone::zero(2).distance({3.0, 4.0}) == Approx(5.0));
}

TEST_CASE("dual membership tests") {
  CHECK(Cone::nonneg(2).in_dual({0.0, 3.0}, 1e-12));
  CHECK(Cone::zero(2).in_dual({5.0, -7.0}, 0.0));
  CHECK_FALSE(Cone::second_order(3).in_dual({1.0, 2.0, 0.0}, 1e-8));
  CHECK_THROWS_AS(Cone::nonneg(2).in_dual({1.0, 1.0}, -1.0), InvalidParameter);
}

TEST_CASE("projection rejects dimension mismatch") {
  CHECK_THROWS_AS(Cone::nonneg(2).project({1.0}), DimensionError);
  CHECK_THROWS_AS(Cone::psd(2).distance({1.0, 2.0}), DimensionError);
}

TEST_CASE("product cone projects blockwise") {
  Cone k = Cone::product({Cone::nonneg(2), Cone::second_order(3)});
  REQUIRE(k.dim() == 5);
  Vector v = {1.0, -2.0, 0.0, 2.0, 0.0};
  Vector p = k.project(v);
  CHECK(p[0] == Approx(1.0));
  CHECK(p[1] == Approx(0.0));
  CHECK(p[2] == Approx(1.0));
  CHECK(p[3] == Approx(1.0));
  CHECK(p[4] == Approx(0.0));
}

TEST_CASE("nested products are flattened") {
  Cone k = Cone::product({Cone::nonneg(1), Cone::product({Cone::zero(2), Cone::nonneg(1)})});
  CHECK(k.parts().size() == 3);
  CHECK(k.dim() == 4);
}

namespace {

Vector random_point_for(const Cone& k, Rng& rng) { return rng.gaussian_vector(k.dim()); }

std::vector<Cone> property_cones() {
  std::vector<Cone> cones;
  cones.push_back(Cone::zero(3));
  cones.push_back(Cone::nonneg(5));
  cones.push_back(Cone::second_order(4));
  cones.push_back(Cone::psd(3));
  cones.push_back(Cone::product({Cone::nonneg(2), Cone::second_order(3), Cone::psd(2)}));
  return cones;
}

}  // namespace

TEST_CASE("projection complementarity and dual residual, 1000 random points per cone") {
  Rng rng(101);
  for (const Cone& k : property_cones()) {
    const Cone dual = k.dual();
    for (int rep = 0; rep < 1000; ++rep) {
      Vector v = random_point_for(k, rng);
      Vector p = k.project(v);
      Vector residual = sub(v, p);
      REQUIRE(std::abs(dot(residual, p)) <= 1e-8 * (1.0 + dot(v, v)));
      // v - Pi(v) lies in -K*: distance of Pi(v) - v to K* is ~0
      REQUIRE(dual.distance(scaled(residual, -1.0)) <= 1e-8 * (1.0 + norm2(v)));
      // projection output is in the cone
      REQUIRE(k.distance(p) <= 1e-8 * (1.0 + norm2(v)));
    }
  }
}

TEST_CASE("projection and complement are jointly nonexpansive, 1000 random pairs per cone") {
  Rng rng(202);
  for (const Cone& k : property_cones()) {
    for (int rep = 0; rep < 1000; ++rep) {
      Vector v1 = random_point_for(k, rng);
      Vector v2 = random_point_for(k, rng);
      Vector p1 = k.project(v1), p2 = k.project(v2);
      const double dp = dot(sub(p1, p2), sub(p1, p2));
      Vector c1 = sub(v1, p1), c2 = sub(v2, p2);
      const double dc = dot(sub(c1, c2), sub(c1, c2));
      const double dv = dot(sub(v1, v2), sub(v1, v2));
      REQUIRE(dp + dc <= dv + 1e-10 * (1.0 + dv));
    }
  }
}

TEST_CASE("distance perturbation bound d(y) <= d(y+y') + ||y'||, 1000 random pairs per cone") {
  Rng rng(303);
  for (const Cone& k : property_cones()) {
    for (int rep = 0; rep < 1000; ++rep) {
      Vector y = random_point_for(k, rng);
      Vector yp = random_point_for(k, rng);
      REQUIRE(k.distance(y) <= k.distance(add(y, yp)) + norm2(yp) + 1e-10);
    }
  }
}

TEST_CASE("projection is idempotent") {
  Rng rng(404);
  for (const Cone& k : property_cones()) {
    for (int rep = 0; rep < 100; ++rep) {
      Vector v = random_point_for(k, rng);
      Vector p = k.project(v);
      Vector pp = k.project(p);
      REQUIRE(norm2(sub(p, pp)) <= 1e-10 * (1.0 + norm2(v)));
    }
  }
}

TEST_CASE("cone points validate their dimension") {
  Cone k = Cone::second_order(3);
  ConePoint p(k, {1.0, 0.5, 0.0});
  CHECK(p.in_cone(1e-12));
  CHECK(p.distance() == 0.0);
  CHECK_THROWS_AS(ConePoint(k, {1.0, 0.5}), DimensionError);
  ConePoint q(k, {0.0, 2.0, 0.0});
  CHECK(q.distance() > 0.5);
}

TEST_CASE("distance is zero exactly on the cone") {
  Rng rng(505);
  Cone k = Cone::second_order(4);
  for (int rep = 0; rep < 100; ++rep) {
    Vector v = rng.gaussian_vector(4);
    Vector p = k.project(v);
    REQUIRE(k.distance(p) <= 1e-12 * (1.0 + norm2(v)));
  }
}

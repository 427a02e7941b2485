#include "doctest.h"

#include "wsi/common.hpp"
#include "wsi/weights.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace wsi;

namespace {

Weight random_weight(Geometry g, Rng& rng, CubeFamily fam = CubeFamily::all) {
  GridFunction w(g);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(rng.uniform(-1.5, 1.5));
  return Weight(std::move(w), fam);
}

// Fujii-Wilson constant straight from the definition, dimension 1: for each
// interval Q of the family, average over Q the max subinterval average
// through each cell, divide by the average of w
double ainf_oracle_1d(const Weight& w) {
  const Geometry& g = w.geometry();
  double best = 0.0;
  for (const Cube& q : enumerate_cubes(g, w.family())) {
    const int i0 = q.offset[0], len = q.extent[0];
    double num = 0.0, den = 0.0;
    for (int x = i0; x < i0 + len; ++x) {
      double mx = 0.0;
      for (int a = i0; a <= x; ++a)
        for (int b = x; b < i0 + len; ++b) {
          double s = 0.0;
          for (int c = a; c <= b; ++c) s += w[static_cast<std::size_t>(c)];
          mx = std::max(mx, s / static_cast<double>(b - a + 1));
        }
      num += mx;
      den += w[static_cast<std::size_t>(x)];
    }
    best = std::max(best, num / den);
  }
  return best;
}

} // namespace

TEST_CASE("weight spec parsing") {
  auto c = WeightSpec::parse("constant:2");
  CHECK(c.kind == WeightSpec::Kind::constant);
  CHECK(c.value == 2.0);
  auto p = WeightSpec::parse("power:-0.4@0.3");
  CHECK(p.exponent == -0.4);
  CHECK(p.center == 0.3);
  auto v = WeightSpec::parse("values:1,2,0.5,4");
  CHECK(v.values.size() == 4);
  CHECK_THROWS_AS(WeightSpec::parse("constant:0"), std::invalid_argument);
  CHECK_THROWS_AS(WeightSpec::parse("power:"), std::invalid_argument);
  CHECK_THROWS_AS(WeightSpec::parse("gaussian:1"), std::invalid_argument);
  CHECK(WeightSpec::parse("power:0.5").label() == "power:0.5");
}

TEST_CASE("lebesgue weight has unit constants") {
  Geometry g{1, 3, false};
  Weight w(GridFunction(g, 1.0));
  for (double p : {1.5, 2.0, 3.0}) CHECK(w.ap(p) == doctest::Approx(1.0));
  CHECK(w.a1() == doctest::Approx(1.0));
  CHECK(w.ainf() == doctest::Approx(1.0));
}

TEST_CASE("two-cell weight constants by hand") {
  Geometry g{1, 1, false};
  Weight w(GridFunction(g, std::vector<double>{1, 4}));
  // whole interval: <w> = 2.5, <w^-1> = 0.625
  CHECK(w.ap(2) == doctest::Approx(1.5625));
  // Mw = (2.5, 4)
  CHECK(w.a1() == doctest::Approx(2.5));
  // Fujii-Wilson on the whole interval: (2.5 + 4) / (1 + 4)
  CHECK(w.ainf() == doctest::Approx(1.3));
}

TEST_CASE("duality identity is exact") {
  Rng rng(41);
  Geometry g{1, 5, false};
  for (int rep = 0; rep < 5; ++rep) {
    Weight w = random_weight(g, rng);
    for (double p : {1.5, 2.0, 3.0}) {
      const double pp = p / (p - 1.0);
      Weight sigma = w.dual(p);
      CHECK(sigma.ap(pp) ==
            doctest::Approx(std::pow(w.ap(p), pp - 1.0)).epsilon(1e-8));
    }
  }
  Weight w = random_weight(g, rng);
  Weight sigma2 = w.dual(2.0);
  for (std::size_t i = 0; i < sigma2.values().size(); ++i)
    CHECK(sigma2[i] == doctest::Approx(1.0 / w[i]).epsilon(1e-12));
}

TEST_CASE("constant order relations") {
  Rng rng(43);
  Geometry g{1, 4, false};
  for (int rep = 0; rep < 5; ++rep) {
    Weight w = random_weight(g, rng);
    const double a15 = w.ap(1.5), a2 = w.ap(2.0), a3 = w.ap(3.0), a1 = w.a1();
    CHECK(a15 >= 1.0 - 1e-12);
    CHECK(w.ainf() >= 1.0 - 1e-12);
    // Ap shrinks as p grows and everything sits under A1
    CHECK(a2 <= a15 + 1e-12);
    CHECK(a3 <= a2 + 1e-12);
    CHECK(a15 <= a1 + 1e-12);
  }
  CHECK_THROWS(random_weight(g, rng).ap(0.5));
}

TEST_CASE("fujii-wilson matches the definition oracle") {
  Rng rng(47);
  Geometry g{1, 4, false};
  for (int rep = 0; rep < 3; ++rep) {
    Weight w = random_weight(g, rng);
    CHECK(w.ainf() == doctest::Approx(ainf_oracle_1d(w)).epsilon(1e-10));
  }
  // dyadic family variant
  Weight wd = random_weight(g, rng, CubeFamily::dyadic);
  CHECK(wd.ainf() == doctest::Approx(ainf_oracle_1d(wd)).epsilon(1e-10));
}

TEST_CASE("power weight is finite and positive on the grid") {
  Geometry g{1, 6, false};
  auto vals = build_weight_values(WeightSpec::parse("power:-0.4"), g);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    CHECK(vals[i] > 0.0);
    CHECK(std::isfinite(vals[i]));
  }
  Weight w(vals);
  CHECK(w.ap(2.0) >= 1.0);
  CHECK(std::isfinite(w.ap(2.0)));
}

TEST_CASE("norms and superlevel sets") {
  Geometry g{1, 2, false};
  GridFunction f(g, std::vector<double>{4, 0, 0, 0});
  Weight one(GridFunction(g, 1.0));
  CHECK(weighted_norm(f, one, 2.0) == doctest::Approx(2.0));
  CHECK(weighted_norm(f, one, 1.0) == doctest::Approx(1.0));
  CHECK(superlevel_measure(f, one, 1.0) == doctest::Approx(0.25));
  CHECK(superlevel_measure(f, one, 4.0) == 0.0);

  Weight w(GridFunction(g, std::vector<double>{3, 1, 1, 1}));
  CHECK(superlevel_measure(f, w, 2.0) == doctest::Approx(0.75));
  CHECK_THROWS(superlevel_measure(f, w, 0.0));
  CHECK_THROWS(weighted_norm(f, w, 0.0));
}

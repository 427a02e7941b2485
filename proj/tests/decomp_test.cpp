#include "doctest.h"

#include "wsi/common.hpp"
#include "wsi/decomp.hpp"

#include <cmath>
#include <vector>

using namespace wsi;

namespace {

double abs_avg(const GridFunction& f, const Cube& q) {
  double s = 0.0;
  q.for_each_cell([&](std::size_t c) { s += std::fabs(f[c]); });
  return s / static_cast<double>(q.cell_count());
}

double l1(const GridFunction& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::fabs(f[i]);
  return s * f.geometry().cell_measure();
}

void check_cz_contract(const GridFunction& f, double lambda) {
  auto res = cz_decompose(f, lambda, {});
  const int twon = 1 << f.geometry().dim;
  double cube_measure = 0.0;
  std::vector<std::uint8_t> seen(f.size(), 0);
  for (std::size_t qi = 0; qi < res.cubes.size(); ++qi) {
    const Cube& q = res.cubes[qi];
    const double avg = abs_avg(f, q);
    CHECK(avg > lambda);
    if (!q.same_box(res.root)) {
      CHECK(avg <= twon * lambda + 1e-12);
      CHECK(abs_avg(f, q.parent()) <= lambda + 1e-12);
    }
    CHECK(res.t_values[qi] == doctest::Approx(std::pow(q.side_length(), 2.0)));
    q.for_each_cell([&](std::size_t c) {
      CHECK(seen[c] == 0); // disjoint
      seen[c] = 1;
    });
    cube_measure += q.measure();
  }
  CHECK(cube_measure <= l1(f) / lambda + 1e-12);

  // exact reconstruction and the good-part bound
  GridFunction sum = res.good;
  for (const auto& b : res.bad)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(sum[i] == doctest::Approx(f[i]).epsilon(1e-12));
    if (!seen[i]) CHECK(std::fabs(res.good[i]) <= lambda + 1e-12);
  }
}

} // namespace

TEST_CASE("stopping cubes on four cells") {
  Geometry g{1, 2, false};
  GridFunction f(g, std::vector<double>{1, 0, 0, 0});

  auto res = cz_decompose(f, 0.5, {});
  REQUIRE(res.cubes.size() == 1);
  CHECK(res.cubes[0].offset[0] == 0);
  CHECK(res.cubes[0].extent[0] == 1);
  CHECK(res.t_values[0] == doctest::Approx(0.0625));
  CHECK(res.good[0] == 0.0);
  CHECK(res.bad[0][0] == doctest::Approx(1.0));

  // lambda above every dyadic average: nothing selected, f untouched
  auto none = cz_decompose(f, 2.0, {});
  CHECK(none.cubes.empty());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(none.good[i] == f[i]);

  // the root itself is selectable
  GridFunction big(g, 3.0);
  auto whole = cz_decompose(big, 1.0, {});
  REQUIRE(whole.cubes.size() == 1);
  CHECK(whole.cubes[0].same_box(Cube::whole_domain(g)));
}

TEST_CASE("mean-zero bad parts") {
  Geometry g{1, 3, false};
  Rng rng(53);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-2, 2);
  CZOptions opt;
  opt.mean_zero = true;
  auto res = cz_decompose(f, 0.4, opt);
  REQUIRE(!res.cubes.empty());
  for (const auto& b : res.bad) {
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) s += b[i];
    CHECK(s * g.cell_measure() == doctest::Approx(0.0).epsilon(1e-12));
  }
  GridFunction sum = res.good;
  for (const auto& b : res.bad)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(sum[i] == doctest::Approx(f[i]));
}

TEST_CASE("random decompositions satisfy the stopping contract") {
  Rng rng(59);
  for (int dim : {1, 2}) {
    Geometry g{dim, 4, false};
    for (int rep = 0; rep < 10; ++rep) {
      GridFunction f(g);
      for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = rng.uniform(0, 1) < 0.3 ? rng.uniform(-4, 4) : 0.0;
      check_cz_contract(f, rng.uniform(0.1, 1.0));
    }
  }
}

TEST_CASE("indicator selection sandwich") {
  Rng rng(61);
  Geometry g{1, 5, false};
  const double lambda = 0.25; // 2^-(n+1)
  for (int rep = 0; rep < 10; ++rep) {
    GridFunction chi(g);
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = rng.uniform(0, 1) < 0.15 ? 1.0 : 0.0;
    auto cubes = cz_select(chi, lambda, Cube::whole_domain(g));
    for (const Cube& q : cubes) {
      const double frac = abs_avg(chi, q);
      CHECK(frac > lambda);
      if (!q.same_box(Cube::whole_domain(g))) CHECK(frac <= 0.5 + 1e-12);
    }
  }
}

TEST_CASE("custom root confines the selection") {
  Geometry g{1, 3, false};
  GridFunction f(g);
  f[0] = 8.0;
  f[7] = 8.0;
  Cube left = Cube::dyadic_cube(g, 1, {0, 0});
  CZOptions opt;
  opt.root = left;
  auto res = cz_decompose(f, 0.5, opt);
  REQUIRE(!res.cubes.empty());
  for (const Cube& q : res.cubes)
    q.for_each_cell([&](std::size_t c) { CHECK(c < 4); });
}

TEST_CASE("chebyshev distance field") {
  Geometry g{1, 3, false};
  std::vector<std::uint8_t> mask(8, 0);
  mask[2] = mask[3] = mask[4] = 1;
  auto omega = CellSet::from_mask(g, mask);
  auto d = chebyshev_distance_field(omega);
  CHECK(d[0] == 0);
  CHECK(d[1] == 0);
  CHECK(d[2] == 1);
  CHECK(d[3] == 2);
  CHECK(d[4] == 1);
  CHECK(d[5] == 0);
}

TEST_CASE("whitney floors a lone cell") {
  Geometry g{1, 4, false};
  std::vector<std::uint8_t> mask(16, 0);
  mask[7] = 1;
  auto res = whitney_decompose(CellSet::from_mask(g, mask), 1.5);
  REQUIRE(res.cubes.size() == 1);
  CHECK(res.floored[0] == 1);
  CHECK(res.cubes[0].extent[0] == 1);
  CHECK(res.cubes[0].offset[0] == 7);
}

TEST_CASE("whitney band and partition") {
  for (double R : {1.5, 3.0}) {
    const int L = whitney_min_level(R, 1);
    Geometry g{1, L, false};
    const int n = g.cells_per_axis();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
    for (int i = n / 4; i < 3 * n / 4; ++i) mask[static_cast<std::size_t>(i)] = 1;
    auto omega = CellSet::from_mask(g, mask);
    auto res = whitney_decompose(omega, R);

    std::vector<std::uint8_t> covered(static_cast<std::size_t>(n), 0);
    int proper = 0;
    for (std::size_t qi = 0; qi < res.cubes.size(); ++qi) {
      res.cubes[qi].for_each_cell([&](std::size_t c) {
        CHECK(mask[c] == 1);
        CHECK(covered[c] == 0);
        covered[c] = 1;
      });
      if (!res.floored[qi]) {
        ++proper;
        CHECK(res.ratios[qi] >= 5.0 * R - 1e-12);
        CHECK(res.ratios[qi] <= 15.0 * R + 1e-12);
      } else {
        CHECK(res.cubes[qi].extent[0] == 1);
      }
    }
    for (std::size_t c = 0; c < covered.size(); ++c) CHECK(covered[c] == mask[c]);
    CHECK(proper > 0); // the level was chosen so the band is realizable
    CHECK(res.max_overlap >= 1.0);
  }
  CHECK(whitney_min_level(3.0, 1) >= whitney_min_level(1.5, 1));
}

TEST_CASE("whitney guards") {
  Geometry g{1, 2, false};
  std::vector<std::uint8_t> all(4, 1);
  CHECK_THROWS(whitney_decompose(CellSet::from_mask(g, all), 1.5));
  std::vector<std::uint8_t> none(4, 0);
  CHECK_THROWS(whitney_decompose(CellSet::from_mask(g, none), 1.5));
  std::vector<std::uint8_t> one(4, 0);
  one[1] = 1;
  CHECK_THROWS(whitney_decompose(CellSet::from_mask(g, one), 0.5));
}

#include "wsi/grid.hpp"

#include "doctest.h"

#include <algorithm>
#include <set>

using namespace wsi;

namespace {

Geometry g1(int level, bool periodic = false) { return Geometry{1, level, periodic}; }

} // namespace

TEST_CASE("geometry validation") {
  CHECK_THROWS(Geometry{3, 2, false}.validate());
  CHECK_THROWS(Geometry{1, -1, false}.validate());
  CHECK_THROWS(Geometry{1, 15, false}.validate());
  CHECK(g1(2).cell_count() == 4);
  CHECK(Geometry{2, 3, false}.cell_count() == 64);
  CHECK(g1(2).cell_measure() == doctest::Approx(0.25));
  CHECK(Geometry{2, 2, false}.cell_measure() == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("integrate on cubes") {
  GridFunction f(g1(2), {4.0, 0.0, 0.0, 0.0});
  CHECK(integrate(f, Cube::whole_domain(f.geometry())) == doctest::Approx(1.0));
  // [0, 0.5) is the depth-1 dyadic cube at index 0
  Cube half = Cube::dyadic_cube(f.geometry(), 1, {0, 0});
  CHECK(half.measure() == doctest::Approx(0.5));
  CHECK(integrate(f, half) == doctest::Approx(1.0));
  GridFunction one(g1(3), 1.0);
  CHECK(integrate(one, Cube::whole_domain(one.geometry())) == doctest::Approx(1.0));
  CHECK(average(f, half) == doctest::Approx(2.0));
}

TEST_CASE("dilate wraps on periodic grids and clips otherwise") {
  Geometry gp = g1(2, true);
  Cube mid = Cube::unit_cell(gp, 1);
  auto cells = dilate(mid, 3).cells();
  std::set<std::size_t> got(cells.begin(), cells.end());
  CHECK(got == std::set<std::size_t>{0, 1, 2});

  Cube first = Cube::unit_cell(gp, 0);
  auto wrapped = dilate(first, 3).cells();
  CHECK(wrapped.size() == 3);
  std::set<std::size_t> wset(wrapped.begin(), wrapped.end());
  CHECK(wset == std::set<std::size_t>{3, 0, 1});

  Geometry gn = g1(2, false);
  Cube whole = Cube::whole_domain(gn);
  Cube big = dilate(whole, 3);
  CHECK(big.cell_count() == 4);
  CHECK(big.measure() == doctest::Approx(1.0));

  Cube edge = dilate(Cube::unit_cell(gn, 0), 3);
  auto ec = edge.cells();
  std::set<std::size_t> eset(ec.begin(), ec.end());
  CHECK(eset == std::set<std::size_t>{0, 1}); // clipped at the left edge
}

TEST_CASE("cube family counts") {
  CHECK(enumerate_cubes(g1(2), CubeFamily::dyadic).size() == 7);
  CHECK(enumerate_cubes(g1(2), CubeFamily::all).size() == 10);
  // dim 2: sum over depths of 4^k
  CHECK(enumerate_cubes(Geometry{2, 2, false}, CubeFamily::dyadic).size() == 21);
}

TEST_CASE("children partition the parent") {
  Geometry g = g1(3);
  Cube root = Cube::whole_domain(g);
  auto kids = root.children();
  CHECK(kids.size() == 2);
  std::vector<std::size_t> all;
  for (const Cube& k : kids) {
    CHECK(k.parent().same_box(root));
    for (std::size_t c : k.cells()) all.push_back(c);
  }
  std::sort(all.begin(), all.end());
  CHECK(all == root.cells());
  CHECK(root.depth() == 0);
  CHECK(kids[0].depth() == 1);
}

TEST_CASE("restrict and erase partition f") {
  Geometry g = g1(3);
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i) - 3.0;
  Cube q = Cube::dyadic_cube(g, 1, {1, 0});
  GridFunction in = restrict_to(f, q), out = erase_on(f, q);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(in[i] + out[i] == doctest::Approx(f[i]));
    if (q.contains_cell(i))
      CHECK(out[i] == 0.0);
    else
      CHECK(in[i] == 0.0);
  }
}

TEST_CASE("cell sets round-trip masks") {
  Geometry g = g1(3);
  std::vector<std::uint8_t> mask(g.cell_count(), 0);
  mask[1] = mask[5] = mask[6] = 1;
  CellSet s = CellSet::from_mask(g, mask);
  CHECK(s.size() == 3);
  CHECK(s.contains(5));
  CHECK_FALSE(s.contains(2));
  CHECK(s.measure() == doctest::Approx(3.0 / 8.0));
  CHECK(s.mask() == mask);
  CellSet cube_set = CellSet::from_cube(Cube::dyadic_cube(g, 1, {0, 0}));
  CHECK(cube_set.size() == 4);
}

TEST_CASE("dim 2 row-major cube cells") {
  Geometry g{2, 2, false};
  Cube q = Cube::dyadic_cube(g, 1, {1, 1}); // upper-right quadrant
  auto cells = q.cells();
  std::set<std::size_t> got(cells.begin(), cells.end());
  CHECK(got == std::set<std::size_t>{10, 11, 14, 15});
}

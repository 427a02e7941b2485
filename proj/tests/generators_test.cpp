#include "doctest.h"

#include "wsi/generators.hpp"

#include <cmath>
#include <stdexcept>

using namespace wsi;

TEST_CASE("spec parsing round trip") {
  for (const char* name : {"one_cell", "random_sign", "haar_like", "smooth_bump", "mix"}) {
    auto spec = FunctionSpec::parse(name);
    CHECK(spec.label() == name);
  }
  CHECK_THROWS_AS(FunctionSpec::parse("sawtooth"), std::invalid_argument);
}

TEST_CASE("same seed pins the function") {
  Geometry g{1, 5, true};
  for (const char* name : {"one_cell", "random_sign", "haar_like", "smooth_bump", "mix"}) {
    Rng a(123), b(123), c(124);
    auto spec = FunctionSpec::parse(name);
    auto fa = generate(spec, g, a);
    auto fb = generate(spec, g, b);
    auto fc = generate(spec, g, c);
    bool differs = false;
    for (std::size_t i = 0; i < fa.size(); ++i) {
      CHECK(fa[i] == fb[i]);
      differs = differs || fa[i] != fc[i];
    }
    CHECK(differs);
  }
}

TEST_CASE("one cell has unit integral") {
  Geometry g{1, 4, false};
  Rng rng(9);
  auto f = generate(FunctionSpec::parse("one_cell"), g, rng);
  int nonzero = 0;
  double integral = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] != 0.0) ++nonzero;
    integral += f[i];
  }
  CHECK(nonzero == 1);
  CHECK(integral * g.cell_measure() == doctest::Approx(1.0));
}

TEST_CASE("random sign is plus or minus one everywhere") {
  Geometry g{2, 3, false};
  Rng rng(10);
  auto f = generate(FunctionSpec::parse("random_sign"), g, rng);
  int plus = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::fabs(f[i]) == 1.0);
    if (f[i] > 0) ++plus;
  }
  CHECK(plus > 0);
  CHECK(plus < static_cast<int>(f.size()));
}

TEST_CASE("haar profile has zero mean") {
  for (int dim : {1, 2}) {
    Geometry g{dim, 4, false};
    for (int rep = 0; rep < 20; ++rep) {
      Rng rng(static_cast<std::uint64_t>(100 + rep));
      auto f = generate(FunctionSpec::parse("haar_like"), g, rng);
      double s = 0.0, a = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        s += f[i];
        a += std::fabs(f[i]);
      }
      CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(a > 0.0);
    }
  }
}

TEST_CASE("bump is positive and bounded") {
  Geometry g{1, 6, true};
  Rng rng(11);
  auto f = generate(FunctionSpec::parse("smooth_bump"), g, rng);
  double mx = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f[i] >= 0.0);
    mx = std::max(mx, f[i]);
  }
  // some midpoint falls within half a cell of the center
  CHECK(mx > 0.95);
  CHECK(mx <= 1.0 + 1e-12);
}

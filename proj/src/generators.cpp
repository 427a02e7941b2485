#include "wsi/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace wsi {

FunctionSpec FunctionSpec::parse(const std::string& text) {
  FunctionSpec s;
  if (text == "one_cell") s.kind = Kind::one_cell;
  else if (text == "random_sign") s.kind = Kind::random_sign;
  else if (text == "haar_like") s.kind = Kind::haar_like;
  else if (text == "smooth_bump") s.kind = Kind::smooth_bump;
  else if (text == "mix") s.kind = Kind::mix;
  else throw std::invalid_argument("unknown function kind: " + text);
  return s;
}

std::string FunctionSpec::label() const {
  switch (kind) {
    case Kind::one_cell: return "one_cell";
    case Kind::random_sign: return "random_sign";
    case Kind::haar_like: return "haar_like";
    case Kind::smooth_bump: return "smooth_bump";
    case Kind::mix: return "mix";
  }
  return "?";
}

namespace {

GridFunction make_one_cell(Geometry g, Rng& rng, double scale) {
  GridFunction f(g);
  const std::size_t cell = rng.below(g.cell_count());
  f[cell] = scale * static_cast<double>(g.cell_count());
  return f;
}

GridFunction make_random_sign(Geometry g, Rng& rng) {
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.sign();
  return f;
}

GridFunction make_haar(Geometry g, Rng& rng, double scale) {
  GridFunction f(g);
  if (g.level < 1) {
    // no splittable cube on a single-cell grid; fall back to a signed cell
    const std::size_t cell = rng.below(g.cell_count());
    f[cell] = scale * rng.sign();
    return f;
  }
  // pick a dyadic cube of side >= 2 cells, split it along a random axis
  const int depth = static_cast<int>(rng.below(static_cast<std::size_t>(g.level)));
  const std::size_t per_axis = std::size_t{1} << depth;
  std::array<int, 2> idx{0, 0};
  for (int axis = 0; axis < g.dim; ++axis)
    idx[axis] = static_cast<int>(rng.below(per_axis));
  const Cube q = Cube::dyadic_cube(g, depth, idx);
  const int axis = (g.dim == 1) ? 0 : static_cast<int>(rng.below(2));
  const double amp = scale * rng.uniform(0.5, 2.0) * rng.sign();
  const std::size_t half = q.side_cells() / 2;
  const std::size_t side = static_cast<std::size_t>(g.cells_per_axis());
  q.for_each_cell([&](std::size_t cell) {
    const std::size_t along = (axis == 0) ? cell % side : cell / side;
    f[cell] += (along - static_cast<std::size_t>(q.offset[axis]) < half) ? amp : -amp;
  });
  return f;
}

GridFunction make_bump(Geometry g, Rng& rng, double scale) {
  GridFunction f(g);
  double center[2] = {rng.uniform(), rng.uniform()};
  const double sigma = rng.uniform(0.05, 0.2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double d2 = 0.0;
    for (int axis = 0; axis < g.dim; ++axis) {
      double d = std::fabs(g.midpoint(f.coord(i, axis)) - center[axis]);
      if (g.periodic && d > 0.5) d = 1.0 - d;
      d2 += d * d;
    }
    f[i] = scale * std::exp(-d2 / (2.0 * sigma * sigma));
  }
  return f;
}

} // namespace

GridFunction generate(const FunctionSpec& spec, Geometry g, Rng& rng) {
  switch (spec.kind) {
    case FunctionSpec::Kind::one_cell: return make_one_cell(g, rng, 1.0);
    case FunctionSpec::Kind::random_sign: return make_random_sign(g, rng);
    case FunctionSpec::Kind::haar_like: return make_haar(g, rng, 1.0);
    case FunctionSpec::Kind::smooth_bump: return make_bump(g, rng, 1.0);
    case FunctionSpec::Kind::mix: {
      GridFunction f = make_bump(g, rng, 0.5);
      for (int rep = 0; rep < 2; ++rep) {
        GridFunction h = make_haar(g, rng, 1.0);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += h[i];
      }
      GridFunction c = make_one_cell(g, rng, 0.1);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] += c[i];
      return f;
    }
  }
  return GridFunction(g);
}

} // namespace wsi

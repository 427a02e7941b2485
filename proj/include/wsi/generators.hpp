#pragma once

#include "wsi/common.hpp"
#include "wsi/grid.hpp"

#include <string>

namespace wsi {

// Random test inputs. All draws come from the supplied Rng in a fixed order,
// so a seed pins the function exactly.
struct FunctionSpec {
  enum class Kind : unsigned char { one_cell, random_sign, haar_like, smooth_bump, mix };
  Kind kind = Kind::one_cell;

  static FunctionSpec parse(const std::string& text);
  std::string label() const;
};

// one_cell:    cell_count at one random cell (unit integral)
// random_sign: independent +-1 per cell
// haar_like:   random splittable dyadic cube, +A on the low half, -A on the
//              high half along a random axis, A in [0.5, 2]
// smooth_bump: gaussian exp(-|x-c|^2 / (2 sigma^2)), random center,
//              sigma in [0.05, 0.2], min-image distance when periodic
// mix:         0.5 bump + two haars + 0.1 one_cell
GridFunction generate(const FunctionSpec& spec, Geometry g, Rng& rng);

} // namespace wsi

#pragma once

#include "wsi/grid.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wsi {

struct CZOptions {
  double s = 2.0;           // t_Q = ell(Q)^s
  bool mean_zero = false;   // bad parts (f - <f>_Q) chi_Q; default plain f chi_Q
  std::optional<Cube> root; // default whole domain
  bool build_parts = true;  // skip good/bad assembly when only cubes are needed
};

// Stopping-time decomposition of |f| at level lambda: maximal dyadic cubes
// with <|f|>_Q > lambda, descending from the root (the root itself is
// selectable). f = good + sum of bad parts exactly.
struct CZResult {
  double lambda = 0.0;
  Cube root;
  std::vector<Cube> cubes;
  std::vector<double> t_values; // ell(Q)^s per cube
  GridFunction good;
  std::vector<GridFunction> bad;
};

CZResult cz_decompose(const GridFunction& f, double lambda, const CZOptions& opt = {});

// selection only: the maximal dyadic subcubes of root with <|f|>_Q > lambda
std::vector<Cube> cz_select(const GridFunction& f, double lambda, const Cube& root);

// Whitney decomposition of an open set: dyadic cubes with
// 5R <= dist(Q, complement) / diam(Q) <= 15R, where dist is the min sup-norm
// midpoint distance from cells of Q to cells off omega, and diam = sqrt(n)
// ell(Q). Cubes whose band has no dyadic scale at this grid resolution are
// emitted as unit cells with the floored flag set.
struct WhitneyResult {
  CellSet omega;
  double R = 0.0;
  std::vector<Cube> cubes;
  std::vector<std::uint8_t> floored; // per cube
  std::vector<double> ratios;        // dist/diam per cube
  double max_overlap = 0.0;          // max over omega cells of sum chi_{R Q_j}
};

WhitneyResult whitney_decompose(const CellSet& omega, double R);

// smallest level at which the [5R, 15R] band is realizable for interior boxes
int whitney_min_level(double R, int dim);

// sup-norm distance to the complement of omega, in cell units (0 off omega)
std::vector<int> chebyshev_distance_field(const CellSet& omega);

} // namespace wsi

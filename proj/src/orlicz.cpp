#include "wsi/orlicz.hpp"

#include <algorithm>
#include <stdexcept>

namespace wsi {

namespace {

double mean_phi(std::span<const double> vals, double lambda, double beta) {
  double s = 0.0;
  for (double v : vals) s += llog_phi(v / lambda, beta);
  return s / static_cast<double>(vals.size());
}

} // namespace

double luxemburg_norm_values(std::span<const double> abs_vals, double beta) {
  if (beta < 0.0) throw std::invalid_argument("luxemburg_norm: beta must be >= 0");
  if (abs_vals.empty()) throw std::invalid_argument("luxemburg_norm: empty cube");
  double sup = 0.0, mean = 0.0;
  for (double v : abs_vals) {
    sup = std::max(sup, v);
    mean += v;
  }
  mean /= static_cast<double>(abs_vals.size());
  if (sup == 0.0) return 0.0;
  if (beta == 0.0) return mean; // phi is the identity, the inf is the average

  double hi = sup * (beta + 2.0);
  while (mean_phi(abs_vals, hi, beta) > 1.0) hi *= 2.0;
  double lo = 2.2250738585072014e-308;
  // invariant: phi-mean(hi) <= 1 < phi-mean(lo); the returned endpoint stays feasible
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (mean_phi(abs_vals, mid, beta) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double power_average_values(std::span<const double> abs_vals, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("power_average: r must be > 0");
  if (abs_vals.empty()) throw std::invalid_argument("power_average: empty cube");
  double s = 0.0;
  if (r == 1.0) {
    for (double v : abs_vals) s += v;
    return s / static_cast<double>(abs_vals.size());
  }
  for (double v : abs_vals) s += std::pow(v, r);
  return std::pow(s / static_cast<double>(abs_vals.size()), 1.0 / r);
}

namespace {

thread_local std::vector<double> scratch;

std::span<const double> abs_values_on(const GridFunction& g, const Cube& q) {
  scratch.clear();
  scratch.reserve(static_cast<std::size_t>(q.cell_count()));
  q.for_each_cell([&](std::size_t c) { scratch.push_back(std::fabs(g[c])); });
  return scratch;
}

} // namespace

double luxemburg_norm(const GridFunction& g, const Cube& q, double beta) {
  if (!(g.geometry() == q.geom))
    throw std::invalid_argument("luxemburg_norm: geometry mismatch");
  if (!q.in_range()) throw std::out_of_range("luxemburg_norm: cube out of range");
  return luxemburg_norm_values(abs_values_on(g, q), beta);
}

double power_average(const GridFunction& g, const Cube& q, double r) {
  if (!(g.geometry() == q.geom))
    throw std::invalid_argument("power_average: geometry mismatch");
  if (!q.in_range()) throw std::out_of_range("power_average: cube out of range");
  return power_average_values(abs_values_on(g, q), r);
}

} // namespace wsi

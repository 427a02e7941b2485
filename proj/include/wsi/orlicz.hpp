#pragma once

#include "wsi/grid.hpp"

#include <cmath>

namespace wsi {

// integrand t -> t*log^beta(e + t) of the L(log L)^beta scale; natural log
inline double llog_phi(double t, double beta) {
  if (t <= 0.0) return 0.0;
  if (beta == 0.0) return t;
  return t * std::pow(std::log(2.718281828459045235360287 + t), beta);
}

// Luxemburg norm inf{ lambda>0 : |Q|^-1 int_Q phi(|g|/lambda) <= 1 } on the
// normalized measure, solved by bracketing + bisection to 1e-10 relative.
// beta = 0 collapses to the plain average.
double luxemburg_norm(const GridFunction& g, const Cube& q, double beta);

// ( |Q|^-1 int_Q |g|^r )^(1/r), r > 0
double power_average(const GridFunction& g, const Cube& q, double r);

// value-span versions used by hot loops
double luxemburg_norm_values(std::span<const double> abs_vals, double beta);
double power_average_values(std::span<const double> abs_vals, double r);

// A local cube functional: either the L(log L)^beta Luxemburg norm or the
// L^r average. The degenerate luxemburg(0) and power(1) both equal the
// plain average.
struct LocalFunctional {
  enum class Kind : unsigned char { luxemburg, power } kind = Kind::power;
  double param = 1.0; // beta for luxemburg, r for power

  static LocalFunctional Luxemburg(double beta) { return {Kind::luxemburg, beta}; }
  static LocalFunctional Power(double r) { return {Kind::power, r}; }

  double eval(const GridFunction& g, const Cube& q) const {
    return kind == Kind::luxemburg ? luxemburg_norm(g, q, param) : power_average(g, q, param);
  }
  double eval_values(std::span<const double> abs_vals) const {
    return kind == Kind::luxemburg ? luxemburg_norm_values(abs_vals, param)
                                   : power_average_values(abs_vals, param);
  }
};

} // namespace wsi

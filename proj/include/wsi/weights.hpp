#pragma once

#include "wsi/grid.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace wsi {

struct WeightSpec {
  enum class Kind : unsigned char { constant, power, explicit_values };
  Kind kind = Kind::constant;
  double value = 1.0;    // constant
  double exponent = 0.0; // power: |x - center|^exponent at midpoints
  double center = 0.5;
  std::vector<double> values;

  // "constant:2" | "power:-0.4" | "power:-0.4@0.3" | "values:1,2,0.5,4"
  static WeightSpec parse(const std::string& text);
  std::string label() const;
};

GridFunction build_weight_values(const WeightSpec& spec, Geometry g);

// Strictly positive weight with cached constants. The cube family fixes
// every sup: all grid-aligned intervals (dim 1) / all power-of-two-side
// squares (dim 2) by default.
class Weight {
public:
  explicit Weight(GridFunction w, CubeFamily family = CubeFamily::all, bool floor = true);

  const GridFunction& values() const { return w_; }
  const Geometry& geometry() const { return w_.geometry(); }
  CubeFamily family() const { return family_; }
  double operator[](std::size_t i) const { return w_[i]; }

  // sup_Q <w>_Q <w^(-1/(p-1))>_Q^(p-1); p = 1 routes to a1()
  double ap(double p) const;
  // sup over cells of Mw/w, M on the same family
  double a1() const;
  // Fujii-Wilson: sup_Q (int_Q w)^-1 int_Q M(w chi_Q); the inner maximal runs
  // over intervals inside Q (dim 1) / dyadic squares (dim 2)
  double ainf() const;
  // sigma = w^(-1/(p-1)), same family, not floored (exact duality)
  Weight dual(double p) const;

private:
  GridFunction w_;
  CubeFamily family_;
  struct Cache {
    std::mutex mu;
    std::map<double, double> ap;
    std::map<std::string, double> scalar;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// (int |f|^p w dx)^(1/p)
double weighted_norm(const GridFunction& f, const Weight& w, double p);
// w({x : |f(x)| > lambda})
double superlevel_measure(const GridFunction& f, const Weight& w, double lambda);

} // namespace wsi

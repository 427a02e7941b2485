#pragma once

#include "wsi/grid.hpp"
#include "wsi/kernels.hpp"
#include "wsi/orlicz.hpp"

#include <span>
#include <vector>

namespace wsi {

struct MaximalSpec {
  LocalFunctional functional = LocalFunctional::Power(1.0);
  CubeFamily family = CubeFamily::dyadic;
};

// per cell x: max over cubes Q of the family with Q containing x of the
// local functional of f on Q
GridFunction maximal(const GridFunction& f, const MaximalSpec& spec);

// max average over subintervals containing each position, O(len^2); the
// workhorse behind the all-interval maximal and the A_infty inner loop
std::vector<double> interval_max_average(std::span<const double> vals);

// dyadic subcubes of a dyadic root, root included
std::vector<Cube> dyadic_subcubes(const Cube& root);

// sup over dyadic Q containing x of max_{xi in Q} |T(f zeroed on 3Q)(xi)|
GridFunction grand_maximal(const KernelOperator& T, const GridFunction& f);

// star_k:        max_{xi in Q} M_lux(k)[T1(f zeroed on 9Q)](xi)
// double_star:   max_{xi in Q} |T1(chi_{off 9Q} T2(f zeroed on 27Q))(xi)|
// double_star_m: max_{xi in Q} M[T1(chi_{off 9Q} T2(f zeroed on 27Q))](xi)
// all with the outer sup over dyadic Q containing x; the inner M runs on the
// dyadic family
enum class CompositeGrandVariant : unsigned char { star_k, double_star, double_star_m };
GridFunction grand_maximal_composite(const KernelOperator& T1, const KernelOperator& T2,
                                     const GridFunction& f, CompositeGrandVariant variant,
                                     int k = 1);

// single-operator star variant: sup_{Q ni x} max_{xi in Q} V[T(f zeroed on
// 9Q)](xi) with V the L(log L)^k dyadic maximal
GridFunction grand_maximal_star(const KernelOperator& T, const GridFunction& f, int k);

// sup over dyadic Q containing x of |Q|^-1 int_Q M[T1(chi_{9Q} T2(f zeroed
// on 27Q))] |g|
GridFunction bisublinear_grand_maximal(const KernelOperator& T1, const KernelOperator& T2,
                                       const GridFunction& f, const GridFunction& g);

} // namespace wsi

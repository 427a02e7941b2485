#pragma once

#include "wsi/grid.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace wsi {

// Built-in singular kernels plus a raw-matrix escape hatch.
struct OperatorSpec {
  enum class Kind : unsigned char { hilbert, riesz2d, rough, matrix_file };
  Kind kind = Kind::hilbert;
  int axis = 0;                  // riesz2d component
  std::vector<double> omega;     // rough: dim 1 {w+, w-}; dim 2 table over angles
  std::string path;              // matrix_file

  std::string label() const;
  // "hilbert" | "riesz2d:AXIS" | "rough:w+,w-,..." | "file:PATH"
  static OperatorSpec parse(const std::string& text);
};

// Discrete singular integral operator: (Tf)_i = sum_j M[i][j] f_j with
// M[i][j] = K(x_i, x_j) * cell measure and a zero diagonal (the off-diagonal
// sum is the principal-value quadrature on the grid). Translation-invariant
// kernels in dimension 1 are stored as a displacement profile instead of a
// dense matrix; entries are identical either way.
class KernelOperator {
public:
  static KernelOperator dense(Geometry g, std::vector<double> mat, std::string label);
  static KernelOperator toeplitz(Geometry g, std::vector<double> profile, std::string label);

  KernelOperator() = default;
  KernelOperator(KernelOperator&&) = default;
  KernelOperator& operator=(KernelOperator&&) = default;
  // copies share nothing; the norm cache is carried over, the guard is fresh
  KernelOperator(const KernelOperator& o)
      : geom_(o.geom_), mat_(o.mat_), prof_(o.prof_), label_(o.label_), norm_(o.norm_) {}
  KernelOperator& operator=(const KernelOperator& o) {
    if (this != &o) {
      geom_ = o.geom_;
      mat_ = o.mat_;
      prof_ = o.prof_;
      label_ = o.label_;
      norm_ = o.norm_;
    }
    return *this;
  }

  const Geometry& geometry() const { return geom_; }
  const std::string& label() const { return label_; }
  bool has_profile() const { return !prof_.empty(); }
  const std::vector<double>& profile() const { return prof_; }

  // operator-matrix entry, cell measure included
  double entry(std::size_t i, std::size_t j) const {
    if (!prof_.empty())
      return prof_[static_cast<std::size_t>(static_cast<long long>(i) - static_cast<long long>(j) +
                                            geom_.cells_per_axis() - 1)];
    return mat_[i * geom_.cell_count() + j];
  }
  double kernel_value(std::size_t i, std::size_t j) const {
    return entry(i, j) / geom_.cell_measure();
  }

  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_adjoint(const GridFunction& f) const;
  double row_dot(std::size_t row, const GridFunction& f) const;

  // power iteration on T*T, fixed 50 iterations, seeded; cached
  double l2_norm() const;

private:
  Geometry geom_;
  std::vector<double> mat_;  // dense path
  std::vector<double> prof_; // toeplitz path, size 2N-1, index d+N-1
  std::string label_;
  mutable std::optional<double> norm_;
  mutable std::unique_ptr<std::mutex> norm_mu_ = std::make_unique<std::mutex>();
};

KernelOperator make_operator(const OperatorSpec& spec, Geometry g);

// sup over the realizable truncations of |T_eps f|; the truncation grid is
// the set of distinct pairwise midpoint distances
GridFunction apply_truncated_maximal(const KernelOperator& T, const GridFunction& f);

// Heat-kernel approximation to the identity a_t(x,y) =
// (4 pi t)^(-n/2) exp(-|x-y|^2 / 4t), s = 2, with the envelope
// h(r) = (4 pi)^(-n/2) exp(-r^2/4). Periodic grids wrap the kernel.
struct AtIFamily {
  double s = 2.0;
  double alpha = 1.0;
  double c1 = 2.0;
  double c2 = 2.0;
  double eta = 1.0;

  double envelope(double r, int dim) const;
  // per-axis midpoint-displacement profile of the kernel value (no measure),
  // size 2N-1, index d+N-1; wrapped when periodic
  std::vector<double> axis_profile(Geometry g, double t) const;
  // profile including cell measure (dimension 1 only)
  std::vector<double> operator_profile(Geometry g, double t) const;
  KernelOperator matrix(Geometry g, double t) const;

  bool under_resolved(Geometry g, double t) const {
    return std::pow(t, 1.0 / s) < 2.0 * g.cell_width();
  }
  // max over rows of (1 - row sum): kernel mass lost off-domain
  double mass_defect(Geometry g, double t) const;
  // sup over pairs of |a_t| / (t^(-n/s) h(|x-y|/t^(1/s))); 1 for the built-in
  // heat family on non-periodic grids, reported (not asserted) when wrapping
  double envelope_ratio(Geometry g, double t) const;
};

enum class CompositeSide : unsigned char { TA, DT }; // K_t = K*A_t, K^t = A_t*K

// Kernel of the composite operator (matrix product, exact on the grid).
struct CompositeKernel {
  Geometry geom;
  std::vector<double> mat; // dense, measure convention as KernelOperator
  double entry(std::size_t i, std::size_t j) const { return mat[i * geom.cell_count() + j]; }
  double kernel_value(std::size_t i, std::size_t j) const {
    return entry(i, j) / geom.cell_measure();
  }
};

CompositeKernel composite_TA(const KernelOperator& T, const AtIFamily& F, double t);
CompositeKernel composite_DT(const KernelOperator& T, const AtIFamily& F, double t);

struct AssumptionReport {
  double value = 0.0;    // a1.0: sup over y of the far-field L1 integral;
                         // pointwise checks: sup of |K-K^+-t| |x-y|^(n+alpha) / t^(alpha/s)
  double size_sup = 0.0; // pointwise checks: sup near of |composite| * t^(n/s)
  double threshold = 0.0;
  bool under_resolved = false;
};

// a1.0: sup_y int_{|x-y| >= c1 t^(1/s)} |K(x,y) - K_t(x,y)| dx
AssumptionReport check_assumption_L1(const KernelOperator& T, const AtIFamily& F, double t);

// a1.1 (side DT, kernel K^t) and a1.2 (side TA, kernel K_t): Holder-type sup
// over |x-y| >= c2 t^(1/s), plus the size sup over |x-y| <= c2 t^(1/s)
AssumptionReport check_assumption_pointwise(const KernelOperator& T, const AtIFamily& F,
                                            double t, CompositeSide side);

// default sweep {4^-k : k = 1 .. level-2}
std::vector<double> default_t_sweep(Geometry g);

} // namespace wsi

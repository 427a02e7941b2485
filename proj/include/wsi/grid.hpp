#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsi {

// Uniform grid on [0,1)^dim with 2^level cells per axis. Cell midpoints are
// the sample points for every function and kernel in the toolkit.
struct Geometry {
  int dim = 1;
  int level = 0;
  bool periodic = false;

  int cells_per_axis() const { return 1 << level; }
  std::size_t cell_count() const {
    const std::size_t n = static_cast<std::size_t>(cells_per_axis());
    return dim == 1 ? n : n * n;
  }
  double cell_width() const { return 1.0 / cells_per_axis(); }
  double cell_measure() const {
    const double w = cell_width();
    return dim == 1 ? w : w * w;
  }
  double midpoint(int cell_coord) const { return (cell_coord + 0.5) * cell_width(); }

  void validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Geometry: dim must be 1 or 2");
    if (level < 0 || level > 14) throw std::invalid_argument("Geometry: level out of range");
  }

  bool operator==(const Geometry&) const = default;
};

inline void check_geometry(const Geometry& a, const Geometry& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": geometry mismatch");
}

// Scalar samples at cell midpoints, row-major (index = y*n + x for dim 2).
class GridFunction {
public:
  GridFunction() = default;
  explicit GridFunction(Geometry g, double fill = 0.0) : geom_(g), v_(g.cell_count(), fill) {
    geom_.validate();
  }
  GridFunction(Geometry g, std::vector<double> vals) : geom_(g), v_(std::move(vals)) {
    geom_.validate();
    if (v_.size() != geom_.cell_count())
      throw std::invalid_argument("GridFunction: value count does not match geometry");
  }

  const Geometry& geometry() const { return geom_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& data() { return v_; }
  const std::vector<double>& data() const { return v_; }

  int coord(std::size_t idx, int axis) const {
    const int n = geom_.cells_per_axis();
    if (geom_.dim == 1) return static_cast<int>(idx);
    return axis == 0 ? static_cast<int>(idx) % n : static_cast<int>(idx) / n;
  }

  double integral() const;
  double sup_abs() const;

private:
  Geometry geom_;
  std::vector<double> v_;
};

enum class DilationMode : unsigned char { none, clipped, wrapped };

// Axis-aligned box in cell units. Proper cubes have equal extents; clipping a
// dilated cube at the domain boundary may leave a box, which keeps the same
// representation with mode=clipped.
struct Cube {
  Geometry geom;
  std::array<int, 2> offset{0, 0};
  std::array<int, 2> extent{1, 1};
  bool dyadic = false;
  DilationMode mode = DilationMode::none;

  static Cube whole_domain(Geometry g) {
    Cube q;
    q.geom = g;
    q.extent = {g.cells_per_axis(), g.dim == 2 ? g.cells_per_axis() : 1};
    if (g.dim == 1) q.extent[1] = 1;
    q.dyadic = true;
    return q;
  }

  static Cube unit_cell(Geometry g, std::size_t linear) {
    Cube q;
    q.geom = g;
    const int n = g.cells_per_axis();
    if (g.dim == 1) {
      q.offset = {static_cast<int>(linear), 0};
    } else {
      q.offset = {static_cast<int>(linear) % n, static_cast<int>(linear) / n};
    }
    q.dyadic = true;
    return q;
  }

  // depth d has side 2^(level-d) cells; idx counts cubes per axis
  static Cube dyadic_cube(Geometry g, int depth, std::array<int, 2> idx) {
    if (depth < 0 || depth > g.level) throw std::invalid_argument("dyadic_cube: bad depth");
    const int side = 1 << (g.level - depth);
    Cube q;
    q.geom = g;
    q.offset = {idx[0] * side, g.dim == 2 ? idx[1] * side : 0};
    q.extent = {side, g.dim == 2 ? side : 1};
    q.dyadic = true;
    return q;
  }

  int side_cells() const { return std::max(extent[0], geom.dim == 2 ? extent[1] : 0); }
  double side_length() const { return side_cells() * geom.cell_width(); }
  double diameter() const;
  double measure() const {
    double m = extent[0] * geom.cell_width();
    if (geom.dim == 2) m *= extent[1] * geom.cell_width();
    return m;
  }
  long long cell_count() const {
    return static_cast<long long>(extent[0]) * (geom.dim == 2 ? extent[1] : 1);
  }

  // continuum center coordinates
  std::array<double, 2> center() const {
    std::array<double, 2> c{0.0, 0.0};
    for (int a = 0; a < geom.dim; ++a)
      c[a] = (offset[a] + 0.5 * extent[a]) * geom.cell_width();
    return c;
  }

  bool in_range() const {
    const int n = geom.cells_per_axis();
    for (int a = 0; a < geom.dim; ++a) {
      if (extent[a] < 1 || extent[a] > n) return false;
      if (mode == DilationMode::wrapped) {
        if (offset[a] < 0 || offset[a] >= n) return false;
      } else {
        if (offset[a] < 0 || offset[a] + extent[a] > n) return false;
      }
    }
    return true;
  }

  bool contains_cell(std::size_t linear) const {
    const int n = geom.cells_per_axis();
    const int cx = geom.dim == 1 ? static_cast<int>(linear) : static_cast<int>(linear) % n;
    const int cy = geom.dim == 1 ? 0 : static_cast<int>(linear) / n;
    const int c[2] = {cx, cy};
    for (int a = 0; a < geom.dim; ++a) {
      int d = c[a] - offset[a];
      if (mode == DilationMode::wrapped) d = ((d % n) + n) % n;
      if (d < 0 || d >= extent[a]) return false;
    }
    return true;
  }

  // visits linear cell indices; order is axis0-fastest and deterministic
  template <class F>
  void for_each_cell(F&& f) const {
    const int n = geom.cells_per_axis();
    if (geom.dim == 1) {
      for (int i = 0; i < extent[0]; ++i) {
        int c = offset[0] + i;
        if (mode == DilationMode::wrapped) c = ((c % n) + n) % n;
        f(static_cast<std::size_t>(c));
      }
      return;
    }
    for (int j = 0; j < extent[1]; ++j) {
      int cy = offset[1] + j;
      if (mode == DilationMode::wrapped) cy = ((cy % n) + n) % n;
      for (int i = 0; i < extent[0]; ++i) {
        int cx = offset[0] + i;
        if (mode == DilationMode::wrapped) cx = ((cx % n) + n) % n;
        f(static_cast<std::size_t>(cy) * n + cx);
      }
    }
  }

  std::vector<std::size_t> cells() const {
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(cell_count()));
    for_each_cell([&](std::size_t c) { out.push_back(c); });
    return out;
  }

  // dyadic navigation; valid only for dyadic cubes
  int depth() const;
  Cube parent() const;
  std::vector<Cube> children() const;

  bool same_box(const Cube& o) const {
    return offset == o.offset && extent == o.extent && mode == o.mode;
  }
};

// Sorted set of linear cell indices; models open sets and certificate sets.
struct CellSet {
  Geometry geom;
  std::vector<std::uint32_t> cells; // sorted, unique

  static CellSet from_mask(Geometry g, const std::vector<std::uint8_t>& mask);
  static CellSet from_cube(const Cube& q);

  std::size_t size() const { return cells.size(); }
  bool empty() const { return cells.empty(); }
  double measure() const { return static_cast<double>(cells.size()) * geom.cell_measure(); }
  bool contains(std::uint32_t c) const;
  std::vector<std::uint8_t> mask() const;
};

// lambda must be an odd positive integer; clips on non-periodic grids, wraps
// on periodic ones, and records which happened on the result
Cube dilate(const Cube& q, int lambda);

// real-factor dilation realized as the set of cells whose midpoint lies in the
// continuum box; used for the Whitney overlap diagnostic
Cube dilate_real(const Cube& q, double lambda);

double integrate(const GridFunction& f, const Cube& q);
double average(const GridFunction& f, const Cube& q);
double sup_abs_on(const GridFunction& f, const Cube& q);

GridFunction restrict_to(const GridFunction& f, const Cube& q);  // zero outside q
GridFunction erase_on(const GridFunction& f, const Cube& q);     // zero inside q

enum class CubeFamily : unsigned char { dyadic, all };

// dyadic: all dyadic cubes, depths 0..level.
// all, dim 1: every grid-aligned interval.
// all, dim 2: every grid-aligned square with power-of-two side, all offsets.
std::vector<Cube> enumerate_cubes(Geometry g, CubeFamily family);

} // namespace wsi

#include "wsi/grid.hpp"
#include "wsi/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wsi {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double GridFunction::integral() const {
  double s = 0.0;
  for (double x : v_) s += x;
  return s * geom_.cell_measure();
}

double GridFunction::sup_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::fabs(x));
  return m;
}

double Cube::diameter() const {
  if (geom.dim == 1) return extent[0] * geom.cell_width();
  const double a = extent[0] * geom.cell_width();
  const double b = extent[1] * geom.cell_width();
  return std::sqrt(a * a + b * b);
}

int Cube::depth() const {
  if (!dyadic) throw std::logic_error("Cube::depth: not a dyadic cube");
  int side = extent[0];
  int d = geom.level;
  while (side > 1) {
    side >>= 1;
    --d;
  }
  return d;
}

Cube Cube::parent() const {
  const int d = depth();
  if (d == 0) throw std::logic_error("Cube::parent: root has no parent");
  const int side = extent[0];
  Cube p = *this;
  for (int a = 0; a < geom.dim; ++a) {
    p.offset[a] = (offset[a] / (2 * side)) * (2 * side);
    p.extent[a] = 2 * side;
  }
  return p;
}

std::vector<Cube> Cube::children() const {
  if (!dyadic) throw std::logic_error("Cube::children: not a dyadic cube");
  if (extent[0] == 1) return {};
  const int h = extent[0] / 2;
  std::vector<Cube> out;
  const int splits = geom.dim == 1 ? 2 : 4;
  for (int k = 0; k < splits; ++k) {
    Cube c = *this;
    c.extent = {h, geom.dim == 2 ? h : 1};
    c.offset[0] = offset[0] + (k & 1) * h;
    if (geom.dim == 2) c.offset[1] = offset[1] + ((k >> 1) & 1) * h;
    out.push_back(c);
  }
  return out;
}

CellSet CellSet::from_mask(Geometry g, const std::vector<std::uint8_t>& mask) {
  if (mask.size() != g.cell_count())
    throw std::invalid_argument("CellSet::from_mask: size mismatch");
  CellSet s;
  s.geom = g;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.cells.push_back(static_cast<std::uint32_t>(i));
  return s;
}

CellSet CellSet::from_cube(const Cube& q) {
  CellSet s;
  s.geom = q.geom;
  q.for_each_cell([&](std::size_t c) { s.cells.push_back(static_cast<std::uint32_t>(c)); });
  std::sort(s.cells.begin(), s.cells.end());
  return s;
}

bool CellSet::contains(std::uint32_t c) const {
  return std::binary_search(cells.begin(), cells.end(), c);
}

std::vector<std::uint8_t> CellSet::mask() const {
  std::vector<std::uint8_t> m(geom.cell_count(), 0);
  for (auto c : cells) m[c] = 1;
  return m;
}

Cube dilate(const Cube& q, int lambda) {
  if (lambda < 1 || lambda % 2 == 0)
    throw std::invalid_argument("dilate: lambda must be an odd positive integer");
  const int n = q.geom.cells_per_axis();
  Cube r = q;
  r.dyadic = false;
  for (int a = 0; a < q.geom.dim; ++a) {
    const int grow = (lambda - 1) / 2 * q.extent[a];
    int lo = q.offset[a] - grow;
    int ext = lambda * q.extent[a];
    if (q.geom.periodic) {
      if (ext >= n) {
        lo = 0;
        ext = n;
      } else {
        lo = ((lo % n) + n) % n;
      }
      r.mode = DilationMode::wrapped;
    } else {
      const int hi = std::min(lo + ext, n);
      lo = std::max(lo, 0);
      ext = hi - lo;
      r.mode = DilationMode::clipped;
    }
    r.offset[a] = lo;
    r.extent[a] = ext;
  }
  return r;
}

Cube dilate_real(const Cube& q, double lambda) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("dilate_real: lambda must be >= 1");
  const int n = q.geom.cells_per_axis();
  Cube r = q;
  r.dyadic = false;
  for (int a = 0; a < q.geom.dim; ++a) {
    // cell i belongs iff |2i+1 - (2*off+ext)| <= lambda*ext, in half-cell units
    const double c2 = 2.0 * q.offset[a] + q.extent[a];
    const double h = lambda * q.extent[a];
    int lo = static_cast<int>(std::ceil((c2 - h - 1.0) / 2.0));
    int hi = static_cast<int>(std::floor((c2 + h - 1.0) / 2.0));
    int ext = hi - lo + 1;
    if (q.geom.periodic) {
      if (ext >= n) {
        lo = 0;
        ext = n;
      } else {
        lo = ((lo % n) + n) % n;
      }
      r.mode = DilationMode::wrapped;
    } else {
      const int top = std::min(lo + ext, n);
      lo = std::max(lo, 0);
      ext = top - lo;
      r.mode = DilationMode::clipped;
    }
    r.offset[a] = lo;
    r.extent[a] = ext;
  }
  return r;
}

static void check_cube(const GridFunction& f, const Cube& q) {
  if (!(f.geometry() == q.geom))
    throw std::invalid_argument("cube/function geometry mismatch");
  if (!q.in_range()) throw std::out_of_range("cube out of range on non-periodic grid");
}

double integrate(const GridFunction& f, const Cube& q) {
  check_cube(f, q);
  double s = 0.0;
  q.for_each_cell([&](std::size_t c) { s += f[c]; });
  return s * q.geom.cell_measure();
}

double average(const GridFunction& f, const Cube& q) {
  check_cube(f, q);
  double s = 0.0;
  q.for_each_cell([&](std::size_t c) { s += f[c]; });
  return s / static_cast<double>(q.cell_count());
}

double sup_abs_on(const GridFunction& f, const Cube& q) {
  check_cube(f, q);
  double m = 0.0;
  q.for_each_cell([&](std::size_t c) { m = std::max(m, std::fabs(f[c])); });
  return m;
}

GridFunction restrict_to(const GridFunction& f, const Cube& q) {
  check_cube(f, q);
  GridFunction g(f.geometry(), 0.0);
  q.for_each_cell([&](std::size_t c) { g[c] = f[c]; });
  return g;
}

GridFunction erase_on(const GridFunction& f, const Cube& q) {
  check_cube(f, q);
  GridFunction g = f;
  q.for_each_cell([&](std::size_t c) { g[c] = 0.0; });
  return g;
}

std::vector<Cube> enumerate_cubes(Geometry g, CubeFamily family) {
  g.validate();
  std::vector<Cube> out;
  const int n = g.cells_per_axis();
  if (family == CubeFamily::dyadic) {
    for (int d = 0; d <= g.level; ++d) {
      const int count = 1 << d;
      if (g.dim == 1) {
        for (int i = 0; i < count; ++i) out.push_back(Cube::dyadic_cube(g, d, {i, 0}));
      } else {
        for (int j = 0; j < count; ++j)
          for (int i = 0; i < count; ++i) out.push_back(Cube::dyadic_cube(g, d, {i, j}));
      }
    }
    return out;
  }
  if (g.dim == 1) {
    for (int len = 1; len <= n; ++len)
      for (int i = 0; i + len <= n; ++i) {
        Cube q;
        q.geom = g;
        q.offset = {i, 0};
        q.extent = {len, 1};
        q.dyadic = (len & (len - 1)) == 0 && i % len == 0;
        out.push_back(q);
      }
    return out;
  }
  for (int side = 1; side <= n; side <<= 1)
    for (int j = 0; j + side <= n; ++j)
      for (int i = 0; i + side <= n; ++i) {
        Cube q;
        q.geom = g;
        q.offset = {i, j};
        q.extent = {side, side};
        q.dyadic = i % side == 0 && j % side == 0;
        out.push_back(q);
      }
  return out;
}

} // namespace wsi

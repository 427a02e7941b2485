#include "wsi/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wsi {
namespace {

thread_local std::vector<double> gather;

void collect_abs(const GridFunction& f, const Cube& q) {
  gather.clear();
  gather.reserve(static_cast<std::size_t>(q.cell_count()));
  q.for_each_cell([&](std::size_t c) { gather.push_back(std::fabs(f[c])); });
}

GridFunction dyadic_maximal(const GridFunction& f, const LocalFunctional& fn) {
  const Geometry& g = f.geometry();
  GridFunction out(g);
  for (const Cube& q : enumerate_cubes(g, CubeFamily::dyadic)) {
    collect_abs(f, q);
    const double val = fn.eval_values(gather);
    q.for_each_cell([&](std::size_t c) { out[c] = std::max(out[c], val); });
  }
  return out;
}

GridFunction all_1d_power(const GridFunction& f, double r) {
  const std::size_t N = f.size();
  std::vector<double> v(N);
  for (std::size_t i = 0; i < N; ++i)
    v[i] = r == 1.0 ? std::fabs(f[i]) : std::pow(std::fabs(f[i]), r);
  std::vector<double> m = interval_max_average(v);
  GridFunction out(f.geometry());
  for (std::size_t i = 0; i < N; ++i) out[i] = r == 1.0 ? m[i] : std::pow(m[i], 1.0 / r);
  return out;
}

GridFunction all_1d_lux(const GridFunction& f, double beta) {
  const std::size_t N = f.size();
  if (N > 256)
    throw std::invalid_argument(
        "maximal: all-interval Luxemburg maximal is limited to 256 cells; use the dyadic family");
  GridFunction out(f.geometry());
  for (std::size_t i = 0; i < N; ++i) {
    gather.clear();
    for (std::size_t j = i; j < N; ++j) {
      gather.push_back(std::fabs(f[j]));
      const double val = luxemburg_norm_values(gather, beta);
      for (std::size_t c = i; c <= j; ++c) out[c] = std::max(out[c], val);
    }
  }
  return out;
}

struct Prefix2D {
  int n;
  std::vector<double> p; // (n+1) x (n+1)
  explicit Prefix2D(const GridFunction& f, double r) : n(f.geometry().cells_per_axis()) {
    p.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double v = r == 1.0 ? std::fabs(f[static_cast<std::size_t>(y) * n + x])
                                  : std::pow(std::fabs(f[static_cast<std::size_t>(y) * n + x]), r);
        at(x + 1, y + 1) = v + at(x, y + 1) + at(x + 1, y) - at(x, y);
      }
  }
  double& at(int x, int y) { return p[static_cast<std::size_t>(y) * (n + 1) + x]; }
  double rect(int x0, int y0, int x1, int y1) const { // half-open cell ranges
    auto a = [&](int x, int y) { return p[static_cast<std::size_t>(y) * (n + 1) + x]; };
    return a(x1, y1) - a(x0, y1) - a(x1, y0) + a(x0, y0);
  }
};

GridFunction all_2d_power(const GridFunction& f, double r) {
  const Geometry& g = f.geometry();
  const int n = g.cells_per_axis();
  Prefix2D pre(f, r);
  GridFunction out(g);
  for (int s = 1; s <= n; s <<= 1)
    for (int oy = 0; oy + s <= n; ++oy)
      for (int ox = 0; ox + s <= n; ++ox) {
        const double mean = pre.rect(ox, oy, ox + s, oy + s) / (static_cast<double>(s) * s);
        const double val = r == 1.0 ? mean : std::pow(mean, 1.0 / r);
        for (int y = oy; y < oy + s; ++y)
          for (int x = ox; x < ox + s; ++x) {
            double& o = out[static_cast<std::size_t>(y) * n + x];
            o = std::max(o, val);
          }
      }
  return out;
}

GridFunction all_2d_lux(const GridFunction& f, double beta) {
  const Geometry& g = f.geometry();
  const int n = g.cells_per_axis();
  if (n > 64)
    throw std::invalid_argument(
        "maximal: all-square Luxemburg maximal is limited to 64 cells per axis; use dyadic");
  GridFunction out(g);
  for (int s = 1; s <= n; s <<= 1)
    for (int oy = 0; oy + s <= n; ++oy)
      for (int ox = 0; ox + s <= n; ++ox) {
        gather.clear();
        for (int y = oy; y < oy + s; ++y)
          for (int x = ox; x < ox + s; ++x)
            gather.push_back(std::fabs(f[static_cast<std::size_t>(y) * n + x]));
        const double val = luxemburg_norm_values(gather, beta);
        for (int y = oy; y < oy + s; ++y)
          for (int x = ox; x < ox + s; ++x) {
            double& o = out[static_cast<std::size_t>(y) * n + x];
            o = std::max(o, val);
          }
      }
  return out;
}

} // namespace

std::vector<double> interval_max_average(std::span<const double> vals) {
  const std::size_t N = vals.size();
  std::vector<double> pre(N + 1, 0.0);
  for (std::size_t i = 0; i < N; ++i) pre[i + 1] = pre[i] + vals[i];
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    // best[x] = max over right ends e > x of avg(i, e), built right-to-left
    double best = 0.0;
    for (std::size_t x = N; x-- > i;) {
      const double avg = (pre[x + 1] - pre[i]) / static_cast<double>(x + 1 - i);
      best = std::max(best, avg);
      out[x] = std::max(out[x], best);
    }
  }
  return out;
}

GridFunction maximal(const GridFunction& f, const MaximalSpec& spec) {
  if (spec.family == CubeFamily::dyadic) return dyadic_maximal(f, spec.functional);
  if (f.geometry().dim == 1)
    return spec.functional.kind == LocalFunctional::Kind::power
               ? all_1d_power(f, spec.functional.param)
               : all_1d_lux(f, spec.functional.param);
  return spec.functional.kind == LocalFunctional::Kind::power
             ? all_2d_power(f, spec.functional.param)
             : all_2d_lux(f, spec.functional.param);
}

std::vector<Cube> dyadic_subcubes(const Cube& root) {
  if (!root.dyadic) throw std::invalid_argument("dyadic_subcubes: root must be dyadic");
  std::vector<Cube> out{root};
  for (std::size_t head = 0; head < out.size(); ++head)
    for (const Cube& c : out[head].children()) out.push_back(c);
  return out;
}

GridFunction grand_maximal(const KernelOperator& T, const GridFunction& f) {
  check_geometry(T.geometry(), f.geometry(), "grand_maximal");
  const Geometry& g = f.geometry();
  GridFunction out(g);
  for (const Cube& q : enumerate_cubes(g, CubeFamily::dyadic)) {
    GridFunction h = erase_on(f, dilate(q, 3));
    double val = 0.0;
    q.for_each_cell([&](std::size_t xi) { val = std::max(val, std::fabs(T.row_dot(xi, h))); });
    q.for_each_cell([&](std::size_t c) { out[c] = std::max(out[c], val); });
  }
  return out;
}

GridFunction grand_maximal_star(const KernelOperator& T, const GridFunction& f, int k) {
  check_geometry(T.geometry(), f.geometry(), "grand_maximal_star");
  if (k < 0) throw std::invalid_argument("grand_maximal_star: k must be >= 0");
  const Geometry& g = f.geometry();
  const LocalFunctional lux = LocalFunctional::Luxemburg(static_cast<double>(k));
  GridFunction out(g);
  for (const Cube& q : enumerate_cubes(g, CubeFamily::dyadic)) {
    GridFunction u = T.apply(erase_on(f, dilate(q, 9)));
    GridFunction m = dyadic_maximal(u, lux);
    double val = 0.0;
    q.for_each_cell([&](std::size_t xi) { val = std::max(val, m[xi]); });
    q.for_each_cell([&](std::size_t c) { out[c] = std::max(out[c], val); });
  }
  return out;
}

GridFunction grand_maximal_composite(const KernelOperator& T1, const KernelOperator& T2,
                                     const GridFunction& f, CompositeGrandVariant variant,
                                     int k) {
  if (variant == CompositeGrandVariant::star_k) return grand_maximal_star(T1, f, k);
  check_geometry(T1.geometry(), f.geometry(), "grand_maximal_composite");
  check_geometry(T2.geometry(), f.geometry(), "grand_maximal_composite");
  const Geometry& g = f.geometry();
  GridFunction out(g);
  for (const Cube& q : enumerate_cubes(g, CubeFamily::dyadic)) {
    GridFunction v = T2.apply(erase_on(f, dilate(q, 27)));
    GridFunction v9 = erase_on(v, dilate(q, 9));
    double val = 0.0;
    if (variant == CompositeGrandVariant::double_star) {
      q.for_each_cell([&](std::size_t xi) { val = std::max(val, std::fabs(T1.row_dot(xi, v9))); });
    } else {
      GridFunction u = T1.apply(v9);
      GridFunction m = dyadic_maximal(u, LocalFunctional::Power(1.0));
      q.for_each_cell([&](std::size_t xi) { val = std::max(val, m[xi]); });
    }
    q.for_each_cell([&](std::size_t c) { out[c] = std::max(out[c], val); });
  }
  return out;
}

GridFunction bisublinear_grand_maximal(const KernelOperator& T1, const KernelOperator& T2,
                                       const GridFunction& f, const GridFunction& g) {
  check_geometry(T1.geometry(), f.geometry(), "bisublinear_grand_maximal");
  check_geometry(f.geometry(), g.geometry(), "bisublinear_grand_maximal");
  const Geometry& geo = f.geometry();
  GridFunction out(geo);
  for (const Cube& q : enumerate_cubes(geo, CubeFamily::dyadic)) {
    GridFunction v = T2.apply(erase_on(f, dilate(q, 27)));
    GridFunction u = T1.apply(restrict_to(v, dilate(q, 9)));
    GridFunction m = dyadic_maximal(u, LocalFunctional::Power(1.0));
    double sum = 0.0;
    q.for_each_cell([&](std::size_t c) { sum += m[c] * std::fabs(g[c]); });
    const double val = sum / static_cast<double>(q.cell_count());
    q.for_each_cell([&](std::size_t c) { out[c] = std::max(out[c], val); });
  }
  return out;
}

} // namespace wsi

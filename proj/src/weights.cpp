#include "wsi/weights.hpp"

#include "wsi/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace wsi {
namespace {

std::vector<double> prefix_of(const std::vector<double>& v) {
  std::vector<double> p(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = p[i] + v[i];
  return p;
}

// 2D prefix table over a raw row-major array
struct Rect2D {
  int n;
  std::vector<double> p;
  Rect2D(const std::vector<double>& v, int n_) : n(n_) {
    p.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        at(x + 1, y + 1) = v[static_cast<std::size_t>(y) * n + x] + at(x, y + 1) + at(x + 1, y) -
                           at(x, y);
  }
  double& at(int x, int y) { return p[static_cast<std::size_t>(y) * (n + 1) + x]; }
  double sum(int x0, int y0, int x1, int y1) const { // half-open, clamped by caller
    auto a = [&](int x, int y) { return p[static_cast<std::size_t>(y) * (n + 1) + x]; };
    return a(x1, y1) - a(x0, y1) - a(x1, y0) + a(x0, y0);
  }
};

double sup_over_family(const Geometry& g, CubeFamily family, const std::vector<double>& aa,
                       const std::vector<double>& bb, double expo) {
  // max over cubes of <aa>_Q * <bb>_Q^expo
  double best = 0.0;
  if (g.dim == 1) {
    auto pa = prefix_of(aa), pb = prefix_of(bb);
    for (const Cube& q : enumerate_cubes(g, family)) {
      const int i = q.offset[0], e = q.offset[0] + q.extent[0];
      const double len = static_cast<double>(q.extent[0]);
      const double ma = (pa[e] - pa[i]) / len;
      const double mb = (pb[e] - pb[i]) / len;
      best = std::max(best, ma * std::pow(mb, expo));
    }
    return best;
  }
  const int n = g.cells_per_axis();
  Rect2D ra(aa, n), rb(bb, n);
  for (const Cube& q : enumerate_cubes(g, family)) {
    const int x0 = q.offset[0], y0 = q.offset[1];
    const int x1 = x0 + q.extent[0], y1 = y0 + q.extent[1];
    const double cells = static_cast<double>(q.cell_count());
    const double ma = ra.sum(x0, y0, x1, y1) / cells;
    const double mb = rb.sum(x0, y0, x1, y1) / cells;
    best = std::max(best, ma * std::pow(mb, expo));
  }
  return best;
}

} // namespace

WeightSpec WeightSpec::parse(const std::string& text) {
  WeightSpec spec;
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (head == "constant") {
    spec.kind = Kind::constant;
    spec.value = rest.empty() ? 1.0 : std::stod(rest);
    if (!(spec.value > 0.0)) throw std::invalid_argument("constant weight must be positive");
  } else if (head == "power") {
    spec.kind = Kind::power;
    if (rest.empty()) throw std::invalid_argument("power weight needs an exponent, e.g. power:0.5");
    auto amp = rest.find('@');
    spec.exponent = std::stod(rest.substr(0, amp));
    if (amp != std::string::npos) spec.center = std::stod(rest.substr(amp + 1));
  } else if (head == "values") {
    spec.kind = Kind::explicit_values;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) spec.values.push_back(std::stod(tok));
    if (spec.values.empty()) throw std::invalid_argument("values weight needs a list");
  } else {
    throw std::invalid_argument("unknown weight kind: " + head);
  }
  return spec;
}

std::string WeightSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::constant: os << "constant:" << value; break;
    case Kind::power:
      os << "power:" << exponent;
      if (center != 0.5) os << "@" << center;
      break;
    case Kind::explicit_values: os << "values[" << values.size() << "]"; break;
  }
  return os.str();
}

GridFunction build_weight_values(const WeightSpec& spec, Geometry g) {
  g.validate();
  GridFunction w(g, 1.0);
  switch (spec.kind) {
    case WeightSpec::Kind::constant:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = spec.value;
      break;
    case WeightSpec::Kind::power: {
      const int n = g.cells_per_axis();
      for (std::size_t i = 0; i < w.size(); ++i) {
        double d;
        if (g.dim == 1) {
          d = std::fabs(g.midpoint(static_cast<int>(i)) - spec.center);
        } else {
          const double ux = g.midpoint(static_cast<int>(i) % n) - spec.center;
          const double uy = g.midpoint(static_cast<int>(i) / n) - spec.center;
          d = std::sqrt(ux * ux + uy * uy);
        }
        w[i] = std::pow(d, spec.exponent);
      }
      break;
    }
    case WeightSpec::Kind::explicit_values:
      if (spec.values.size() != w.size())
        throw std::invalid_argument("explicit weight length does not match the grid");
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = spec.values[i];
      break;
  }
  return w;
}

Weight::Weight(GridFunction w, CubeFamily family, bool floor) : w_(std::move(w)), family_(family) {
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!std::isfinite(w_[i]) || w_[i] < 0.0)
      throw std::invalid_argument("Weight: values must be finite and nonnegative");
    if (floor) w_[i] = std::max(w_[i], 1e-8);
    if (w_[i] <= 0.0) throw std::invalid_argument("Weight: values must be strictly positive");
  }
}

double Weight::ap(double p) const {
  if (p < 1.0) throw std::invalid_argument("ap_constant: p must be >= 1");
  if (p == 1.0) return a1();
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->ap.find(p);
    if (it != cache_->ap.end()) return it->second;
  }
  const std::size_t N = w_.size();
  std::vector<double> wa(N), sg(N);
  for (std::size_t i = 0; i < N; ++i) {
    wa[i] = w_[i];
    sg[i] = std::pow(w_[i], -1.0 / (p - 1.0));
  }
  const double val = sup_over_family(geometry(), family_, wa, sg, p - 1.0);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->ap[p] = val;
  return val;
}

double Weight::a1() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->scalar.find("a1");
    if (it != cache_->scalar.end()) return it->second;
  }
  GridFunction m = maximal(w_, MaximalSpec{LocalFunctional::Power(1.0), family_});
  double best = 0.0;
  for (std::size_t i = 0; i < w_.size(); ++i) best = std::max(best, m[i] / w_[i]);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->scalar["a1"] = best;
  return best;
}

double Weight::ainf() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->scalar.find("ainf");
    if (it != cache_->scalar.end()) return it->second;
  }
  const Geometry& g = geometry();
  double best = 0.0;
  if (g.dim == 1) {
    std::vector<double> vals;
    for (const Cube& q : enumerate_cubes(g, family_)) {
      vals.clear();
      for (int i = 0; i < q.extent[0]; ++i)
        vals.push_back(w_[static_cast<std::size_t>(q.offset[0] + i)]);
      std::vector<double> m = interval_max_average(vals);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        num += m[i];
        den += vals[i];
      }
      best = std::max(best, num / den);
    }
  } else {
    const int n = g.cells_per_axis();
    Rect2D rw(w_.data(), n);
    for (const Cube& q : enumerate_cubes(g, family_)) {
      const int qx0 = q.offset[0], qy0 = q.offset[1];
      const int qx1 = qx0 + q.extent[0], qy1 = qy0 + q.extent[1];
      double num = 0.0;
      for (int y = qy0; y < qy1; ++y)
        for (int x = qx0; x < qx1; ++x) {
          double mx = 0.0;
          for (int d = 0; d <= g.level; ++d) {
            const int side = 1 << (g.level - d);
            const int sx0 = (x / side) * side, sy0 = (y / side) * side;
            const int ix0 = std::max(sx0, qx0), iy0 = std::max(sy0, qy0);
            const int ix1 = std::min(sx0 + side, qx1), iy1 = std::min(sy0 + side, qy1);
            if (ix0 >= ix1 || iy0 >= iy1) continue;
            const double avg = rw.sum(ix0, iy0, ix1, iy1) /
                               (static_cast<double>(side) * static_cast<double>(side));
            mx = std::max(mx, avg);
          }
          num += mx;
        }
      best = std::max(best, num / rw.sum(qx0, qy0, qx1, qy1));
    }
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->scalar["ainf"] = best;
  return best;
}

Weight Weight::dual(double p) const {
  if (!(p > 1.0)) throw std::invalid_argument("dual_weight: p must be > 1");
  GridFunction s(geometry());
  for (std::size_t i = 0; i < w_.size(); ++i) s[i] = std::pow(w_[i], -1.0 / (p - 1.0));
  return Weight(std::move(s), family_, false);
}

double weighted_norm(const GridFunction& f, const Weight& w, double p) {
  check_geometry(f.geometry(), w.geometry(), "weighted_norm");
  if (!(p > 0.0)) throw std::invalid_argument("weighted_norm: p must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]), p) * w[i];
  return std::pow(s * f.geometry().cell_measure(), 1.0 / p);
}

double superlevel_measure(const GridFunction& f, const Weight& w, double lambda) {
  check_geometry(f.geometry(), w.geometry(), "superlevel_measure");
  if (!(lambda > 0.0)) throw std::invalid_argument("superlevel_measure: lambda must be > 0");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::fabs(f[i]) > lambda) s += w[i];
  return s * f.geometry().cell_measure();
}

} // namespace wsi

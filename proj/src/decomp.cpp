#include "wsi/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace wsi {
namespace {

double abs_average(const GridFunction& f, const Cube& q) {
  double s = 0.0;
  q.for_each_cell([&](std::size_t c) { s += std::fabs(f[c]); });
  return s / static_cast<double>(q.cell_count());
}

void select_rec(const GridFunction& f, double lambda, const Cube& q, std::vector<Cube>& out) {
  if (abs_average(f, q) > lambda) {
    out.push_back(q);
    return;
  }
  for (const Cube& c : q.children()) select_rec(f, lambda, c, out);
}

} // namespace

std::vector<Cube> cz_select(const GridFunction& f, double lambda, const Cube& root) {
  if (!(lambda > 0.0)) throw std::invalid_argument("cz_select: lambda must be > 0");
  if (!root.dyadic) throw std::invalid_argument("cz_select: root must be dyadic");
  check_geometry(f.geometry(), root.geom, "cz_select");
  std::vector<Cube> out;
  select_rec(f, lambda, root, out);
  return out;
}

CZResult cz_decompose(const GridFunction& f, double lambda, const CZOptions& opt) {
  CZResult res;
  res.lambda = lambda;
  res.root = opt.root.value_or(Cube::whole_domain(f.geometry()));
  res.cubes = cz_select(f, lambda, res.root);
  res.t_values.reserve(res.cubes.size());
  for (const Cube& q : res.cubes) res.t_values.push_back(std::pow(q.side_length(), opt.s));
  if (!opt.build_parts) return res;
  res.good = f;
  res.bad.reserve(res.cubes.size());
  for (const Cube& q : res.cubes) {
    GridFunction b(f.geometry());
    if (opt.mean_zero) {
      const double mean = average(f, q);
      q.for_each_cell([&](std::size_t c) {
        b[c] = f[c] - mean;
        res.good[c] = mean;
      });
    } else {
      q.for_each_cell([&](std::size_t c) {
        b[c] = f[c];
        res.good[c] = 0.0;
      });
    }
    res.bad.push_back(std::move(b));
  }
  return res;
}

std::vector<int> chebyshev_distance_field(const CellSet& omega) {
  const Geometry& g = omega.geom;
  const int n = g.cells_per_axis();
  const std::size_t N = g.cell_count();
  std::vector<std::uint8_t> in = omega.mask();
  std::vector<int> dist(N, -1);
  std::deque<std::size_t> queue;
  for (std::size_t c = 0; c < N; ++c)
    if (!in[c]) {
      dist[c] = 0;
      queue.push_back(c);
    }
  if (queue.empty()) throw std::invalid_argument("whitney: omega must not be the whole domain");

  auto push = [&](long long x, long long y, int d) {
    if (g.periodic) {
      x = ((x % n) + n) % n;
      if (g.dim == 2) y = ((y % n) + n) % n;
    } else if (x < 0 || x >= n || (g.dim == 2 && (y < 0 || y >= n))) {
      return;
    }
    const std::size_t c = g.dim == 1 ? static_cast<std::size_t>(x)
                                     : static_cast<std::size_t>(y) * n + static_cast<std::size_t>(x);
    if (dist[c] < 0) {
      dist[c] = d;
      queue.push_back(c);
    }
  };

  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    const int d = dist[c] + 1;
    const long long x = g.dim == 1 ? static_cast<long long>(c)
                                   : static_cast<long long>(c % static_cast<std::size_t>(n));
    const long long y = g.dim == 1 ? 0 : static_cast<long long>(c / static_cast<std::size_t>(n));
    if (g.dim == 1) {
      push(x - 1, 0, d);
      push(x + 1, 0, d);
    } else {
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          push(x + dx, y + dy, d);
        }
    }
  }
  return dist;
}

namespace {

struct WhitneyScan {
  const std::vector<int>& dist;
  double R = 0.0;
  double sqrt_n = 1.0;
  WhitneyResult* res = nullptr;

  int min_dist(const Cube& q) const {
    int m = -1;
    q.for_each_cell([&](std::size_t c) {
      if (m < 0 || dist[c] < m) m = dist[c];
    });
    return m;
  }

  bool meets_omega(const Cube& q) const {
    bool any = false;
    q.for_each_cell([&](std::size_t c) { any = any || dist[c] > 0; });
    return any;
  }

  void descend(const Cube& q) {
    if (!meets_omega(q)) return;
    const int md = min_dist(q);
    const double diam = sqrt_n * q.side_length();
    const double d = md * q.geom.cell_width();
    if (d >= 5.0 * R * diam) { // md >= 1, so q lies inside omega
      res->cubes.push_back(q);
      res->floored.push_back(0);
      res->ratios.push_back(d / diam);
      return;
    }
    if (q.extent[0] == 1) { // in omega, no admissible dyadic scale: floor
      res->cubes.push_back(q);
      res->floored.push_back(1);
      res->ratios.push_back(d / diam);
      return;
    }
    for (const Cube& c : q.children()) descend(c);
  }
};

} // namespace

WhitneyResult whitney_decompose(const CellSet& omega, double R) {
  if (!(R > 1.0)) throw std::invalid_argument("whitney: R must be > 1");
  if (omega.empty()) throw std::invalid_argument("whitney: omega must be nonempty");
  WhitneyResult res;
  res.omega = omega;
  res.R = R;
  std::vector<int> dist = chebyshev_distance_field(omega); // throws when omega is everything
  WhitneyScan scan{dist, R, omega.geom.dim == 2 ? std::sqrt(2.0) : 1.0, &res};
  scan.descend(Cube::whole_domain(omega.geom));

  std::vector<int> overlap(omega.geom.cell_count(), 0);
  for (const Cube& q : res.cubes) {
    dilate_real(q, R).for_each_cell([&](std::size_t c) { ++overlap[c]; });
  }
  int mo = 0;
  for (auto c : omega.cells) mo = std::max(mo, overlap[c]);
  res.max_overlap = mo;
  return res;
}

int whitney_min_level(double R, int dim) {
  const double sn = dim == 2 ? std::sqrt(2.0) : 1.0;
  return static_cast<int>(std::ceil(std::log2(40.0 * R * sn)));
}

} // namespace wsi

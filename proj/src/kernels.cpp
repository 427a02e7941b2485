#include "wsi/kernels.hpp"

#include "wsi/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wsi {
namespace {

constexpr double kPi = 3.14159265358979323846;

// signed displacement in cells, nearest image when periodic
long long wrap_delta(long long d, int n, bool periodic) {
  if (!periodic) return d;
  long long m = ((d % n) + n) % n; // [0, n)
  if (2 * m >= n) m -= n;          // [-n/2, n/2)
  return m;
}

double axis_distance(long long d, int n, bool periodic, double dx) {
  long long w = wrap_delta(d, n, periodic);
  return std::abs(static_cast<double>(w)) * dx;
}

double pair_distance(const Geometry& g, std::size_t i, std::size_t j) {
  int n = g.cells_per_axis();
  double dx = g.cell_width();
  if (g.dim == 1)
    return axis_distance(static_cast<long long>(i) - static_cast<long long>(j), n, g.periodic, dx);
  long long ix = static_cast<long long>(i % static_cast<std::size_t>(n));
  long long iy = static_cast<long long>(i / static_cast<std::size_t>(n));
  long long jx = static_cast<long long>(j % static_cast<std::size_t>(n));
  long long jy = static_cast<long long>(j / static_cast<std::size_t>(n));
  double ax = axis_distance(ix - jx, n, g.periodic, dx);
  double ay = axis_distance(iy - jy, n, g.periodic, dx);
  return std::sqrt(ax * ax + ay * ay);
}

std::vector<double> hilbert_profile(const Geometry& g) {
  int n = g.cells_per_axis();
  double dx = g.cell_width(), mu = g.cell_measure();
  std::vector<double> prof(2 * static_cast<std::size_t>(n) - 1, 0.0);
  for (long long d = -(n - 1); d <= n - 1; ++d) {
    long long w = wrap_delta(d, n, g.periodic);
    if (w == 0) continue;
    prof[static_cast<std::size_t>(d + n - 1)] = mu / (static_cast<double>(w) * dx);
  }
  return prof;
}

std::vector<double> rough_profile_1d(const Geometry& g, double wplus, double wminus) {
  int n = g.cells_per_axis();
  double dx = g.cell_width(), mu = g.cell_measure();
  std::vector<double> prof(2 * static_cast<std::size_t>(n) - 1, 0.0);
  for (long long d = -(n - 1); d <= n - 1; ++d) {
    long long w = wrap_delta(d, n, g.periodic);
    if (w == 0) continue;
    double om = w > 0 ? wplus : wminus;
    prof[static_cast<std::size_t>(d + n - 1)] = mu * om / (std::abs(static_cast<double>(w)) * dx);
  }
  return prof;
}

double interp_angle_table(const std::vector<double>& tab, double theta) {
  if (tab.size() == 1) return tab[0];
  double u = theta / (2.0 * kPi) * static_cast<double>(tab.size());
  double fl = std::floor(u);
  double frac = u - fl;
  std::size_t k0 = static_cast<std::size_t>(static_cast<long long>(fl) %
                                            static_cast<long long>(tab.size()));
  std::size_t k1 = (k0 + 1) % tab.size();
  return tab[k0] * (1.0 - frac) + tab[k1] * frac;
}

std::vector<double> dense_2d(const Geometry& g, const OperatorSpec& spec) {
  int n = g.cells_per_axis();
  std::size_t N = g.cell_count();
  double dx = g.cell_width(), mu = g.cell_measure();
  std::vector<double> mat(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    long long ix = static_cast<long long>(i % static_cast<std::size_t>(n));
    long long iy = static_cast<long long>(i / static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      long long jx = static_cast<long long>(j % static_cast<std::size_t>(n));
      long long jy = static_cast<long long>(j / static_cast<std::size_t>(n));
      double ux = static_cast<double>(wrap_delta(ix - jx, n, g.periodic)) * dx;
      double uy = static_cast<double>(wrap_delta(iy - jy, n, g.periodic)) * dx;
      double r2 = ux * ux + uy * uy;
      double r = std::sqrt(r2);
      double val = 0.0;
      if (spec.kind == OperatorSpec::Kind::riesz2d) {
        double comp = spec.axis == 0 ? ux : uy;
        val = comp / (r2 * r);
      } else {
        double theta = std::atan2(uy, ux);
        if (theta < 0) theta += 2.0 * kPi;
        val = interp_angle_table(spec.omega, theta) / r2;
      }
      mat[i * N + j] = mu * val;
    }
  }
  return mat;
}

std::vector<double> read_matrix_file(const std::string& path, std::size_t N) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  in.seekg(0, std::ios::end);
  auto bytes = static_cast<unsigned long long>(in.tellg());
  unsigned long long want = static_cast<unsigned long long>(N) * N * sizeof(double);
  if (bytes != want) {
    std::ostringstream os;
    os << "matrix file " << path << ": expected " << want << " bytes for " << N << "x" << N
       << " doubles, found " << bytes;
    throw std::runtime_error(os.str());
  }
  in.seekg(0, std::ios::beg);
  std::vector<double> mat(N * N);
  in.read(reinterpret_cast<char*>(mat.data()), static_cast<std::streamsize>(want));
  if (!in) throw std::runtime_error("short read on matrix file: " + path);
  for (std::size_t i = 0; i < N; ++i) mat[i * N + i] = 0.0;
  return mat;
}

// Diagonal-recurrence scan of C = L*R for Toeplitz factors stored as
// displacement profiles (size 2N-1, index d+N-1). Visits every entry once,
// O(N^2) time, O(N) memory. With C(x,y) = sum_z l(x-z) r(z-y):
//   C(x+1,y+1) = C(x,y) + l(x+1) r(-1-y) - l(x+1-N) r(N-1-y)
template <class Visit>
void stream_composite(const std::vector<double>& L, const std::vector<double>& R, long long N,
                      Visit&& visit) {
  auto l = [&](long long d) { return L[static_cast<std::size_t>(d + N - 1)]; };
  auto r = [&](long long d) { return R[static_cast<std::size_t>(d + N - 1)]; };
  auto start = [&](long long x, long long y) {
    double acc = 0.0;
    for (long long z = 0; z < N; ++z) acc += l(x - z) * r(z - y);
    return acc;
  };
  auto walk = [&](long long x0, long long y0) {
    double cur = start(x0, y0);
    long long x = x0, y = y0;
    visit(x, y, cur);
    while (x + 1 < N && y + 1 < N) {
      cur += l(x + 1) * r(-1 - y) - l(x + 1 - N) * r(N - 1 - y);
      ++x;
      ++y;
      visit(x, y, cur);
    }
  };
  for (long long y0 = 0; y0 < N; ++y0) walk(0, y0);
  for (long long x0 = 1; x0 < N; ++x0) walk(x0, 0);
}

std::vector<double> dense_product(const Geometry& g, const std::vector<double>& A,
                                  const std::vector<double>& B) {
  std::size_t N = g.cell_count();
  std::vector<double> C(N * N, 0.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) {
      double a = A[i * N + k];
      if (a == 0.0) continue;
      const double* brow = &B[k * N];
      double* crow = &C[i * N];
      for (std::size_t j = 0; j < N; ++j) crow[j] += a * brow[j];
    }
  return C;
}

std::vector<double> dense_of(const KernelOperator& T) {
  std::size_t N = T.geometry().cell_count();
  std::vector<double> M(N * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) M[i * N + j] = T.entry(i, j);
  return M;
}

} // namespace

std::string OperatorSpec::label() const {
  switch (kind) {
    case Kind::hilbert: return "hilbert";
    case Kind::riesz2d: {
      std::ostringstream os;
      os << "riesz2d:" << axis;
      return os.str();
    }
    case Kind::rough: {
      std::ostringstream os;
      os << "rough:";
      for (std::size_t k = 0; k < omega.size(); ++k) {
        if (k) os << ",";
        os << omega[k];
      }
      return os.str();
    }
    case Kind::matrix_file: return "file:" + path;
  }
  return "?";
}

OperatorSpec OperatorSpec::parse(const std::string& text) {
  OperatorSpec spec;
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  if (head == "hilbert") {
    spec.kind = Kind::hilbert;
    if (!rest.empty()) throw std::invalid_argument("hilbert takes no arguments");
  } else if (head == "riesz2d") {
    spec.kind = Kind::riesz2d;
    if (rest.empty()) throw std::invalid_argument("riesz2d needs a component, e.g. riesz2d:0");
    spec.axis = std::stoi(rest);
    if (spec.axis != 0 && spec.axis != 1)
      throw std::invalid_argument("riesz2d component must be 0 or 1");
  } else if (head == "rough") {
    spec.kind = Kind::rough;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      spec.omega.push_back(std::stod(tok));
    }
    if (spec.omega.empty())
      throw std::invalid_argument("rough needs angle-table values, e.g. rough:1,-0.3");
  } else if (head == "file") {
    spec.kind = Kind::matrix_file;
    if (rest.empty()) throw std::invalid_argument("file needs a path, e.g. file:op.bin");
    spec.path = rest;
  } else {
    throw std::invalid_argument("unknown operator kind: " + head);
  }
  return spec;
}

KernelOperator KernelOperator::dense(Geometry g, std::vector<double> mat, std::string label) {
  g.validate();
  std::size_t N = g.cell_count();
  if (mat.size() != N * N) throw std::invalid_argument("dense operator: matrix size mismatch");
  KernelOperator T;
  T.geom_ = g;
  T.mat_ = std::move(mat);
  T.label_ = std::move(label);
  return T;
}

KernelOperator KernelOperator::toeplitz(Geometry g, std::vector<double> profile,
                                        std::string label) {
  g.validate();
  if (g.dim != 1) throw std::invalid_argument("toeplitz operator: dimension 1 only");
  std::size_t N = g.cell_count();
  if (profile.size() != 2 * N - 1)
    throw std::invalid_argument("toeplitz operator: profile size mismatch");
  KernelOperator T;
  T.geom_ = g;
  T.prof_ = std::move(profile);
  T.label_ = std::move(label);
  return T;
}

GridFunction KernelOperator::apply(const GridFunction& f) const {
  check_geometry(geom_, f.geometry(), "KernelOperator::apply");
  std::size_t N = geom_.cell_count();
  GridFunction out(geom_);
  for (std::size_t i = 0; i < N; ++i) {
    double acc = 0.0;
    if (!prof_.empty()) {
      const double* p = prof_.data() + (i + N - 1);
      for (std::size_t j = 0; j < N; ++j) acc += p[-static_cast<long long>(j)] * f[j];
    } else {
      const double* row = &mat_[i * N];
      for (std::size_t j = 0; j < N; ++j) acc += row[j] * f[j];
    }
    out[i] = acc;
  }
  return out;
}

GridFunction KernelOperator::apply_adjoint(const GridFunction& f) const {
  check_geometry(geom_, f.geometry(), "KernelOperator::apply_adjoint");
  std::size_t N = geom_.cell_count();
  GridFunction out(geom_);
  if (!prof_.empty()) {
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      const double* p = prof_.data() + (N - 1 - i);
      for (std::size_t j = 0; j < N; ++j) acc += p[j] * f[j];
      out[i] = acc;
    }
  } else {
    for (std::size_t j = 0; j < N; ++j) {
      double fj = f[j];
      if (fj == 0.0) continue;
      const double* row = &mat_[j * N];
      for (std::size_t i = 0; i < N; ++i) out[i] += row[i] * fj;
    }
  }
  return out;
}

double KernelOperator::row_dot(std::size_t row, const GridFunction& f) const {
  check_geometry(geom_, f.geometry(), "KernelOperator::row_dot");
  std::size_t N = geom_.cell_count();
  double acc = 0.0;
  if (!prof_.empty()) {
    const double* p = prof_.data() + (row + N - 1);
    for (std::size_t j = 0; j < N; ++j) acc += p[-static_cast<long long>(j)] * f[j];
  } else {
    const double* r = &mat_[row * N];
    for (std::size_t j = 0; j < N; ++j) acc += r[j] * f[j];
  }
  return acc;
}

double KernelOperator::l2_norm() const {
  std::lock_guard<std::mutex> lock(*norm_mu_);
  if (norm_) return *norm_;
  std::size_t N = geom_.cell_count();
  Rng rng(0x5eedULL ^ fnv1a(label_));
  GridFunction x(geom_);
  double nx = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    x[i] = rng.uniform(-1.0, 1.0);
    nx += x[i] * x[i];
  }
  nx = std::sqrt(nx);
  for (std::size_t i = 0; i < N; ++i) x[i] /= nx;
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    GridFunction y = apply(x);
    GridFunction z = apply_adjoint(y);
    double nz = 0.0;
    for (std::size_t i = 0; i < N; ++i) nz += z[i] * z[i];
    nz = std::sqrt(nz);
    if (nz == 0.0) {
      lambda = 0.0;
      break;
    }
    lambda = nz;
    for (std::size_t i = 0; i < N; ++i) x[i] = z[i] / nz;
  }
  // lambda approximates the top eigenvalue of T*T; operator norm in the
  // measure-weighted l2 metric equals the plain matrix norm of M
  norm_ = std::sqrt(lambda);
  return *norm_;
}

KernelOperator make_operator(const OperatorSpec& spec, Geometry g) {
  g.validate();
  switch (spec.kind) {
    case OperatorSpec::Kind::hilbert:
      if (g.dim != 1) throw std::invalid_argument("hilbert kernel is one-dimensional");
      return KernelOperator::toeplitz(g, hilbert_profile(g), spec.label());
    case OperatorSpec::Kind::rough:
      if (g.dim == 1) {
        if (spec.omega.size() != 2)
          throw std::invalid_argument("rough in dimension 1 needs exactly {w+, w-}");
        return KernelOperator::toeplitz(g, rough_profile_1d(g, spec.omega[0], spec.omega[1]),
                                        spec.label());
      }
      return KernelOperator::dense(g, dense_2d(g, spec), spec.label());
    case OperatorSpec::Kind::riesz2d:
      if (g.dim != 2) throw std::invalid_argument("riesz2d kernel is two-dimensional");
      return KernelOperator::dense(g, dense_2d(g, spec), spec.label());
    case OperatorSpec::Kind::matrix_file:
      return KernelOperator::dense(g, read_matrix_file(spec.path, g.cell_count()), spec.label());
  }
  throw std::invalid_argument("unknown operator kind");
}

GridFunction apply_truncated_maximal(const KernelOperator& T, const GridFunction& f) {
  const Geometry& g = T.geometry();
  check_geometry(g, f.geometry(), "apply_truncated_maximal");
  int n = g.cells_per_axis();
  std::size_t N = g.cell_count();
  GridFunction m(g);
  std::vector<double> val(N, 0.0);

  // displacement groups keyed by squared min-image cell distance, descending;
  // after finishing a group, val holds the truncation just below that radius
  auto wrapped_abs = [&](long long d) {
    long long w = wrap_delta(d, n, g.periodic);
    return w < 0 ? -w : w;
  };
  std::map<long long, std::vector<std::pair<int, int>>, std::greater<long long>> groups;
  if (g.dim == 1) {
    for (int d = -(n - 1); d <= n - 1; ++d) {
      if (d == 0) continue;
      long long w = wrapped_abs(d);
      groups[w * w].push_back({d, 0});
    }
  } else {
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dx = -(n - 1); dx <= n - 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        long long wx = wrapped_abs(dx), wy = wrapped_abs(dy);
        groups[wx * wx + wy * wy].push_back({dx, dy});
      }
  }

  for (const auto& kv : groups) {
    for (auto [dx, dy] : kv.second) {
      if (g.dim == 1) {
        for (long long i = 0; i < static_cast<long long>(N); ++i) {
          long long j = i - dx;
          if (g.periodic)
            j = ((j % n) + n) % n;
          else if (j < 0 || j >= n)
            continue;
          val[static_cast<std::size_t>(i)] +=
              T.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
              f[static_cast<std::size_t>(j)];
        }
      } else {
        for (int iy = 0; iy < n; ++iy)
          for (int ix = 0; ix < n; ++ix) {
            long long jx = ix - dx, jy = iy - dy;
            if (g.periodic) {
              jx = ((jx % n) + n) % n;
              jy = ((jy % n) + n) % n;
            } else if (jx < 0 || jx >= n || jy < 0 || jy >= n) {
              continue;
            }
            std::size_t i = static_cast<std::size_t>(iy) * n + static_cast<std::size_t>(ix);
            std::size_t j = static_cast<std::size_t>(jy) * n + static_cast<std::size_t>(jx);
            val[i] += T.entry(i, j) * f[j];
          }
      }
    }
    for (std::size_t i = 0; i < N; ++i) m[i] = std::max(m[i], std::abs(val[i]));
  }
  return m;
}

double AtIFamily::envelope(double r, int dim) const {
  return std::pow(4.0 * kPi, -0.5 * dim) * std::exp(-0.25 * r * r);
}

std::vector<double> AtIFamily::axis_profile(Geometry g, double t) const {
  g.validate();
  if (t <= 0.0) throw std::invalid_argument("AtI time must be positive");
  int n = g.cells_per_axis();
  double dx = g.cell_width();
  double norm = std::pow(4.0 * kPi * t, -0.5);
  std::vector<double> prof(2 * static_cast<std::size_t>(n) - 1, 0.0);
  int images = g.periodic ? static_cast<int>(std::ceil(std::sqrt(2980.0 * t))) + 2 : 0;
  for (long long d = -(n - 1); d <= n - 1; ++d) {
    double acc = 0.0;
    for (int mimg = -images; mimg <= images; ++mimg) {
      double u = (static_cast<double>(d) + static_cast<double>(mimg) * n) * dx;
      acc += norm * std::exp(-u * u / (4.0 * t));
    }
    prof[static_cast<std::size_t>(d + n - 1)] = acc;
  }
  return prof;
}

std::vector<double> AtIFamily::operator_profile(Geometry g, double t) const {
  if (g.dim != 1) throw std::invalid_argument("operator_profile: dimension 1 only");
  auto prof = axis_profile(g, t);
  double mu = g.cell_measure();
  for (double& v : prof) v *= mu;
  return prof;
}

KernelOperator AtIFamily::matrix(Geometry g, double t) const {
  g.validate();
  std::ostringstream os;
  os << "heat(t=" << t << ")";
  if (g.dim == 1) return KernelOperator::toeplitz(g, operator_profile(g, t), os.str());
  int n = g.cells_per_axis();
  std::size_t N = g.cell_count();
  auto pa = axis_profile(g, t);
  double mu = g.cell_measure();
  std::vector<double> mat(N * N);
  for (std::size_t i = 0; i < N; ++i) {
    long long ix = static_cast<long long>(i % static_cast<std::size_t>(n));
    long long iy = static_cast<long long>(i / static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < N; ++j) {
      long long jx = static_cast<long long>(j % static_cast<std::size_t>(n));
      long long jy = static_cast<long long>(j / static_cast<std::size_t>(n));
      mat[i * N + j] = mu * pa[static_cast<std::size_t>(ix - jx + n - 1)] *
                       pa[static_cast<std::size_t>(iy - jy + n - 1)];
    }
  }
  return KernelOperator::dense(g, std::move(mat), os.str());
}

double AtIFamily::mass_defect(Geometry g, double t) const {
  g.validate();
  int n = g.cells_per_axis();
  auto pa = axis_profile(g, t);
  double dx = 1.0 / static_cast<double>(n);
  double min_axis = 0.0;
  bool first = true;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += pa[static_cast<std::size_t>(i - j + n - 1)];
    s *= dx;
    if (first || s < min_axis) {
      min_axis = s;
      first = false;
    }
  }
  double min_row = g.dim == 1 ? min_axis : min_axis * min_axis;
  return std::max(0.0, 1.0 - min_row);
}

double AtIFamily::envelope_ratio(Geometry g, double t) const {
  g.validate();
  int n = g.cells_per_axis();
  double dx = 1.0 / static_cast<double>(n);
  double ts = std::pow(t, 1.0 / s);
  auto pa = axis_profile(g, t);
  double sup = 0.0;
  if (g.dim == 1) {
    for (long long d = -(n - 1); d <= n - 1; ++d) {
      double r = axis_distance(d, n, g.periodic, dx) / ts;
      double bound = std::pow(t, -1.0 / s) * envelope(r, 1);
      sup = std::max(sup, pa[static_cast<std::size_t>(d + n - 1)] / bound);
    }
  } else {
    for (long long dyy = -(n - 1); dyy <= n - 1; ++dyy)
      for (long long dxx = -(n - 1); dxx <= n - 1; ++dxx) {
        double ax = axis_distance(dxx, n, g.periodic, dx);
        double ay = axis_distance(dyy, n, g.periodic, dx);
        double r = std::sqrt(ax * ax + ay * ay) / ts;
        double bound = std::pow(t, -2.0 / s) * envelope(r, 2);
        double val = pa[static_cast<std::size_t>(dxx + n - 1)] *
                     pa[static_cast<std::size_t>(dyy + n - 1)];
        sup = std::max(sup, val / bound);
      }
  }
  return sup;
}

CompositeKernel composite_TA(const KernelOperator& T, const AtIFamily& F, double t) {
  const Geometry& g = T.geometry();
  std::size_t N = g.cell_count();
  CompositeKernel C;
  C.geom = g;
  C.mat.assign(N * N, 0.0);
  if (T.has_profile()) {
    auto pa = F.operator_profile(g, t);
    stream_composite(T.profile(), pa, static_cast<long long>(N),
                     [&](long long i, long long j, double v) {
                       C.mat[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)] = v;
                     });
  } else {
    C.mat = dense_product(g, dense_of(T), dense_of(F.matrix(g, t)));
  }
  return C;
}

CompositeKernel composite_DT(const KernelOperator& T, const AtIFamily& F, double t) {
  const Geometry& g = T.geometry();
  std::size_t N = g.cell_count();
  CompositeKernel C;
  C.geom = g;
  C.mat.assign(N * N, 0.0);
  if (T.has_profile()) {
    auto pa = F.operator_profile(g, t);
    stream_composite(pa, T.profile(), static_cast<long long>(N),
                     [&](long long i, long long j, double v) {
                       C.mat[static_cast<std::size_t>(i) * N + static_cast<std::size_t>(j)] = v;
                     });
  } else {
    C.mat = dense_product(g, dense_of(F.matrix(g, t)), dense_of(T));
  }
  return C;
}

AssumptionReport check_assumption_L1(const KernelOperator& T, const AtIFamily& F, double t) {
  const Geometry& g = T.geometry();
  std::size_t N = g.cell_count();
  AssumptionReport rep;
  rep.threshold = F.c1 * std::pow(t, 1.0 / F.s);
  rep.under_resolved = F.under_resolved(g, t);
  std::vector<double> col(N, 0.0);
  if (T.has_profile() && g.dim == 1) {
    int n = g.cells_per_axis();
    auto pa = F.operator_profile(g, t);
    const auto& pk = T.profile();
    stream_composite(pk, pa, static_cast<long long>(N), [&](long long i, long long j, double v) {
      long long d = i - j;
      double dist = axis_distance(d, n, g.periodic, g.cell_width());
      if (dist >= rep.threshold)
        col[static_cast<std::size_t>(j)] += std::abs(pk[static_cast<std::size_t>(d + n - 1)] - v);
    });
  } else {
    CompositeKernel C = composite_TA(T, F, t);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        if (pair_distance(g, i, j) < rep.threshold) continue;
        col[j] += std::abs(T.entry(i, j) - C.entry(i, j));
      }
  }
  rep.value = *std::max_element(col.begin(), col.end());
  return rep;
}

AssumptionReport check_assumption_pointwise(const KernelOperator& T, const AtIFamily& F, double t,
                                            CompositeSide side) {
  const Geometry& g = T.geometry();
  std::size_t N = g.cell_count();
  double mu = g.cell_measure();
  double nn = static_cast<double>(g.dim);
  AssumptionReport rep;
  rep.threshold = F.c2 * std::pow(t, 1.0 / F.s);
  rep.under_resolved = F.under_resolved(g, t);
  double holder = 0.0, size = 0.0;
  double tpow_a = std::pow(t, F.alpha / F.s);
  double tpow_n = std::pow(t, nn / F.s);
  if (T.has_profile() && g.dim == 1) {
    int n = g.cells_per_axis();
    auto pa = F.operator_profile(g, t);
    const auto& pk = T.profile();
    const std::vector<double>& left = side == CompositeSide::TA ? pk : pa;
    const std::vector<double>& right = side == CompositeSide::TA ? pa : pk;
    stream_composite(left, right, static_cast<long long>(N),
                     [&](long long i, long long j, double v) {
                       long long d = i - j;
                       double dist = axis_distance(d, n, g.periodic, g.cell_width());
                       double kdiff = std::abs(pk[static_cast<std::size_t>(d + n - 1)] - v) / mu;
                       if (dist >= rep.threshold)
                         holder = std::max(holder,
                                           kdiff * std::pow(dist, nn + F.alpha) / tpow_a);
                       else
                         size = std::max(size, std::abs(v) / mu * tpow_n);
                     });
  } else {
    CompositeKernel C =
        side == CompositeSide::TA ? composite_TA(T, F, t) : composite_DT(T, F, t);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        double dist = pair_distance(g, i, j);
        double cv = C.kernel_value(i, j);
        if (dist >= rep.threshold)
          holder = std::max(holder, std::abs(T.kernel_value(i, j) - cv) *
                                        std::pow(dist, nn + F.alpha) / tpow_a);
        else
          size = std::max(size, std::abs(cv) * tpow_n);
      }
  }
  rep.value = holder;
  rep.size_sup = size;
  return rep;
}

std::vector<double> default_t_sweep(Geometry g) {
  std::vector<double> ts;
  int kmax = std::max(1, g.level - 2);
  for (int k = 1; k <= kmax; ++k) ts.push_back(std::pow(4.0, -k));
  return ts;
}

} // namespace wsi

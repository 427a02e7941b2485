#include "wsi/sparse.hpp"

#include "wsi/decomp.hpp"
#include "wsi/maximal.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace wsi {

namespace {

using nlohmann::json;

json cube_to_json(const Cube& q) {
  return json{{"offset", {q.offset[0], q.offset[1]}},
              {"extent", {q.extent[0], q.extent[1]}},
              {"dyadic", q.dyadic},
              {"mode", static_cast<int>(q.mode)}};
}

Cube cube_from_json(Geometry g, const json& j) {
  Cube q;
  q.geom = g;
  q.offset = {j.at("offset").at(0).get<int>(), j.at("offset").at(1).get<int>()};
  q.extent = {j.at("extent").at(0).get<int>(), j.at("extent").at(1).get<int>()};
  q.dyadic = j.at("dyadic").get<bool>();
  q.mode = static_cast<DilationMode>(j.at("mode").get<int>());
  return q;
}

} // namespace

std::string sparse_family_to_json(const SparseFamily& s) {
  json j;
  j["geometry"] = {{"dim", s.geom.dim}, {"level", s.geom.level}, {"periodic", s.geom.periodic}};
  j["dilation"] = s.dilation;
  json entries = json::array();
  for (const SparseEntry& e : s.entries) {
    json je;
    je["base"] = cube_to_json(e.base);
    je["support"] = cube_to_json(e.support);
    je["cert"] = e.cert.cells;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j.dump(2);
}

SparseFamily sparse_family_from_json(const std::string& text) {
  const json j = json::parse(text);
  SparseFamily s;
  s.geom.dim = j.at("geometry").at("dim").get<int>();
  s.geom.level = j.at("geometry").at("level").get<int>();
  s.geom.periodic = j.at("geometry").at("periodic").get<bool>();
  s.geom.validate();
  s.dilation = j.at("dilation").get<int>();
  for (const json& je : j.at("entries")) {
    SparseEntry e;
    e.base = cube_from_json(s.geom, je.at("base"));
    e.support = cube_from_json(s.geom, je.at("support"));
    e.cert.geom = s.geom;
    e.cert.cells = je.at("cert").get<std::vector<std::uint32_t>>();
    std::sort(e.cert.cells.begin(), e.cert.cells.end());
    s.entries.push_back(std::move(e));
  }
  return s;
}

SparsityResult verify_sparsity(const std::vector<Cube>& cubes) {
  SparsityResult out;
  out.certificates.resize(cubes.size());
  if (cubes.empty()) return out;
  const Geometry g = cubes.front().geom;
  for (const Cube& q : cubes) check_geometry(q.geom, g, "verify_sparsity");

  std::vector<std::size_t> order(cubes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cubes[a].cell_count() < cubes[b].cell_count();
  });

  std::vector<std::uint8_t> claimed(g.cell_count(), 0);
  std::vector<std::uint8_t> mine(g.cell_count(), 0);
  for (std::size_t idx : order) {
    const Cube& q = cubes[idx];
    std::fill(mine.begin(), mine.end(), 0);
    std::size_t cnt = 0;
    q.for_each_cell([&](std::size_t c) {
      if (!claimed[c]) {
        claimed[c] = 1;
        mine[c] = 1;
        ++cnt;
      }
    });
    out.certificates[idx] = CellSet::from_mask(g, mine);
    out.eta = std::min(out.eta, static_cast<double>(cnt) / static_cast<double>(q.cell_count()));
  }
  return out;
}

CertificateCheck check_certificates(const SparseFamily& s) {
  CertificateCheck out;
  std::vector<std::uint8_t> seen(s.geom.cell_count(), 0);
  for (const SparseEntry& e : s.entries) {
    for (std::uint32_t c : e.cert.cells) {
      if (!e.base.contains_cell(c)) out.contained = false;
      if (seen[c]) out.disjoint = false;
      seen[c] = 1;
    }
    const double nb = static_cast<double>(e.cert.size()) / static_cast<double>(e.base.cell_count());
    const double ns =
        static_cast<double>(e.cert.size()) / static_cast<double>(e.support.cell_count());
    out.eta_base = std::min(out.eta_base, nb);
    out.eta_support = std::min(out.eta_support, ns);
  }
  return out;
}

double sparse_form(const SparseFamily& s, const GridFunction& f, const GridFunction& g,
                   const LocalFunctional& left, const LocalFunctional& right) {
  check_geometry(f.geometry(), s.geom, "sparse_form");
  check_geometry(g.geometry(), s.geom, "sparse_form");
  double total = 0.0;
  for (const SparseEntry& e : s.entries)
    total += e.support.measure() * left.eval(f, e.support) * right.eval(g, e.support);
  return total;
}

namespace {

// Shared tail of a stopping node: double D until the exceptional cells fill
// at most 2^-(n+2) of Q, cut children with a CZ pass on the indicator at
// level 2^-(n+1), keep Q minus the children as certificate. The CZ sandwich
// gives sum |P_j| < 2^(n+1) |E| <= |Q|/2, so the certificate keeps at least
// half of Q.
struct NodeOutcome {
  double d = 1.0;
  bool capped = false;
  double frac = 0.0;
  std::vector<Cube> children;
  CellSet cert;
};

template <class Pred>
NodeOutcome resolve_node(const Cube& Q, const DominationOptions& opt, Pred&& exceptional) {
  const int n = Q.geom.dim;
  const std::size_t qcells = Q.cell_count();
  const std::vector<std::size_t> cells = Q.cells();
  NodeOutcome out;
  std::vector<std::uint8_t> emask(Q.geom.cell_count(), 0);
  std::size_t ecount = 0;
  int doublings = 0;
  for (;;) {
    ecount = 0;
    for (std::size_t c : cells) {
      const bool e = exceptional(c, out.d);
      emask[c] = e ? 1 : 0;
      if (e) ++ecount;
    }
    if ((ecount << (n + 2)) <= qcells) break;
    if (doublings >= opt.max_doublings) {
      out.capped = true;
      break;
    }
    out.d *= 2.0;
    ++doublings;
  }
  out.frac = static_cast<double>(ecount) / static_cast<double>(qcells);

  std::vector<std::uint8_t> certmask(Q.geom.cell_count(), 0);
  for (std::size_t c : cells) certmask[c] = 1;
  if (ecount > 0) {
    GridFunction chi(Q.geom);
    for (std::size_t c = 0; c < emask.size(); ++c) chi[c] = emask[c] ? 1.0 : 0.0;
    out.children = cz_select(chi, 1.0 / static_cast<double>(1 << (n + 1)), Q);
    for (const Cube& p : out.children)
      p.for_each_cell([&](std::size_t c) { certmask[c] = 0; });
  }
  out.cert = CellSet::from_mask(Q.geom, certmask);
  return out;
}

} // namespace

CompositionDomination dominate_composition(const KernelOperator& T1, const KernelOperator& T2,
                                           const GridFunction& f, const DominationOptions& opt) {
  check_geometry(f.geometry(), T1.geometry(), "dominate_composition");
  check_geometry(f.geometry(), T2.geometry(), "dominate_composition");
  CompositionDomination out;
  out.family.geom = f.geometry();
  out.family.dilation = 27;

  struct Rec {
    const KernelOperator& T1;
    const KernelOperator& T2;
    const GridFunction& f;
    const DominationOptions& opt;
    CompositionDomination& out;

    void node(const Cube& Q) {
      const Cube s27 = dilate(Q, 27);
      const GridFunction h = restrict_to(f, s27);
      if (h.sup_abs() == 0.0) return;

      const double t1 = luxemburg_norm(f, s27, 2.0);
      const double t2 = power_average(f, s27, 1.0);
      const double t3 = luxemburg_norm(f, s27, 1.0);

      const GridFunction v = T1.apply(T2.apply(h));
      const std::size_t total = f.geometry().cell_count();
      std::vector<double> q2(total, 0.0), q3(total, 0.0);
      for (const Cube& qp : dyadic_subcubes(Q)) {
        const GridFunction hq = erase_on(h, dilate(qp, 27));
        if (hq.sup_abs() == 0.0) continue;
        double v2 = 0.0;
        dilate(qp, 9).for_each_cell(
            [&](std::size_t xi) { v2 = std::max(v2, std::abs(T2.row_dot(xi, hq))); });
        const GridFunction w9 = erase_on(T2.apply(hq), dilate(qp, 9));
        double v3 = 0.0;
        qp.for_each_cell([&](std::size_t xi) { v3 = std::max(v3, std::abs(T1.row_dot(xi, w9))); });
        qp.for_each_cell([&](std::size_t c) {
          if (v2 > q2[c]) q2[c] = v2;
          if (v3 > q3[c]) q3[c] = v3;
        });
      }

      NodeOutcome res = resolve_node(Q, opt, [&](std::size_t c, double d) {
        return std::abs(v[c]) > d * t1 || q2[c] > d * t2 || q3[c] > d * t3;
      });
      if (res.capped) out.d_capped = true;
      out.family.entries.push_back({Q, s27, std::move(res.cert)});
      out.node_d.push_back(res.d);
      out.exceptional_fraction.push_back(res.frac);
      out.d_max = std::max(out.d_max, res.d);
      for (const Cube& p : res.children) node(p);
    }
  } rec{T1, T2, f, opt, out};

  rec.node(Cube::whole_domain(f.geometry()));
  return out;
}

FormEvaluation evaluate_composition(const CompositionDomination& dom, const KernelOperator& T1,
                                    const KernelOperator& T2, const GridFunction& f,
                                    const GridFunction& g) {
  check_geometry(f.geometry(), dom.family.geom, "evaluate_composition");
  check_geometry(g.geometry(), dom.family.geom, "evaluate_composition");
  FormEvaluation ev;
  const GridFunction v = T1.apply(T2.apply(f));
  const double mu = f.geometry().cell_measure();
  double acc = 0.0;
  for (std::size_t c = 0; c < v.size(); ++c) acc += g[c] * v[c];
  ev.lhs = std::abs(acc) * mu;
  ev.form1 = sparse_form(dom.family, f, g, LocalFunctional::Luxemburg(2.0),
                         LocalFunctional::Power(1.0));
  ev.form2 = sparse_form(dom.family, f, g, LocalFunctional::Luxemburg(1.0),
                         LocalFunctional::Luxemburg(1.0));
  const double denom = dom.d_max * (ev.form1 + ev.form2);
  ev.ratio = (ev.lhs > 0.0 && denom > 0.0) ? ev.lhs / denom : 0.0;
  return ev;
}

MaximalDomination dominate_maximal_composition(const KernelOperator& T1, const KernelOperator& T2,
                                               const GridFunction& f, const GridFunction& g,
                                               double q, const DominationOptions& opt) {
  check_geometry(f.geometry(), T1.geometry(), "dominate_maximal_composition");
  check_geometry(f.geometry(), T2.geometry(), "dominate_maximal_composition");
  check_geometry(f.geometry(), g.geometry(), "dominate_maximal_composition");
  if (!(q > 1.0)) throw std::invalid_argument("dominate_maximal_composition: q must exceed 1");

  MaximalDomination out;
  out.q = q;
  out.qprime = q / (q - 1.0);
  out.family.geom = f.geometry();
  out.family.dilation = 27;
  const MaximalSpec mspec{LocalFunctional::Power(1.0), CubeFamily::dyadic};

  struct Rec {
    const KernelOperator& T1;
    const KernelOperator& T2;
    const GridFunction& f;
    const GridFunction& g;
    const DominationOptions& opt;
    const MaximalSpec& mspec;
    MaximalDomination& out;

    void node(const Cube& Q) {
      const Cube s27 = dilate(Q, 27);
      const GridFunction h = restrict_to(f, s27);
      if (h.sup_abs() == 0.0) return;

      const double t1 = luxemburg_norm(f, s27, 2.0);
      const double t3 = luxemburg_norm(f, s27, 1.0);
      const double gq = power_average(g, Q, out.q);

      const GridFunction m1 = maximal(T1.apply(T2.apply(h)), mspec);
      const std::size_t total = f.geometry().cell_count();
      std::vector<double> q2(total, 0.0), q3(total, 0.0);
      for (const Cube& qp : dyadic_subcubes(Q)) {
        const GridFunction hq = erase_on(h, dilate(qp, 27));
        if (hq.sup_abs() == 0.0) continue;
        const GridFunction w = T2.apply(hq);
        const Cube d9 = dilate(qp, 9);
        const GridFunction m2 = maximal(T1.apply(erase_on(w, d9)), mspec);
        const GridFunction m3 = maximal(T1.apply(restrict_to(w, d9)), mspec);
        double v2 = 0.0, acc = 0.0;
        qp.for_each_cell([&](std::size_t xi) {
          v2 = std::max(v2, m2[xi]);
          acc += m3[xi] * std::abs(g[xi]);
        });
        const double v3 = acc / static_cast<double>(qp.cell_count());
        qp.for_each_cell([&](std::size_t c) {
          if (v2 > q2[c]) q2[c] = v2;
          if (v3 > q3[c]) q3[c] = v3;
        });
      }

      NodeOutcome res = resolve_node(Q, opt, [&](std::size_t c, double d) {
        return m1[c] > d * t1 || q2[c] > d * t1 || q3[c] > d * out.qprime * t3 * gq;
      });
      if (res.capped) out.d_capped = true;
      out.family.entries.push_back({Q, s27, std::move(res.cert)});
      out.node_d.push_back(res.d);
      out.exceptional_fraction.push_back(res.frac);
      out.d_max = std::max(out.d_max, res.d);
      for (const Cube& p : res.children) node(p);
    }
  } rec{T1, T2, f, g, opt, mspec, out};

  rec.node(Cube::whole_domain(f.geometry()));

  const GridFunction m = maximal(T1.apply(T2.apply(f)), mspec);
  const double mu = f.geometry().cell_measure();
  double acc = 0.0;
  for (std::size_t c = 0; c < m.size(); ++c) acc += std::abs(g[c]) * m[c];
  out.eval.lhs = acc * mu;
  out.eval.form1 = sparse_form(out.family, f, g, LocalFunctional::Luxemburg(2.0),
                               LocalFunctional::Power(1.0));
  out.eval.form2 =
      sparse_form(out.family, f, g, LocalFunctional::Luxemburg(1.0), LocalFunctional::Power(q));
  const double denom = out.d_max * (out.eval.form1 + out.qprime * out.eval.form2);
  out.eval.ratio = (out.eval.lhs > 0.0 && denom > 0.0) ? out.eval.lhs / denom : 0.0;
  return out;
}

SingleDomination sparse_dominate_single(const KernelOperator& T, const GridFunction& f, int k,
                                        const DominationOptions& opt) {
  check_geometry(f.geometry(), T.geometry(), "sparse_dominate_single");
  if (k < 0) throw std::invalid_argument("sparse_dominate_single: k must be nonnegative");

  SingleDomination out;
  out.k = k;
  out.family.geom = f.geometry();
  out.family.dilation = 9;
  const MaximalSpec vspec{LocalFunctional::Luxemburg(static_cast<double>(k)), CubeFamily::dyadic};
  std::vector<double> node_t;

  struct Rec {
    const KernelOperator& T;
    const GridFunction& f;
    const DominationOptions& opt;
    const MaximalSpec& vspec;
    SingleDomination& out;
    std::vector<double>& node_t;
    double beta_t;

    void node(const Cube& Q) {
      const Cube s9 = dilate(Q, 9);
      const GridFunction h = restrict_to(f, s9);
      if (h.sup_abs() == 0.0) return;

      const double t = luxemburg_norm(f, s9, beta_t);
      const GridFunction m1 = maximal(T.apply(h), vspec);
      const std::size_t total = f.geometry().cell_count();
      std::vector<double> q2(total, 0.0);
      for (const Cube& qp : dyadic_subcubes(Q)) {
        const GridFunction hq = erase_on(h, dilate(qp, 9));
        if (hq.sup_abs() == 0.0) continue;
        const GridFunction m2 = maximal(T.apply(hq), vspec);
        double v2 = 0.0;
        qp.for_each_cell([&](std::size_t xi) { v2 = std::max(v2, m2[xi]); });
        qp.for_each_cell([&](std::size_t c) {
          if (v2 > q2[c]) q2[c] = v2;
        });
      }

      NodeOutcome res = resolve_node(
          Q, opt, [&](std::size_t c, double d) { return m1[c] > d * t || q2[c] > d * t; });
      if (res.capped) out.d_capped = true;
      out.family.entries.push_back({Q, s9, std::move(res.cert)});
      out.node_d.push_back(res.d);
      out.exceptional_fraction.push_back(res.frac);
      out.d_max = std::max(out.d_max, res.d);
      node_t.push_back(t);
      for (const Cube& p : res.children) node(p);
    }
  } rec{T, f, opt, vspec, out, node_t, static_cast<double>(k) + 1.0};

  rec.node(Cube::whole_domain(f.geometry()));

  const GridFunction vf = maximal(T.apply(f), vspec);
  std::vector<double> denom(f.geometry().cell_count(), 0.0);
  for (std::size_t i = 0; i < out.family.entries.size(); ++i)
    out.family.entries[i].support.for_each_cell([&](std::size_t c) { denom[c] += node_t[i]; });
  double maxc = 0.0;
  for (std::size_t c = 0; c < denom.size(); ++c)
    if (denom[c] > 0.0) maxc = std::max(maxc, vf[c] / denom[c]);
  out.max_pointwise_c = maxc;
  out.ratio = out.d_max > 0.0 ? maxc / out.d_max : 0.0;
  return out;
}

} // namespace wsi

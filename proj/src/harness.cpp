#include "wsi/harness.hpp"

#include "wsi/common.hpp"
#include "wsi/generators.hpp"
#include "wsi/kernels.hpp"
#include "wsi/maximal.hpp"
#include "wsi/orlicz.hpp"
#include "wsi/sparse.hpp"
#include "wsi/weights.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace wsi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kE = 2.718281828459045235360287;

double safe_div(double num, double den) {
  if (den > 0.0) return num / den;
  return num > 0.0 ? kInf : 0.0;
}

std::string fmt(double v) {
  char b[48];
  std::snprintf(b, sizeof(b), "%.12g", v);
  return b;
}

enum : unsigned {
  G_WEIGHTS = 1u,
  G_ASSUMPTIONS = 2u,
  G_MAXIMAL = 4u,
  G_DOMINATE = 8u,
  G_BOUNDS = 16u,
  G_ENDPOINTS = 32u,
  G_SPARSE = 64u,
  G_ALL = 127u,
};

// spec arguments may themselves hold commas (rough:1.5,-1.5 or values:1,2);
// a token starting with a sign or digit continues the previous spec rather
// than opening a new one, since every spec name starts with a letter
void glue_numeric_continuations(std::vector<std::string>& toks) {
  for (std::size_t i = 1; i < toks.size();) {
    const char c = toks[i][0];
    if (c == '-' || c == '+' || c == '.' || (c >= '0' && c <= '9')) {
      toks[i - 1] += "," + toks[i];
      toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

unsigned groups_for(const std::string& sub) {
  if (sub == "weights") return G_WEIGHTS;
  if (sub == "assumptions") return G_ASSUMPTIONS;
  if (sub == "maximal") return G_MAXIMAL;
  if (sub == "dominate") return G_DOMINATE;
  if (sub == "bounds") return G_BOUNDS;
  if (sub == "endpoints") return G_ENDPOINTS;
  if (sub == "sparse-forms") return G_SPARSE;
  if (sub == "report") return G_ALL;
  throw std::invalid_argument("unknown subcommand: " + sub);
}

struct WeightCase {
  std::string label;
  Weight w;
  double a1 = 1.0;
  double ainf = 1.0;
  std::map<double, double> ap;         // per p
  std::map<double, double> sigma_ap;   // [sigma]_{A_{p'}} per p
  std::map<double, double> sigma_ainf; // per p
  std::map<double, Weight> sigma;      // dual weight per p
};

struct FnCase {
  std::string label;
  GridFunction f;
};

struct Images {
  GridFunction t1, t2, t12, t123, tstar, tstar12;
};

long long gamma_key(double g) { return std::llround(g * 1e9); }

} // namespace

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "inequality_id,p,q,eps,lambda,Ap,Ainf_w,Ainf_sigma,lhs,rhs_core,ratio,D,family_size,seed,L,"
      "runtime_ms\n";
  for (const ReportRow& r : rows) {
    out += r.inequality_id;
    out += ',';
    out += fmt(r.p);
    out += ',';
    out += fmt(r.q);
    out += ',';
    out += fmt(r.eps);
    out += ',';
    out += fmt(r.lambda);
    out += ',';
    out += fmt(r.ap);
    out += ',';
    out += fmt(r.ainf_w);
    out += ',';
    out += fmt(r.ainf_sigma);
    out += ',';
    out += fmt(r.lhs);
    out += ',';
    out += fmt(r.rhs_core);
    out += ',';
    out += fmt(r.ratio);
    out += ',';
    out += fmt(r.d);
    out += ',';
    out += std::to_string(r.family_size);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.level);
    out += ',';
    out += std::to_string(r.runtime_ms);
    out += '\n';
  }
  return out;
}

HarnessResult run_harness(const Config& cfg, const HarnessOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const auto t_start = Clock::now();
  auto ms_since = [](Clock::time_point a) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - a).count();
  };

  const unsigned mask = groups_for(opt.subcommand);
  const int threads = std::max(1, opt.threads);

  Geometry geom;
  geom.dim = cfg.get_int("grid", "dim", 1);
  geom.level = opt.level_override >= 0 ? opt.level_override : cfg.get_int("grid", "level", 4);
  geom.periodic = cfg.get_bool("grid", "periodic", true);
  geom.validate();
  const double mu = geom.cell_measure();
  const std::uint64_t seed =
      opt.seed_overridden ? opt.seed
                          : static_cast<std::uint64_t>(cfg.get_int("grid", "seed", 42));

  auto pair_specs = cfg.get_strings("operators", "pair", {"hilbert", "hilbert"});
  glue_numeric_continuations(pair_specs);
  if (pair_specs.size() != 2)
    throw ConfigError(cfg.origin() + ": [operators] pair must list exactly two kernels",
                      cfg.find("operators", "pair") ? cfg.find("operators", "pair")->line : 0);
  const KernelOperator T1 = make_operator(OperatorSpec::parse(pair_specs[0]), geom);
  const KernelOperator T2 = make_operator(OperatorSpec::parse(pair_specs[1]), geom);
  const KernelOperator T3 =
      cfg.has("operators", "third")
          ? make_operator(OperatorSpec::parse(cfg.require("operators", "third")), geom)
          : T1;
  T1.l2_norm(); // warm the cached norms before any parallel section
  T2.l2_norm();

  AtIFamily ati;
  ati.s = cfg.get_double("ati", "s", ati.s);
  ati.alpha = cfg.get_double("ati", "alpha", ati.alpha);
  ati.c1 = cfg.get_double("ati", "c1", ati.c1);
  ati.c2 = cfg.get_double("ati", "c2", ati.c2);
  ati.eta = cfg.get_double("ati", "eta", ati.eta);

  const std::vector<double> plist = cfg.get_doubles("weights", "p", {2.0});
  for (double p : plist)
    if (!(p > 1.0))
      throw ConfigError(cfg.origin() + ": [weights] p entries must be > 1",
                        cfg.find("weights", "p") ? cfg.find("weights", "p")->line : 0);
  const std::string family_name = cfg.get("weights", "family", geom.dim == 1 ? "all" : "dyadic");
  if (family_name != "all" && family_name != "dyadic")
    throw ConfigError(cfg.origin() + ": [weights] family must be all or dyadic",
                      cfg.find("weights", "family") ? cfg.find("weights", "family")->line : 0);
  const CubeFamily wfamily = family_name == "all" ? CubeFamily::all : CubeFamily::dyadic;

  const std::vector<double> lambdas = cfg.get_doubles("sweeps", "lambda", {1.0});
  const std::vector<double> epss = cfg.get_doubles("sweeps", "eps", {0.5});
  const std::vector<double> qs = cfg.get_doubles("sweeps", "q", {2.0});
  std::vector<double> ts =
      cfg.has("sweeps", "t") ? cfg.get_doubles("sweeps", "t", {}) : default_t_sweep(geom);
  std::vector<double> kraw = cfg.get_doubles("sweeps", "k", {0.0, 1.0});
  std::vector<int> ks;
  for (double k : kraw) ks.push_back(static_cast<int>(k));
  for (double l : lambdas)
    if (!(l > 0.0))
      throw ConfigError(cfg.origin() + ": [sweeps] lambda entries must be > 0",
                        cfg.find("sweeps", "lambda") ? cfg.find("sweeps", "lambda")->line : 0);
  for (double e : epss)
    if (!(e > 0.0))
      throw ConfigError(cfg.origin() + ": [sweeps] eps entries must be > 0",
                        cfg.find("sweeps", "eps") ? cfg.find("sweeps", "eps")->line : 0);
  for (double q : qs)
    if (!(q > 1.0))
      throw ConfigError(cfg.origin() + ": [sweeps] q entries must be > 1",
                        cfg.find("sweeps", "q") ? cfg.find("sweeps", "q")->line : 0);
  for (int k : ks)
    if (k < 0)
      throw ConfigError(cfg.origin() + ": [sweeps] k entries must be >= 0",
                        cfg.find("sweeps", "k") ? cfg.find("sweeps", "k")->line : 0);

  // inputs are drawn from one stream in config order, independent of the
  // subcommand, so every subcommand sees the same functions
  Rng rng(seed);
  std::vector<FnCase> fs;
  {
    const auto fn_names = cfg.get_strings("functions", "list", {"one_cell", "random_sign"});
    const int count = cfg.get_int("functions", "count", 1);
    if (count < 1)
      throw ConfigError(cfg.origin() + ": [functions] count must be >= 1",
                        cfg.find("functions", "count") ? cfg.find("functions", "count")->line : 0);
    for (const std::string& name : fn_names) {
      FunctionSpec spec = FunctionSpec::parse(name);
      for (int c = 0; c < count; ++c)
        fs.push_back({spec.label() + "#" + std::to_string(c), generate(spec, geom, rng)});
    }
  }
  GridFunction gfn(geom);
  {
    FunctionSpec gspec = FunctionSpec::parse(cfg.get("functions", "g", "smooth_bump"));
    GridFunction raw = generate(gspec, geom, rng);
    for (std::size_t i = 0; i < raw.size(); ++i) gfn[i] = std::fabs(raw[i]) + 0.25;
  }

  // weight cases with constants computed once, so parallel rows only read
  std::vector<WeightCase> weights;
  if (mask & (G_WEIGHTS | G_BOUNDS | G_ENDPOINTS | G_SPARSE)) {
    auto weight_specs = cfg.get_strings("weights", "list", {"constant:1"});
    glue_numeric_continuations(weight_specs);
    for (const std::string& spec_text : weight_specs) {
      WeightSpec spec = WeightSpec::parse(spec_text);
      WeightCase wc{spec.label(), Weight(build_weight_values(spec, geom), wfamily), 1.0, 1.0,
                    {},           {},
                    {},           {}};
      wc.a1 = wc.w.a1();
      wc.ainf = wc.w.ainf();
      for (double p : plist) {
        wc.ap[p] = wc.w.ap(p);
        Weight sg = wc.w.dual(p);
        wc.sigma_ainf[p] = sg.ainf();
        if (mask & G_WEIGHTS) wc.sigma_ap[p] = sg.ap(p / (p - 1.0));
        wc.sigma.emplace(p, std::move(sg));
      }
      weights.push_back(std::move(wc));
    }
  }
  const auto t_setup_ms = ms_since(t_start);
  const auto t_pre = Clock::now();

  // shared operator images per input function
  std::vector<Images> img(fs.size(), Images{GridFunction(geom), GridFunction(geom),
                                            GridFunction(geom), GridFunction(geom),
                                            GridFunction(geom), GridFunction(geom)});
  const bool need_basic = mask & (G_MAXIMAL | G_BOUNDS | G_ENDPOINTS);
  const bool need_t123 = mask & G_ENDPOINTS;
  const bool need_star = mask & G_BOUNDS;
  if (need_basic) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      img[i].t1 = T1.apply(fs[i].f);
      img[i].t2 = T2.apply(fs[i].f);
      img[i].t12 = T1.apply(img[i].t2);
      if (need_t123) img[i].t123 = T1.apply(T2.apply(T3.apply(fs[i].f)));
      if (need_star) {
        img[i].tstar = apply_truncated_maximal(T1, fs[i].f);
        img[i].tstar12 = apply_truncated_maximal(T1, img[i].t2);
      }
    }
  }

  // composition dominations are reused by three groups, computed once per f
  std::vector<CompositionDomination> doms;
  const bool need_doms = mask & (G_DOMINATE | G_ENDPOINTS | G_SPARSE);
  if (need_doms)
    for (const FnCase& fc : fs) doms.push_back(dominate_composition(T1, T2, fc.f));

  // Orlicz maximal images of the weights, keyed by (weight, exponent)
  std::map<std::pair<int, long long>, GridFunction> luxw;
  {
    std::set<std::pair<int, double>> needed;
    if (mask & G_BOUNDS)
      for (int wi = 0; wi < static_cast<int>(weights.size()); ++wi)
        for (double p : plist)
          for (double e : epss) {
            needed.insert({wi, p - 1.0 + e});
            needed.insert({wi, 2.0 * p - 1.0 + e});
            needed.insert({wi, 3.0 * p - 1.0 + e});
          }
    if (mask & G_ENDPOINTS)
      for (int wi = 0; wi < static_cast<int>(weights.size()); ++wi)
        for (double e : epss) {
          needed.insert({wi, e});
          needed.insert({wi, 1.0 + e});
          needed.insert({wi, 2.0 + e});
        }
    for (const auto& [wi, gamma] : needed)
      luxw.emplace(std::make_pair(wi, gamma_key(gamma)),
                   maximal(weights[static_cast<std::size_t>(wi)].w.values(),
                           MaximalSpec{LocalFunctional::Luxemburg(gamma), CubeFamily::dyadic}));
  }
  auto lux_image = [&](int wi, double gamma) -> const GridFunction& {
    return luxw.at(std::make_pair(wi, gamma_key(gamma)));
  };
  const auto t_pre_ms = ms_since(t_pre);
  const auto t_rows_start = Clock::now();

  // helpers shared by the row jobs (all read-only after this point)
  auto entropy_sum = [mu](const GridFunction& f, double lam, double beta,
                          const GridFunction* wvals) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      s += llog_phi(std::fabs(f[i]) / lam, beta) * (wvals ? (*wvals)[i] : 1.0);
    return s * mu;
  };
  auto lp_vals = [mu](const GridFunction& f, const GridFunction& v, double pp) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]), pp) * v[i];
    return std::pow(s * mu, 1.0 / pp);
  };
  auto lebesgue_super = [mu](const GridFunction& f, double lam) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::fabs(f[i]) > lam) ++c;
    return static_cast<double>(c) * mu;
  };
  auto sup_quotient = [](const GridFunction& num, const GridFunction& den) {
    double worst = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i)
      worst = std::max(worst, safe_div(std::fabs(num[i]), den[i]));
    return worst;
  };
  auto dyadic_m = [&](const GridFunction& f) {
    return maximal(f, MaximalSpec{LocalFunctional::Power(1.0), CubeFamily::dyadic});
  };
  auto dyadic_lux = [&](const GridFunction& f, double beta) {
    return maximal(f, MaximalSpec{LocalFunctional::Luxemburg(beta), CubeFamily::dyadic});
  };
  auto loglog = [](double a) { return std::log(kE + a); };

  struct Job {
    ReportRow row;
    std::function<std::string(ReportRow&)> fill; // returns failure note or ""
  };
  // shared by deferred fill lambdas below, so these must outlive the group
  // blocks that enqueue them
  const Cube root = Cube::whole_domain(geom);
  const std::vector<Cube> all_dyadic = dyadic_subcubes(root);
  std::vector<Job> jobs;
  auto add = [&](ReportRow base, std::function<std::string(ReportRow&)> fn) {
    base.seed = seed;
    base.level = geom.level;
    jobs.push_back(Job{std::move(base), std::move(fn)});
  };
  auto base_row = [&](const std::string& id) {
    ReportRow r;
    r.inequality_id = id;
    return r;
  };

  if (mask & G_WEIGHTS) {
    for (std::size_t wi = 0; wi < weights.size(); ++wi)
      for (double p : plist) {
        const WeightCase& W = weights[wi];
        const double pprime = p / (p - 1.0);
        ReportRow b = base_row("");
        b.p = p;
        b.ap = W.ap.at(p);
        b.ainf_w = W.ainf;
        b.ainf_sigma = W.sigma_ainf.at(p);
        {
          ReportRow r = b;
          r.inequality_id = "weights_duality";
          const double lhs = W.sigma_ap.at(p);
          const double rhs = std::pow(W.ap.at(p), pprime - 1.0);
          add(r, [lhs, rhs](ReportRow& out) {
            out.lhs = lhs;
            out.rhs_core = rhs;
            out.ratio = safe_div(lhs, rhs);
            return std::string();
          });
        }
        {
          ReportRow r = b;
          r.inequality_id = "weights_ap_le_a1";
          const double lhs = W.ap.at(p);
          const double rhs = W.a1;
          add(r, [lhs, rhs](ReportRow& out) {
            out.lhs = lhs;
            out.rhs_core = rhs;
            out.ratio = safe_div(lhs, rhs);
            return std::string();
          });
        }
        {
          ReportRow r = b;
          r.inequality_id = "weights_ainf_ge_1";
          const double rhs = W.ainf;
          add(r, [rhs](ReportRow& out) {
            out.lhs = 1.0;
            out.rhs_core = rhs;
            out.ratio = safe_div(1.0, rhs);
            return std::string();
          });
        }
      }
  }

  if (mask & G_ASSUMPTIONS) {
    // the eps column carries the kernel scale t for these rows
    for (double t : ts) {
      ReportRow b = base_row("");
      b.eps = t;
      {
        ReportRow r = b;
        r.inequality_id = "assumption_a10";
        add(r, [&, t](ReportRow& out) {
          AssumptionReport rep = check_assumption_L1(T1, ati, t);
          out.lhs = rep.value;
          out.rhs_core = 1.0;
          out.ratio = rep.value;
          return std::string();
        });
      }
      auto add_pointwise = [&](const char* id, const char* size_id, CompositeSide side) {
        ReportRow r = b;
        r.inequality_id = id;
        add(r, [&, t, side](ReportRow& out) {
          AssumptionReport rep = check_assumption_pointwise(T1, ati, t, side);
          out.lhs = rep.value;
          out.rhs_core = 1.0;
          out.ratio = rep.value;
          return std::string();
        });
        ReportRow rs = b;
        rs.inequality_id = size_id;
        add(rs, [&, t, side](ReportRow& out) {
          AssumptionReport rep = check_assumption_pointwise(T1, ati, t, side);
          out.lhs = rep.size_sup;
          out.rhs_core = 1.0;
          out.ratio = rep.size_sup;
          return std::string();
        });
      };
      add_pointwise("assumption_a11", "assumption_a11_size", CompositeSide::DT);
      add_pointwise("assumption_a12", "assumption_a12_size", CompositeSide::TA);
    }
  }

  if (mask & G_MAXIMAL) {
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      {
        ReportRow hi = base_row("eq2.1_hi");
        add(hi, [&, fi](ReportRow& out) {
          const GridFunction a = dyadic_lux(fs[fi].f, 1.0);
          const GridFunction bfn = dyadic_m(dyadic_m(fs[fi].f));
          out.lhs = sup_quotient(a, bfn);
          out.rhs_core = 1.0;
          out.ratio = out.lhs;
          return std::string();
        });
        ReportRow lo = base_row("eq2.1_lo");
        add(lo, [&, fi](ReportRow& out) {
          const GridFunction a = dyadic_lux(fs[fi].f, 1.0);
          const GridFunction bfn = dyadic_m(dyadic_m(fs[fi].f));
          double low = kInf;
          for (std::size_t i = 0; i < a.size(); ++i)
            if (bfn[i] > 0.0) low = std::min(low, a[i] / bfn[i]);
          if (!std::isfinite(low)) low = 0.0;
          out.lhs = low;
          out.rhs_core = 1.0;
          out.ratio = safe_div(1.0, low);
          return std::string();
        });
      }
      for (double beta : {1.0, 2.0})
        for (double lam : lambdas) {
          ReportRow r = base_row(beta == 1.0 ? "eq2.2_b1" : "eq2.2_b2");
          r.lambda = lam;
          add(r, [&, fi, beta, lam](ReportRow& out) {
            const GridFunction m = dyadic_lux(fs[fi].f, beta);
            out.lhs = lebesgue_super(m, lam);
            out.rhs_core = entropy_sum(fs[fi].f, lam, beta, nullptr);
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        }
      {
        ReportRow r = base_row("eq3.neg1");
        add(r, [&, fi](ReportRow& out) {
          const GridFunction gm = grand_maximal(T1, fs[fi].f);
          const GridFunction m1 = dyadic_m(img[fi].t1);
          const GridFunction m2 = dyadic_lux(fs[fi].f, 1.0);
          GridFunction den(geom);
          for (std::size_t i = 0; i < den.size(); ++i) den[i] = m1[i] + m2[i];
          out.lhs = sup_quotient(gm, den);
          out.rhs_core = 1.0;
          out.ratio = out.lhs;
          return std::string();
        });
      }
      for (int k : ks) {
        ReportRow r = base_row("eq3.1_star_k" + std::to_string(k));
        add(r, [&, fi, k](ReportRow& out) {
          const GridFunction gm = grand_maximal_star(T1, fs[fi].f, k);
          const GridFunction m1 = dyadic_lux(img[fi].t1, static_cast<double>(k));
          const GridFunction m2 = dyadic_lux(fs[fi].f, static_cast<double>(k + 1));
          GridFunction den(geom);
          for (std::size_t i = 0; i < den.size(); ++i) den[i] = m1[i] + m2[i];
          out.lhs = sup_quotient(gm, den);
          out.rhs_core = 1.0;
          out.ratio = out.lhs;
          return std::string();
        });
      }
      for (bool with_m : {true, false}) {
        ReportRow r = base_row(with_m ? "lem3.1" : "rem3.2");
        add(r, [&, fi, with_m](ReportRow& out) {
          const GridFunction gm = grand_maximal_composite(
              T1, T2, fs[fi].f,
              with_m ? CompositeGrandVariant::double_star_m : CompositeGrandVariant::double_star);
          const GridFunction m1 = dyadic_m(img[fi].t12);
          const GridFunction m2 = dyadic_lux(img[fi].t2, 1.0);
          const GridFunction m3 = dyadic_lux(fs[fi].f, 2.0);
          GridFunction den(geom);
          for (std::size_t i = 0; i < den.size(); ++i) den[i] = m1[i] + m2[i] + m3[i];
          out.lhs = sup_quotient(gm, den);
          out.rhs_core = 1.0;
          out.ratio = out.lhs;
          return std::string();
        });
      }
      for (double q : qs) {
        ReportRow r = base_row("lem3.2ii");
        r.q = q;
        add(r, [&, fi, q](ReportRow& out) {
          const double qprime = q / (q - 1.0);
          const GridFunction bg = bisublinear_grand_maximal(T1, T2, fs[fi].f, gfn);
          const GridFunction m1 = dyadic_m(img[fi].t2);
          const GridFunction m2 = dyadic_lux(fs[fi].f, 1.0);
          const GridFunction mq =
              maximal(gfn, MaximalSpec{LocalFunctional::Power(q), CubeFamily::dyadic});
          GridFunction den(geom);
          for (std::size_t i = 0; i < den.size(); ++i)
            den[i] = qprime * (m1[i] + m2[i]) * mq[i];
          out.lhs = sup_quotient(bg, den);
          out.rhs_core = 1.0;
          out.ratio = out.lhs;
          return std::string();
        });
      }
      {
        ReportRow r = base_row("lem2.1");
        add(r, [&, fi](ReportRow& out) {
          const double a1sq = T1.l2_norm() * T1.l2_norm();
          double worst = 0.0;
          for (const Cube& q : all_dyadic) {
            if (q.depth() > std::min(2, geom.level)) continue;
            const GridFunction u = T1.apply(restrict_to(fs[fi].f, q));
            double num = 0.0, ent = 0.0;
            q.for_each_cell([&](std::size_t c) {
              num += llog_phi(std::fabs(u[c]), 1.0);
              ent += llog_phi(std::fabs(fs[fi].f[c]), 2.0);
            });
            num *= mu;
            ent *= mu;
            worst = std::max(worst, safe_div(num, q.measure() + (a1sq + 1.0) * ent));
          }
          out.lhs = worst;
          out.rhs_core = 1.0;
          out.ratio = worst;
          return std::string();
        });
      }
      {
        ReportRow r = base_row("lem2.2");
        add(r, [&, fi](ReportRow& out) {
          double worst = 0.0;
          for (const Cube& q : all_dyadic) {
            if (q.depth() > std::min(4, geom.level)) continue;
            const GridFunction u = T1.apply(T2.apply(restrict_to(fs[fi].f, q)));
            const double num = power_average(u, q, 0.5);
            const double den = luxemburg_norm(fs[fi].f, q, 1.0);
            worst = std::max(worst, safe_div(num, den));
          }
          out.lhs = worst;
          out.rhs_core = 1.0;
          out.ratio = worst;
          return std::string();
        });
      }
    }
  }

  if (mask & G_DOMINATE) {
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      {
        ReportRow r = base_row("dom_comp");
        add(r, [&, fi](ReportRow& out) {
          const CompositionDomination& dom = doms[fi];
          const FormEvaluation ev = evaluate_composition(dom, T1, T2, fs[fi].f, gfn);
          out.lhs = ev.lhs;
          out.rhs_core = ev.form1 + ev.form2;
          out.d = dom.d_max;
          out.ratio = ev.ratio;
          out.family_size = static_cast<int>(dom.family.entries.size());
          std::string err;
          if (dom.d_capped) err = "doubling cap hit before the exceptional set shrank";
          const CertificateCheck cc = check_certificates(dom.family);
          const double support_floor =
              0.5 * std::pow(static_cast<double>(dom.family.dilation), -geom.dim);
          if (!cc.contained || !cc.disjoint)
            err = "sparse certificates violate containment or disjointness";
          else if (cc.eta_base < 0.5 - 1e-12 || cc.eta_support < support_floor - 1e-12)
            err = "sparse certificate density below the guaranteed floor";
          return err;
        });
      }
      for (double q : qs) {
        ReportRow r = base_row("dom_maxcomp");
        r.q = q;
        add(r, [&, fi, q](ReportRow& out) {
          const MaximalDomination md = dominate_maximal_composition(T1, T2, fs[fi].f, gfn, q);
          out.lhs = md.eval.lhs;
          out.rhs_core = md.eval.form1 + md.qprime * md.eval.form2;
          out.d = md.d_max;
          out.ratio = md.eval.ratio;
          out.family_size = static_cast<int>(md.family.entries.size());
          if (md.d_capped) return std::string("doubling cap hit");
          return std::string();
        });
      }
      for (int k : ks) {
        ReportRow r = base_row("dom_single_k" + std::to_string(k));
        add(r, [&, fi, k](ReportRow& out) {
          const SingleDomination sd = sparse_dominate_single(T1, fs[fi].f, k);
          out.lhs = sd.max_pointwise_c;
          out.rhs_core = sd.d_max;
          out.d = sd.d_max;
          out.ratio = sd.ratio;
          out.family_size = static_cast<int>(sd.family.entries.size());
          if (sd.d_capped) return std::string("doubling cap hit");
          return std::string();
        });
      }
    }
  }

  if (mask & G_BOUNDS) {
    for (std::size_t wi = 0; wi < weights.size(); ++wi)
      for (double p : plist)
        for (std::size_t fi = 0; fi < fs.size(); ++fi) {
          const WeightCase& W = weights[wi];
          const double pprime = p / (p - 1.0);
          const double ap = W.ap.at(p);
          const double aw = W.ainf;
          const double as = W.sigma_ainf.at(p);
          ReportRow b = base_row("");
          b.p = p;
          b.ap = ap;
          b.ainf_w = aw;
          b.ainf_sigma = as;
          const double c_single =
              std::pow(ap, 1.0 / p) *
              (std::pow(aw, 1.0 / pprime) + std::pow(as, 1.0 / p)) * as;
          const double c_comp = c_single * (aw + as);
          auto add_norm = [&](const char* id, const GridFunction* image, double cst) {
            ReportRow r = b;
            r.inequality_id = id;
            add(r, [&, wi, fi, p, image, cst](ReportRow& out) {
              out.lhs = weighted_norm(*image, weights[wi].w, p);
              out.rhs_core = cst * weighted_norm(fs[fi].f, weights[wi].w, p);
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          };
          add_norm("thm1.1_1.6", &img[fi].t1, c_single);
          add_norm("thm1.1_1.6_star", &img[fi].tstar, c_single);
          add_norm("thm1.2_1.10", &img[fi].t12, c_comp);
          add_norm("thm1.2_1.10_star", &img[fi].tstar12, c_comp);
          for (double e : epss) {
            {
              ReportRow r = b;
              r.inequality_id = "eq3.9";
              r.eps = e;
              add(r, [&, wi, fi, p, pprime, e](ReportRow& out) {
                const GridFunction& u = weights[wi].w.values();
                const GridFunction& mu_img = lux_image(static_cast<int>(wi), p - 1.0 + e);
                out.lhs = lp_vals(img[fi].t1, u, p);
                out.rhs_core = pprime * pprime * p * p * std::pow(1.0 / e, 1.0 / pprime) *
                               lp_vals(fs[fi].f, mu_img, p);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            {
              ReportRow r = b;
              r.inequality_id = "eq3.11";
              r.eps = e;
              add(r, [&, wi, fi, p, pprime, e](ReportRow& out) {
                const GridFunction& u = weights[wi].w.values();
                const GridFunction& mu_img = lux_image(static_cast<int>(wi), 2.0 * p - 1.0 + e);
                const double block = p * p * std::pow(1.0 / e, 1.0 / pprime);
                out.lhs = lp_vals(img[fi].t12, u, p);
                out.rhs_core = std::pow(pprime, 4.0) * block * block * lp_vals(fs[fi].f, mu_img, p);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            for (bool stmt : {true, false}) {
              ReportRow r = b;
              r.inequality_id = stmt ? "cor3.1_stmt" : "cor3.1_proof";
              r.eps = e;
              add(r, [&, wi, fi, p, pprime, e, stmt](ReportRow& out) {
                const GridFunction& u = weights[wi].w.values();
                const GridFunction& mu3 = lux_image(static_cast<int>(wi), 3.0 * p - 1.0 + e);
                GridFunction v(geom), us(geom);
                for (std::size_t i = 0; i < v.size(); ++i) {
                  v[i] = std::pow(mu3[i], 1.0 - pprime);
                  us[i] = std::pow(u[i], 1.0 - pprime);
                }
                const GridFunction mt = dyadic_m(img[fi].t12);
                const double block = p * p * std::pow(1.0 / e, 1.0 / pprime);
                const double cst = pprime * pprime * block * block * block;
                out.lhs = lp_vals(mt, v, pprime);
                out.rhs_core = cst * lp_vals(fs[fi].f, us, stmt ? p : pprime);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
          }
        }
  }

  if (mask & G_ENDPOINTS) {
    for (std::size_t fi = 0; fi < fs.size(); ++fi)
      for (double lam : lambdas) {
        // unweighted composition endpoints
        auto add_unweighted = [&](const std::string& id, const GridFunction* image, double beta) {
          ReportRow r = base_row(id);
          r.lambda = lam;
          add(r, [&, fi, lam, image, beta](ReportRow& out) {
            out.lhs = lebesgue_super(*image, lam);
            out.rhs_core = entropy_sum(fs[fi].f, lam, beta, nullptr);
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        };
        add_unweighted("thm2.1_2.11_k1", &img[fi].t1, 0.0);
        add_unweighted("thm2.1_2.11_k2", &img[fi].t12, 1.0);
        add_unweighted("thm2.1_2.11_k3", &img[fi].t123, 2.0);
        {
          ReportRow r = base_row("thm2.1_2.12");
          r.lambda = lam;
          add(r, [&, fi, lam](ReportRow& out) {
            const GridFunction m = dyadic_lux(img[fi].t12, 1.0);
            out.lhs = lebesgue_super(m, lam);
            out.rhs_core = entropy_sum(fs[fi].f, lam, 3.0, nullptr);
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        }
        for (std::size_t wi = 0; wi < weights.size(); ++wi) {
          const WeightCase& W = weights[wi];
          ReportRow b = base_row("");
          b.lambda = lam;
          b.ap = W.a1;
          b.ainf_w = W.ainf;
          const double a1 = W.a1;
          const double aw = W.ainf;
          {
            ReportRow r = b;
            r.inequality_id = "thm1.1_1.7";
            add(r, [&, wi, fi, lam, a1, aw](ReportRow& out) {
              out.lhs = lam * superlevel_measure(img[fi].t1, weights[wi].w, lam);
              out.rhs_core = a1 * aw * loglog(aw) * loglog(aw) *
                             lp_vals(fs[fi].f, weights[wi].w.values(), 1.0);
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          }
          {
            ReportRow r = b;
            r.inequality_id = "thm1.1_iii";
            add(r, [&, wi, fi, lam, a1, aw](ReportRow& out) {
              out.lhs = superlevel_measure(img[fi].t1, weights[wi].w, lam);
              out.rhs_core = a1 * loglog(aw) * loglog(aw) *
                             entropy_sum(fs[fi].f, lam, 1.0, &weights[wi].w.values());
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          }
          {
            ReportRow r = b;
            r.inequality_id = "rem3.3";
            add(r, [&, wi, fi, lam, a1, aw](ReportRow& out) {
              out.lhs = lam * superlevel_measure(img[fi].t1, weights[wi].w, lam);
              out.rhs_core =
                  a1 * aw * loglog(aw) * lp_vals(fs[fi].f, weights[wi].w.values(), 1.0);
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          }
          {
            ReportRow r = b;
            r.inequality_id = "thm1.3_1.11";
            add(r, [&, wi, fi, lam, a1, aw](ReportRow& out) {
              out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
              out.rhs_core = a1 * aw * aw * loglog(aw) * loglog(aw) *
                             entropy_sum(fs[fi].f, lam, 1.0, &weights[wi].w.values());
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          }
          {
            ReportRow r = b;
            r.inequality_id = "thm1.3_1.12";
            add(r, [&, wi, fi, lam, a1, aw](ReportRow& out) {
              out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
              out.rhs_core = a1 * aw * loglog(aw) * loglog(aw) *
                             entropy_sum(fs[fi].f, lam, 2.0, &weights[wi].w.values());
              out.ratio = safe_div(out.lhs, out.rhs_core);
              return std::string();
            });
          }
          for (double e : epss) {
            {
              ReportRow r = b;
              r.inequality_id = "eq3.10";
              r.eps = e;
              add(r, [&, wi, fi, lam, e](ReportRow& out) {
                const GridFunction& mu1 = lux_image(static_cast<int>(wi), 1.0 + e);
                out.lhs = lam * superlevel_measure(img[fi].t1, weights[wi].w, lam);
                out.rhs_core = (1.0 / (e * e)) * lp_vals(fs[fi].f, mu1, 1.0);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            {
              ReportRow r = b;
              r.inequality_id = "eq3.12";
              r.eps = e;
              add(r, [&, wi, fi, lam, e](ReportRow& out) {
                const GridFunction& mu1 = lux_image(static_cast<int>(wi), 1.0 + e);
                out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
                out.rhs_core = (1.0 / (e * e)) * entropy_sum(fs[fi].f, lam, 2.0, &mu1);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            {
              ReportRow r = b;
              r.inequality_id = "eq3.13";
              r.eps = e;
              add(r, [&, wi, fi, lam, e](ReportRow& out) {
                const GridFunction& mu2 = lux_image(static_cast<int>(wi), 2.0 + e);
                out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
                out.rhs_core = (1.0 / (e * e)) * entropy_sum(fs[fi].f, lam, 1.0, &mu2);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            {
              ReportRow r = b;
              r.inequality_id = "lem3.4_b2_0";
              r.eps = e;
              add(r, [&, wi, fi, lam, e](ReportRow& out) {
                const GridFunction& mu0 = lux_image(static_cast<int>(wi), e);
                out.d = doms[fi].d_max;
                out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
                out.rhs_core =
                    out.d * std::pow(1.0 / e, 3.0) * entropy_sum(fs[fi].f, lam, 2.0, &mu0);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
            {
              ReportRow r = b;
              r.inequality_id = "lem3.4_b1_1";
              r.eps = e;
              add(r, [&, wi, fi, lam, e](ReportRow& out) {
                const GridFunction& mu1 = lux_image(static_cast<int>(wi), 1.0 + e);
                out.d = doms[fi].d_max;
                out.lhs = superlevel_measure(img[fi].t12, weights[wi].w, lam);
                out.rhs_core =
                    out.d * std::pow(1.0 / e, 2.0) * entropy_sum(fs[fi].f, lam, 1.0, &mu1);
                out.ratio = safe_div(out.lhs, out.rhs_core);
                return std::string();
              });
            }
          }
        }
      }
  }

  if (mask & G_SPARSE) {
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      for (std::size_t wi = 0; wi < weights.size(); ++wi)
        for (double p : plist) {
          const WeightCase& W = weights[wi];
          const double pprime = p / (p - 1.0);
          const double tau_scale = std::pow(2.0, 11.0 + geom.dim);
          const double tau_w = tau_scale * W.ainf;
          const double tau_s = tau_scale * W.sigma_ainf.at(p);
          const double eps1 = (p - 1.0) / (2.0 * p * tau_s + 1.0);
          const double eps2 = (pprime - 1.0) / (2.0 * pprime * tau_w + 1.0);
          ReportRow r = base_row("lem3.3_3.6");
          r.p = p;
          r.eps = eps1;
          r.ap = W.ap.at(p);
          r.ainf_w = W.ainf;
          r.ainf_sigma = W.sigma_ainf.at(p);
          add(r, [&, wi, fi, p, pprime, eps1, eps2](ReportRow& out) {
            const WeightCase& wc = weights[wi];
            out.d = doms[fi].d_max;
            out.family_size = static_cast<int>(doms[fi].family.entries.size());
            out.lhs = sparse_form(doms[fi].family, fs[fi].f, gfn,
                                  LocalFunctional::Power(1.0 + eps1),
                                  LocalFunctional::Power(1.0 + eps2));
            out.rhs_core = std::pow(wc.ap.at(p), 1.0 / p) *
                           (std::pow(wc.sigma_ainf.at(p), 1.0 / p) +
                            std::pow(wc.ainf, 1.0 / pprime)) *
                           weighted_norm(fs[fi].f, wc.w, p) *
                           weighted_norm(gfn, wc.sigma.at(p), pprime);
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        }
      for (double e : epss) {
        {
          ReportRow r = base_row("eq3.7");
          r.eps = e;
          add(r, [&, fi, e](ReportRow& out) {
            out.family_size = static_cast<int>(doms[fi].family.entries.size());
            out.lhs = sparse_form(doms[fi].family, fs[fi].f, gfn, LocalFunctional::Luxemburg(2.0),
                                  LocalFunctional::Power(1.0));
            out.rhs_core = (1.0 / (e * e)) *
                           sparse_form(doms[fi].family, fs[fi].f, gfn,
                                       LocalFunctional::Power(1.0 + e),
                                       LocalFunctional::Power(1.0 + e));
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        }
        {
          ReportRow r = base_row("eq3.8");
          r.eps = e;
          add(r, [&, fi, e](ReportRow& out) {
            out.family_size = static_cast<int>(doms[fi].family.entries.size());
            out.lhs = (1.0 / e) * sparse_form(doms[fi].family, fs[fi].f, gfn,
                                              LocalFunctional::Luxemburg(1.0),
                                              LocalFunctional::Power(1.0 + e));
            out.rhs_core = (1.0 / (e * e)) *
                           sparse_form(doms[fi].family, fs[fi].f, gfn,
                                       LocalFunctional::Power(1.0 + e),
                                       LocalFunctional::Power(1.0 + e));
            out.ratio = safe_div(out.lhs, out.rhs_core);
            return std::string();
          });
        }
        for (double beta : {1.0, 2.0}) {
          ReportRow r = base_row(beta == 1.0 ? "orlicz_vs_power_b1" : "orlicz_vs_power_b2");
          r.eps = e;
          add(r, [&, fi, e, beta](ReportRow& out) {
            double worst = 0.0;
            for (const Cube& q : all_dyadic) {
              if (q.depth() > std::min(4, geom.level)) continue;
              const double num = luxemburg_norm(fs[fi].f, q, beta);
              const double den =
                  std::pow(e, -beta) * power_average(fs[fi].f, q, 1.0 + e);
              worst = std::max(worst, safe_div(num, den));
            }
            out.lhs = worst;
            out.rhs_core = 1.0;
            out.ratio = worst;
            return std::string();
          });
        }
      }
    }
  }

  // evaluate rows; each job writes only its own slot, so any thread count
  // yields identical output
  HarnessResult result;
  result.rows.resize(jobs.size());
  std::vector<std::string> errs(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    ReportRow row = jobs[i].row;
    errs[i] = jobs[i].fill(row);
    result.rows[i] = std::move(row);
  });
  const auto t_rows_ms = ms_since(t_rows_start);

  // assert pass: fill errors, finiteness, config caps, domination flags
  std::map<std::string, double> caps;
  bool require_dom = cfg.get_bool("asserts", "require_domination_ratio_le_1", true);
  for (const std::string& key : cfg.keys("asserts")) {
    if (key.rfind("max_ratio.", 0) != 0) continue;
    caps[key.substr(10)] = cfg.get_double("asserts", key, 0.0);
  }
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    const ReportRow& r = result.rows[i];
    if (!errs[i].empty()) result.failures.push_back({i, r.inequality_id, errs[i]});
    if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs_core) || !std::isfinite(r.ratio))
      result.failures.push_back({i, r.inequality_id, "non-finite value"});
    auto cap = caps.find(r.inequality_id);
    if (cap != caps.end() && r.ratio > cap->second)
      result.failures.push_back(
          {i, r.inequality_id,
           "ratio " + fmt(r.ratio) + " exceeds cap " + fmt(cap->second)});
    if (require_dom &&
        (r.inequality_id == "dom_maxcomp" || r.inequality_id.rfind("dom_single_k", 0) == 0) &&
        r.ratio > 1.0 + 1e-9)
      result.failures.push_back(
          {i, r.inequality_id, "certified domination ratio " + fmt(r.ratio) + " exceeds 1"});
  }
  result.exit_code = result.failures.empty() ? 0 : 1;

  // report.json holds the run metadata and the wall times; rows.csv stays
  // byte-identical across thread counts because times never enter it
  {
    nlohmann::json rep;
    rep["subcommand"] = opt.subcommand;
    rep["config"] = cfg.origin();
    rep["seed"] = seed;
    rep["level"] = geom.level;
    rep["dim"] = geom.dim;
    rep["periodic"] = geom.periodic;
    rep["threads"] = threads;
    rep["rows"] = result.rows.size();
    rep["exit_code"] = result.exit_code;
    nlohmann::json ids = nlohmann::json::object();
    for (const ReportRow& r : result.rows) {
      auto& slot = ids[r.inequality_id];
      if (slot.is_null()) slot = {{"count", 0}, {"max_ratio", 0.0}};
      slot["count"] = slot["count"].get<int>() + 1;
      if (std::isfinite(r.ratio))
        slot["max_ratio"] = std::max(slot["max_ratio"].get<double>(), r.ratio);
    }
    rep["inequalities"] = ids;
    nlohmann::json fails = nlohmann::json::array();
    for (const RowFailure& f : result.failures)
      fails.push_back({{"row", f.index}, {"id", f.inequality_id}, {"message", f.message}});
    rep["failures"] = fails;
    rep["timings_ms"] = {{"setup", t_setup_ms},
                         {"precompute", t_pre_ms},
                         {"rows", t_rows_ms},
                         {"total", ms_since(t_start)}};
    result.report_json = rep.dump(2);
    result.report_json += '\n';
  }

  if (!opt.out_dir.empty()) {
    namespace fsys = std::filesystem;
    const fsys::path out(opt.out_dir);
    fsys::create_directories(out / "plotdata");
    auto write_file = [](const fsys::path& p, const std::string& content) {
      std::ofstream o(p, std::ios::binary);
      if (!o) throw std::runtime_error("cannot write " + p.string());
      o << content;
    };
    write_file(out / "rows.csv", rows_to_csv(result.rows));
    write_file(out / "report.json", result.report_json);
    std::map<std::string, std::string> plots;
    for (const ReportRow& r : result.rows) {
      std::string& s = plots[r.inequality_id];
      if (s.empty()) s = "p,q,eps,lambda,ratio\n";
      s += fmt(r.p) + "," + fmt(r.q) + "," + fmt(r.eps) + "," + fmt(r.lambda) + "," +
           fmt(r.ratio) + "\n";
    }
    for (const auto& [id, content] : plots) {
      std::string name = id;
      for (char& c : name)
        if (c == '/' || c == ' ') c = '_';
      write_file(out / "plotdata" / (name + ".csv"), content);
    }
  }

  return result;
}

} // namespace wsi

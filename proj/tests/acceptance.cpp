// Acceptance gate: eleven numbered criteria, one pass/fail line each.
// Frozen reference values live in a golden JSON file; --regen rewrites it
// from the current build after running every property check.

#include "wsi/config.hpp"
#include "wsi/decomp.hpp"
#include "wsi/generators.hpp"
#include "wsi/harness.hpp"
#include "wsi/kernels.hpp"
#include "wsi/maximal.hpp"
#include "wsi/orlicz.hpp"
#include "wsi/sparse.hpp"
#include "wsi/weights.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace wsi;
using nlohmann::json;

namespace {

struct Gate {
  bool regen = false;
  json golden;      // loaded reference values
  json fresh;       // values observed this run, written on --regen
  bool have_golden = false;
};

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& out, const std::string& msg) {
  out.pass = false;
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += msg;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

GridFunction random_fn(Geometry g, Rng& rng, double density, double amp) {
  GridFunction f(g);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (rng.uniform() < density) f[i] = rng.uniform(-amp, amp);
  return f;
}

double abs_average(const GridFunction& f, const Cube& q) {
  double s = 0.0;
  q.for_each_cell([&](std::size_t c) { s += std::fabs(f[c]); });
  return s / static_cast<double>(q.cell_count());
}

Cube random_dyadic(Geometry g, Rng& rng) {
  const int depth = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.level + 1)));
  const int per_axis = 1 << depth;
  std::array<int, 2> idx{static_cast<int>(rng.below(static_cast<std::uint64_t>(per_axis))), 0};
  if (g.dim == 2) idx[1] = static_cast<int>(rng.below(static_cast<std::uint64_t>(per_axis)));
  return Cube::dyadic_cube(g, depth, idx);
}

double max_ratio_of(const std::vector<ReportRow>& rows, const std::string& id) {
  double best = 0.0;
  bool seen = false;
  for (const auto& r : rows)
    if (r.inequality_id == id) {
      best = std::max(best, r.ratio);
      seen = true;
    }
  return seen ? best : -1.0;
}

// ---- criterion bodies ------------------------------------------------

Outcome c1_orlicz(Gate&) {
  Outcome out;
  Geometry g{1, 8, false};
  Rng rng(3000);
  for (int i = 0; i < 200; ++i) {
    GridFunction f(g);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = rng.uniform(-2, 2);
    Cube q = random_dyadic(g, rng);
    const double lux = luxemburg_norm(f, q, 0.0);
    const double avg = abs_average(f, q);
    if (avg == 0.0) {
      if (lux != 0.0) fail(out, "zero average but nonzero norm");
      continue;
    }
    if (std::fabs(lux - avg) / avg > 1e-10) {
      fail(out, "sample " + std::to_string(i) + ": " + fmt(lux) + " vs " + fmt(avg));
      break;
    }
  }
  return out;
}

Outcome c2_duality(Gate&) {
  Outcome out;
  Geometry g{1, 8, false};
  for (int i = 0; i < 50 && out.pass; ++i) {
    Rng rng(2000 + static_cast<std::uint64_t>(i));
    GridFunction w(g);
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = std::exp(rng.uniform(-1.5, 1.5));
    Weight weight(std::move(w));
    for (double p : {1.5, 2.0, 3.0}) {
      const double pp = p / (p - 1.0);
      const double lhs = weight.dual(p).ap(pp);
      const double rhs = std::pow(weight.ap(p), pp - 1.0);
      if (std::fabs(lhs - rhs) / rhs > 1e-8) {
        fail(out, "weight " + std::to_string(i) + " p=" + fmt(p) + ": " + fmt(lhs) + " vs " +
                      fmt(rhs));
        break;
      }
    }
  }
  return out;
}

Outcome c3_cz(Gate&) {
  Outcome out;
  Rng rng(4100);
  for (int rep = 0; rep < 100 && out.pass; ++rep) {
    Geometry g = rep < 50 ? Geometry{1, 6, false} : Geometry{2, 3, false};
    const int twon = 1 << g.dim;
    GridFunction f = random_fn(g, rng, 0.3, 4.0);
    const double lambda = rng.uniform(0.05, 1.0);
    auto res = cz_decompose(f, lambda, {});

    double cube_measure = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) l1 += std::fabs(f[i]);
    l1 *= g.cell_measure();
    std::vector<std::uint8_t> covered(f.size(), 0);
    for (const Cube& q : res.cubes) {
      const double avg = abs_average(f, q);
      if (!(avg > lambda)) fail(out, "selected cube below lambda");
      if (!q.same_box(res.root)) {
        if (avg > twon * lambda + 1e-12) fail(out, "upper sandwich violated: " + fmt(avg));
        if (abs_average(f, q.parent()) > lambda + 1e-12) fail(out, "parent above lambda");
      }
      cube_measure += q.measure();
      q.for_each_cell([&](std::size_t c) {
        if (covered[c]) fail(out, "cubes overlap");
        covered[c] = 1;
      });
    }
    if (cube_measure > l1 / lambda + 1e-12) fail(out, "packing bound violated");

    GridFunction sum = res.good;
    for (const auto& b : res.bad)
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
    for (std::size_t i = 0; i < f.size(); ++i)
      if (std::fabs(sum[i] - f[i]) > 1e-12 * std::max(1.0, std::fabs(f[i])))
        fail(out, "good + bad does not reconstruct f");

    // indicator variant at 2^-(n+1)
    GridFunction chi(g);
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = rng.uniform() < 0.12 ? 1.0 : 0.0;
    const double lam = 1.0 / static_cast<double>(2 * twon);
    for (const Cube& q : cz_select(chi, lam, Cube::whole_domain(g))) {
      const double frac = abs_average(chi, q);
      if (!(frac > lam)) fail(out, "indicator cube below threshold");
      if (!q.same_box(Cube::whole_domain(g)) && frac > 0.5 + 1e-12)
        fail(out, "indicator sandwich violated: " + fmt(frac));
    }
  }
  return out;
}

Outcome c4_whitney(Gate& gate) {
  Outcome out;
  Rng rng(4400);
  for (double R : {1.5, 3.0}) {
    const int L = std::max(whitney_min_level(R, 1), 6);
    Geometry g{1, L, false};
    const int n = g.cells_per_axis();
    double overlap = 0.0;
    for (int rep = 0; rep < 50 && out.pass; ++rep) {
      std::vector<std::uint8_t> mask(static_cast<std::size_t>(n), 0);
      const int pieces = 1 + static_cast<int>(rng.below(3));
      for (int k = 0; k < pieces; ++k) {
        int len = n / 8 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n / 2)));
        int at = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        for (int i = at; i < std::min(n, at + len); ++i) mask[static_cast<std::size_t>(i)] = 1;
      }
      mask[0] = 0; // keep the complement nonempty
      bool any = false;
      for (auto m : mask) any = any || m;
      if (!any) mask[static_cast<std::size_t>(n / 2)] = 1;

      auto res = whitney_decompose(CellSet::from_mask(g, mask), R);
      std::vector<std::uint8_t> covered(static_cast<std::size_t>(n), 0);
      for (std::size_t qi = 0; qi < res.cubes.size(); ++qi) {
        res.cubes[qi].for_each_cell([&](std::size_t c) {
          if (!mask[c]) fail(out, "cube leaves omega");
          if (covered[c]) fail(out, "cubes overlap");
          covered[c] = 1;
        });
        if (res.floored[qi]) {
          if (res.cubes[qi].extent[0] != 1) fail(out, "floored cube is not a cell");
        } else if (res.ratios[qi] < 5.0 * R - 1e-12 || res.ratios[qi] > 15.0 * R + 1e-12) {
          fail(out, "ratio " + fmt(res.ratios[qi]) + " outside band at R=" + fmt(R));
        }
      }
      for (std::size_t c = 0; c < covered.size(); ++c)
        if (covered[c] != mask[c]) fail(out, "omega not exactly covered");
      overlap = std::max(overlap, res.max_overlap);
    }
    const std::string key = R == 1.5 ? "r1.5" : "r3";
    gate.fresh["whitney_overlap"][key] = overlap;
    if (!gate.regen) {
      const double cap = gate.golden.at("whitney_overlap").at(key).get<double>();
      if (overlap > cap + 1e-9)
        fail(out, "overlap " + fmt(overlap) + " above frozen " + fmt(cap) + " at R=" + fmt(R));
    } else if (overlap > 64.0) {
      fail(out, "overlap " + fmt(overlap) + " implausibly large");
    }
  }
  return out;
}

// shared 20-run matrix for criteria 5 and 6
struct DomRun {
  CompositionDomination comp;
  FormEvaluation comp_eval;
  MaximalDomination maxc;
  SingleDomination single;
};

std::vector<DomRun> domination_matrix() {
  Geometry g{1, 6, true};
  auto T1 = make_operator(OperatorSpec::parse("hilbert"), g);
  auto T2 = make_operator(OperatorSpec::parse("rough:1.5,-1.5"), g);
  const char* kinds[] = {"one_cell", "mix", "haar_like", "smooth_bump", "random_sign"};
  std::vector<DomRun> runs;
  for (int r = 0; r < 20; ++r) {
    Rng rng(1000 + static_cast<std::uint64_t>(r));
    GridFunction f = generate(FunctionSpec::parse(kinds[r % 5]), g, rng);
    GridFunction gg = generate(FunctionSpec::parse("smooth_bump"), g, rng);
    for (std::size_t i = 0; i < gg.size(); ++i) gg[i] = std::fabs(gg[i]) + 0.25;
    DomRun run;
    run.comp = dominate_composition(T1, T2, f);
    run.comp_eval = evaluate_composition(run.comp, T1, T2, f, gg);
    run.maxc = dominate_maximal_composition(T1, T2, f, gg, 2.0);
    run.single = sparse_dominate_single(T1, f, r % 3);
    runs.push_back(std::move(run));
  }
  return runs;
}

void check_family(Outcome& out, const SparseFamily& fam, const char* name, int run) {
  if (fam.entries.empty()) {
    fail(out, std::string(name) + " run " + std::to_string(run) + ": empty family");
    return;
  }
  std::vector<Cube> bases;
  for (const auto& e : fam.entries) bases.push_back(e.base);
  const double eta = verify_sparsity(bases).eta;
  if (eta < 0.5 - 1e-12)
    fail(out, std::string(name) + " run " + std::to_string(run) + ": tree eta " + fmt(eta));
  auto chk = check_certificates(fam);
  if (!chk.contained || !chk.disjoint)
    fail(out, std::string(name) + " run " + std::to_string(run) + ": bad certificates");
  const double floor = 1.0 / 54.0; // half of 27^-n in dimension 1
  if (chk.eta_support < floor - 1e-12)
    fail(out, std::string(name) + " run " + std::to_string(run) + ": global eta " +
                  fmt(chk.eta_support));
}

Outcome c5_sparsity(Gate&) {
  Outcome out;
  auto runs = domination_matrix();
  for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
    check_family(out, runs[static_cast<std::size_t>(r)].comp.family, "composition", r);
    check_family(out, runs[static_cast<std::size_t>(r)].maxc.family, "maximal", r);
    check_family(out, runs[static_cast<std::size_t>(r)].single.family, "single", r);
    if (!out.pass) break;
  }
  return out;
}

Outcome c6_domination(Gate& gate) {
  Outcome out;
  auto runs = domination_matrix();
  double max_d = 0.0;
  for (int r = 0; r < static_cast<int>(runs.size()); ++r) {
    const auto& run = runs[static_cast<std::size_t>(r)];
    if (run.comp_eval.ratio > 1.0 + 1e-9)
      fail(out, "composition run " + std::to_string(r) + ": ratio " + fmt(run.comp_eval.ratio));
    if (run.maxc.eval.ratio > 1.0 + 1e-9)
      fail(out, "maximal run " + std::to_string(r) + ": ratio " + fmt(run.maxc.eval.ratio));
    if (run.single.ratio > 1.0 + 1e-9)
      fail(out, "single run " + std::to_string(r) + ": ratio " + fmt(run.single.ratio));
    if (run.comp.d_capped || run.maxc.d_capped || run.single.d_capped)
      fail(out, "run " + std::to_string(r) + ": D hit the doubling cap");
    max_d = std::max({max_d, run.comp.d_max, run.maxc.d_max, run.single.d_max});
  }
  gate.fresh["dom_max_d"] = max_d;
  if (!gate.regen) {
    const double ref = gate.golden.at("dom_max_d").get<double>();
    if (max_d > 4.0 * ref + 1e-12 || max_d < ref / 4.0 - 1e-12)
      fail(out, "max D " + fmt(max_d) + " outside the 4x band around " + fmt(ref));
  }
  return out;
}

Outcome c7_assumptions(Gate& gate) {
  Outcome out;
  AtIFamily F;
  auto sweep = default_t_sweep(Geometry{1, 10, true});
  double sup10[3] = {0, 0, 0}, sup12[3] = {0, 0, 0};
  for (int pass = 0; pass < 2; ++pass) {
    Geometry g{1, pass == 0 ? 10 : 12, true};
    auto T = make_operator(OperatorSpec::parse("hilbert"), g);
    double* sup = pass == 0 ? sup10 : sup12;
    for (double t : sweep) {
      sup[0] = std::max(sup[0], check_assumption_L1(T, F, t).value);
      sup[1] = std::max(sup[1], check_assumption_pointwise(T, F, t, CompositeSide::DT).value);
      sup[2] = std::max(sup[2], check_assumption_pointwise(T, F, t, CompositeSide::TA).value);
    }
  }
  const char* names[] = {"a1.0", "a1.1", "a1.2"};
  for (int i = 0; i < 3; ++i) {
    gate.fresh["assumption_ref"][names[i]] = {{"L10", sup10[i]}, {"L12", sup12[i]}};
    if (!(sup10[i] > 0.0)) {
      fail(out, std::string(names[i]) + " sup vanished");
      continue;
    }
    const double change = std::fabs(sup12[i] - sup10[i]) / sup10[i];
    if (change > 0.10)
      fail(out, std::string(names[i]) + " moved " + fmt(100 * change) + "% between L=10 and L=12");
  }
  return out;
}

Outcome c8_band(Gate& gate) {
  Outcome out;
  Geometry g{1, 10, true};
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(8000 + static_cast<std::uint64_t>(i));
    GridFunction f = generate(FunctionSpec::parse(i % 2 ? "mix" : "random_sign"), g, rng);
    auto m1 = maximal(f, {LocalFunctional::Luxemburg(1.0), CubeFamily::dyadic});
    auto m = maximal(f, {LocalFunctional::Power(1.0), CubeFamily::dyadic});
    auto mm = maximal(m, {LocalFunctional::Power(1.0), CubeFamily::dyadic});
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (!(mm[c] > 0.0)) {
        fail(out, "MMf vanished at a cell");
        break;
      }
      const double r = m1[c] / mm[c];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  gate.fresh["eq21_band"] = {{"lo", lo}, {"hi", hi}};
  if (!gate.regen) {
    const double glo = gate.golden.at("eq21_band").at("lo").get<double>();
    const double ghi = gate.golden.at("eq21_band").at("hi").get<double>();
    if (lo < glo * (1 - 1e-6) || hi > ghi * (1 + 1e-6))
      fail(out, "band [" + fmt(lo) + ", " + fmt(hi) + "] escapes frozen [" + fmt(glo) + ", " +
                    fmt(ghi) + "]");
  }
  return out;
}

const char* kSweepConfig = R"([grid]
dim = 1
periodic = true
seed = 4242

[operators]
pair = hilbert, rough:1.5,-1.5

[weights]
list = power:-0.4, constant:1, power:0.5
p = 1.5, 2, 3

[functions]
list = one_cell, random_sign, haar_like, smooth_bump, mix
count = 1
g = smooth_bump

[sweeps]
lambda = 0.5, 1, 2, 4
eps = 1, 0.5, 0.25, 0.125
q = 2
k = 0, 1
)";

std::map<std::string, double> sweep_max_ratios(const std::string& sub, int level,
                                               const std::vector<std::string>& ids) {
  auto cfg = Config::parse_text(kSweepConfig, "acceptance-sweep");
  HarnessOptions opt;
  opt.subcommand = sub;
  opt.level_override = level;
  auto res = run_harness(cfg, opt);
  std::map<std::string, double> out;
  for (const auto& id : ids) out[id] = max_ratio_of(res.rows, id);
  return out;
}

Outcome c9_weak(Gate& gate) {
  Outcome out;
  const std::vector<std::string> ids = {"thm2.1_2.11_k2", "thm1.3_1.11", "thm1.3_1.12", "eq3.13"};
  auto m7 = sweep_max_ratios("endpoints", 7, ids);
  auto m8 = sweep_max_ratios("endpoints", 8, ids);
  for (const auto& id : ids) {
    if (m7[id] < 0.0 || m8[id] < 0.0) {
      fail(out, id + ": no rows produced");
      continue;
    }
    gate.fresh["weak_caps"][id] = m8[id];
    gate.fresh["weak_l7"][id] = m7[id];
    if (m8[id] > 1.25 * m7[id] * (1 + 1e-6))
      fail(out, id + " degraded " + fmt(m8[id] / m7[id]) + "x from L=7 to L=8");
    if (!gate.regen) {
      const double cap = gate.golden.at("weak_caps").at(id).get<double>();
      if (m8[id] > cap * (1 + 1e-6))
        fail(out, id + " ratio " + fmt(m8[id]) + " above frozen cap " + fmt(cap));
    }
  }
  return out;
}

Outcome c10_strong(Gate& gate) {
  Outcome out;
  auto mb = sweep_max_ratios("bounds", 8, {"thm1.2_1.10"});
  auto ms = sweep_max_ratios("sparse-forms", 8, {"lem3.3_3.6"});
  const std::map<std::string, double> got = {{"thm1.2_1.10", mb["thm1.2_1.10"]},
                                             {"lem3.3_3.6", ms["lem3.3_3.6"]}};
  for (const auto& [id, val] : got) {
    if (val < 0.0) {
      fail(out, id + ": no rows produced");
      continue;
    }
    gate.fresh["strong_caps"][id] = val;
    if (!gate.regen) {
      const double cap = gate.golden.at("strong_caps").at(id).get<double>();
      if (val > cap * (1 + 1e-6)) fail(out, id + " ratio " + fmt(val) + " above frozen " + fmt(cap));
    }
  }
  return out;
}

Outcome c11_determinism(Gate&) {
  Outcome out;
  auto cfg = Config::parse_file(ACCEPT_SMOKE_CONFIG);
  HarnessOptions one;
  one.threads = 1;
  HarnessOptions eight;
  eight.threads = 8;
  auto a = run_harness(cfg, one);
  auto b = run_harness(cfg, eight);
  if (a.rows.empty()) fail(out, "smoke config produced no rows");
  if (rows_to_csv(a.rows) != rows_to_csv(b.rows)) fail(out, "csv differs between 1 and 8 threads");
  return out;
}

struct Criterion {
  const char* name;
  double budget_s;
  Outcome (*run)(Gate&);
  bool needs_golden;
};

const Criterion kCriteria[] = {
    {"orlicz beta=0 equals plain average", 1, c1_orlicz, false},
    {"duality identity for dual weights", 10, c2_duality, false},
    {"stopping-time decomposition contract", 5, c3_cz, false},
    {"whitney band and overlap", 5, c4_whitney, true},
    {"sparsity certificates", 60, c5_sparsity, false},
    {"domination ratio and D band", 60, c6_domination, true},
    {"kernel assumption stability L=10 vs L=12", 120, c7_assumptions, false},
    {"orlicz maximal vs iterated maximal band", 30, c8_band, true},
    {"weak-type sweep caps and degradation", 300, c9_weak, true},
    {"strong bound and sparse form caps", 300, c10_strong, true},
    {"byte-identical csv across thread counts", 60, c11_determinism, false},
};

} // namespace

int main(int argc, char** argv) {
  Gate gate;
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--regen") == 0) {
      gate.regen = true;
    } else {
      const int n = std::atoi(argv[i]);
      if (n < 1 || n > 11) {
        std::fprintf(stderr, "usage: acceptance [--regen] [criterion 1..11]...\n");
        return 2;
      }
      selected.push_back(n);
    }
  }
  if (selected.empty())
    for (int n = 1; n <= 11; ++n) selected.push_back(n);

  {
    std::ifstream in(ACCEPT_GOLDEN_PATH);
    if (in) {
      in >> gate.golden;
      gate.have_golden = true;
      gate.fresh = gate.golden; // partial --regen keeps the other entries
    }
  }

  int failures = 0;
  for (int n : selected) {
    const Criterion& c = kCriteria[n - 1];
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    if (c.needs_golden && !gate.regen && !gate.have_golden) {
      out.pass = false;
      out.detail = "golden file missing; run acceptance --regen first";
    } else {
      try {
        out = c.run(gate);
      } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && secs > c.budget_s) {
      out.pass = false;
      out.detail = "over budget: " + fmt(secs) + "s > " + fmt(c.budget_s) + "s";
    }
    std::printf("%s %2d  %s (%.2fs)%s%s\n", out.pass ? "PASS" : "FAIL", n, c.name, secs,
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }

  if (gate.regen) {
    std::filesystem::create_directories(
        std::filesystem::path(ACCEPT_GOLDEN_PATH).parent_path());
    std::ofstream outf(ACCEPT_GOLDEN_PATH);
    outf << gate.fresh.dump(2) << "\n";
    std::printf("golden values written to %s\n", ACCEPT_GOLDEN_PATH);
  }
  return failures == 0 ? 0 : 1;
}

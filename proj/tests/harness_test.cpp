#include "doctest.h"

#include "wsi/config.hpp"
#include "wsi/harness.hpp"

#include <cmath>
#include <set>
#include <string>

using namespace wsi;

namespace {

const char* kSmoke = R"([grid]
dim = 1
level = 3
periodic = true
seed = 42

[operators]
pair = hilbert, hilbert

[weights]
list = constant:2
p = 2
family = all

[functions]
list = one_cell, random_sign
count = 1
g = smooth_bump

[sweeps]
lambda = 1
eps = 0.5
q = 2
k = 0
t = 0.0625
)";

HarnessResult run(const std::string& text, HarnessOptions opt) {
  auto cfg = Config::parse_text(text, "inline");
  return run_harness(cfg, opt);
}

} // namespace

TEST_CASE("spec lists tolerate commas inside arguments") {
  std::string text = kSmoke;
  const std::string from = "pair = hilbert, hilbert";
  text.replace(text.find(from), from.size(), "pair = rough:1.5,-1.5, hilbert");
  HarnessOptions opt;
  opt.subcommand = "weights";
  auto res = run(text, opt);
  CHECK(res.exit_code == 0);
  CHECK(!res.rows.empty());

  text = kSmoke;
  const std::string wfrom = "list = constant:2";
  // level 3 grid has 8 cells, so the explicit weight needs 8 values
  text.replace(text.find(wfrom), wfrom.size(),
               "list = values:1,2,1,2,1,2,1,2, constant:2");
  res = run(text, opt);
  CHECK(res.exit_code == 0);
  // two weights, three rows each
  CHECK(res.rows.size() == 6);

  text = kSmoke;
  text.replace(text.find(from), from.size(), "pair = hilbert");
  CHECK_THROWS_AS(run(text, opt), ConfigError);
}

TEST_CASE("report rows are deterministic across thread counts") {
  HarnessOptions one;
  one.threads = 1;
  HarnessOptions four;
  four.threads = 4;
  auto a = run(kSmoke, one);
  auto b = run(kSmoke, four);
  CHECK(a.exit_code == 0);
  REQUIRE(!a.rows.empty());
  CHECK(rows_to_csv(a.rows) == rows_to_csv(b.rows));
}

TEST_CASE("csv header is fixed") {
  std::string csv = rows_to_csv({});
  CHECK(csv == "inequality_id,p,q,eps,lambda,Ap,Ainf_w,Ainf_sigma,lhs,rhs_core,ratio,D,"
               "family_size,seed,L,runtime_ms\n");
}

TEST_CASE("rows carry seed and level and finite ratios") {
  HarnessOptions opt;
  auto res = run(kSmoke, opt);
  CHECK(res.exit_code == 0);
  CHECK(res.failures.empty());
  for (const auto& row : res.rows) {
    CHECK(row.seed == 42);
    CHECK(row.level == 3);
    CHECK(std::isfinite(row.ratio));
    CHECK(row.ratio >= 0.0);
    CHECK(row.runtime_ms == 0.0);
  }
}

TEST_CASE("subcommands select row groups") {
  HarnessOptions opt;
  opt.subcommand = "weights";
  auto res = run(kSmoke, opt);
  CHECK(res.exit_code == 0);
  REQUIRE(!res.rows.empty());
  for (const auto& row : res.rows)
    CHECK(row.inequality_id.rfind("weights_", 0) == 0);

  opt.subcommand = "maximal";
  auto mres = run(kSmoke, opt);
  std::set<std::string> ids;
  for (const auto& row : mres.rows) ids.insert(row.inequality_id);
  CHECK(ids.count("eq2.1_hi") == 1);
  CHECK(ids.count("weights_duality") == 0);

  opt.subcommand = "orbit";
  CHECK_THROWS(run(kSmoke, opt));
}

TEST_CASE("seed override changes the inputs") {
  HarnessOptions opt;
  opt.seed = 7;
  opt.seed_overridden = true;
  auto res = run(kSmoke, opt);
  for (const auto& row : res.rows) CHECK(row.seed == 7);
}

TEST_CASE("level override wins over the config") {
  HarnessOptions opt;
  opt.level_override = 2;
  auto res = run(kSmoke, opt);
  for (const auto& row : res.rows) CHECK(row.level == 2);
}

TEST_CASE("emptied lists produce a header-only run") {
  const char* empty = R"([grid]
level = 3

[weights]
list =

[functions]
list =

[sweeps]
t =
)";
  auto res = run(empty, {});
  CHECK(res.exit_code == 0);
  CHECK(res.rows.empty());
  CHECK(rows_to_csv(res.rows).find('\n') == rows_to_csv(res.rows).size() - 1);
}

TEST_CASE("ratio caps flag failures") {
  std::string text = std::string(kSmoke) + "\n[asserts]\nmax_ratio.weights_ainf_ge_1 = 0.5\n";
  auto res = run(text, {});
  CHECK(res.exit_code == 1);
  bool found = false;
  for (const auto& f : res.failures) found = found || f.inequality_id == "weights_ainf_ge_1";
  CHECK(found);
}

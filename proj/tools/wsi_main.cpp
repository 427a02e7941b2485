#include "wsi/config.hpp"
#include "wsi/harness.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct SubInfo {
  const char* name;
  const char* help;
};

constexpr SubInfo kSubs[] = {
    {"weights", "Muckenhoupt constants and the exact duality identity"},
    {"assumptions", "kernel regularity sups against the smoothing family, per scale"},
    {"maximal", "pointwise bounds for the grand maximal operators and Orlicz maximal bands"},
    {"dominate", "sparse domination of compositions with certificate checks"},
    {"bounds", "weighted strong-type norm inequalities"},
    {"endpoints", "weak-type and entropy-bump endpoint inequalities"},
    {"sparse-forms", "bilinear form comparisons on sparse families"},
    {"report", "every row group in one run"},
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch verifier for the singular integral composition toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  int threads = 1;
  int level = -1;

  for (const SubInfo& info : kSubs) {
    CLI::App* sub = app.add_subcommand(info.name, info.help);
    sub->add_option("--config", config_path, "config file (INI style)")->required();
    sub->add_option("--out", out_dir, "directory for rows.csv, report.json, plotdata/");
    sub->add_option("--seed", seed, "override the config RNG seed");
    sub->add_option("--threads", threads, "worker threads for row evaluation")
        ->check(CLI::PositiveNumber);
    sub->add_option("--level", level, "override the config grid level")
        ->check(CLI::Range(0, 14));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  wsi::HarnessOptions opt;
  opt.subcommand = sub->get_name();
  opt.out_dir = out_dir;
  opt.seed = seed;
  opt.seed_overridden = sub->count("--seed") > 0;
  opt.threads = threads;
  opt.level_override = level;

  try {
    wsi::Config cfg = wsi::Config::parse_file(config_path);
    wsi::HarnessResult res = wsi::run_harness(cfg, opt);
    std::cout << opt.subcommand << ": " << res.rows.size() << " rows, " << res.failures.size()
              << " failures\n";
    for (const wsi::RowFailure& f : res.failures)
      std::cout << "FAIL row " << f.index << " " << f.inequality_id << ": " << f.message << "\n";
    if (!out_dir.empty())
      std::cout << "wrote " << out_dir << "/rows.csv, report.json, plotdata/\n";
    return res.exit_code;
  } catch (const wsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

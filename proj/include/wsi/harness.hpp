#pragma once

#include "wsi/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wsi {

// One data row of rows.csv. runtime_ms stays 0 in the CSV so output is
// byte-identical across thread counts; wall times go to report.json.
struct ReportRow {
  std::string inequality_id;
  double p = 0.0;
  double q = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  double ap = 0.0;
  double ainf_w = 0.0;
  double ainf_sigma = 0.0;
  double lhs = 0.0;
  double rhs_core = 0.0;
  double ratio = 0.0;
  double d = 0.0;
  int family_size = 0;
  std::uint64_t seed = 0;
  int level = 0;
  long long runtime_ms = 0;
};

struct RowFailure {
  std::size_t index = 0; // 0-based data-row index in rows.csv
  std::string inequality_id;
  std::string message;
};

struct HarnessOptions {
  std::string subcommand = "report";
  std::string out_dir; // empty: write no files
  std::uint64_t seed = 42;
  bool seed_overridden = false;
  int threads = 1;
  int level_override = -1;
};

struct HarnessResult {
  std::vector<ReportRow> rows;
  std::vector<RowFailure> failures;
  std::string report_json;
  int exit_code = 0; // 0 all asserts hold, 1 some row failed
};

HarnessResult run_harness(const Config& cfg, const HarnessOptions& opt);

std::string rows_to_csv(const std::vector<ReportRow>& rows);

} // namespace wsi

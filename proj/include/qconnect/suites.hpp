#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qconnect/qkernel.hpp"

namespace qconnect {

// Canonical suite names, in run order.
const std::vector<std::string>& all_suites();

struct RunConfig {
  cplx q{0.3, 0.0};
  int N = 2;
  int M = 2;
  std::vector<std::string> suites = all_suites();
  int samples = 8;
  std::uint64_t seed = 0;
  std::optional<double> tail_tol;
  std::optional<double> cmp_tol;  // replaces every residual bound when set
  std::string output;             // empty: stdout
  int budget = 12;                // max N*M
  bool record_timing = false;     // off keeps reports byte-identical across runs

  // Throws ConfigError on anything out of range or unknown.
  void validate() const;
};

struct CheckRecord {
  std::string suite;
  std::string check;
  std::string params_digest;
  int sample = 0;
  CVec point;
  std::optional<double> residual;  // empty when the check raised
  double bound = 0.0;
  std::string kind = "upper";  // "upper": residual < bound; "lower": residual > bound
  bool pass = false;
  double margin = 0.0;  // decades of headroom, log10(bound/residual) or its inverse for "lower"
  double timing_ms = 0.0;
  std::string error;

  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

struct SuiteSummary {
  std::string suite;
  int count = 0;
  int failed = 0;
  std::optional<double> max_residual;  // over "upper" records
  bool pass = true;

  friend bool operator==(const SuiteSummary&, const SuiteSummary&) = default;
};

struct Report {
  RunConfig config;
  std::vector<CheckRecord> records;
  std::vector<SuiteSummary> summary;
  bool pass = true;
};

bool operator==(const RunConfig& a, const RunConfig& b);
bool operator==(const Report& a, const Report& b);

// Runs every configured suite. Per-check failures and exceptions become
// records; only an invalid configuration throws.
Report run_suite(const RunConfig& cfg);

// Recomputes summaries and the overall flag from the records.
void summarize(Report& rep);

enum class ReportFormat { Json, Table };

std::string emit_report(const Report& rep, ReportFormat format);
// Writes to path; IOError when the file cannot be written.
void write_report(const Report& rep, ReportFormat format, const std::string& path);
Report parse_report(const std::string& json_text);

RunConfig load_config(const std::string& path);
RunConfig config_from_json(const std::string& json_text);
std::string config_to_json(const RunConfig& cfg);

}  // namespace qconnect

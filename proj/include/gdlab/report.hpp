#pragma once
// Experiment report assembly with byte-stable serialization: every floating
// value is rounded to 10 significant digits before it reaches a file, so
// identical (spec, seed) runs produce identical bytes across machines and
// thread counts.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gdlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSchemaVersion = "1";

enum class Verdict { kPass, kFail, kInformational };
const char* verdict_name(Verdict v);

// Rounds to 10 significant digits (the %.10g grid).
double round_sig10(double x);
// %.10g rendering of a double (the exact token written to CSV/JSON).
std::string fmt_sig10(double x);

struct Metric {
  std::string name;
  std::optional<double> estimate;
  std::optional<double> se;
  std::optional<double> analytic;
  Verdict verdict = Verdict::kInformational;
  std::string note;  // convention flags, diagnostics
};

struct ExperimentReport {
  std::string experiment;
  // Echo of the resolved spec, in insertion order.
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<Metric> metrics;

  void add_param(const std::string& key, const std::string& value);
  void add_param(const std::string& key, std::int64_t value);
  void add_param(const std::string& key, double value);

  bool all_pass() const;  // no kFail among metrics
  std::string to_json() const;
  std::string to_csv() const;
};

}  // namespace gdlab

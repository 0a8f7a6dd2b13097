#include "gdlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"

namespace gdlab {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInformational:
      return "informational";
  }
  return "informational";
}

std::string fmt_sig10(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

double round_sig10(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(fmt_sig10(x).c_str(), nullptr);
}

void ExperimentReport::add_param(const std::string& key,
                                 const std::string& value) {
  params.emplace_back(key, value);
}

void ExperimentReport::add_param(const std::string& key, std::int64_t value) {
  params.emplace_back(key, std::to_string(value));
}

void ExperimentReport::add_param(const std::string& key, double value) {
  params.emplace_back(key, fmt_sig10(value));
}

bool ExperimentReport::all_pass() const {
  for (const Metric& m : metrics)
    if (m.verdict == Verdict::kFail) return false;
  return true;
}

namespace {

nlohmann::ordered_json metric_value(const std::optional<double>& v) {
  if (!v.has_value() || std::isnan(*v)) return nullptr;
  return round_sig10(*v);
}

}  // namespace

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["experiment"] = experiment;
  nlohmann::ordered_json p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : params) p[k] = v;
  j["params"] = p;
  nlohmann::ordered_json ms = nlohmann::ordered_json::array();
  for (const Metric& m : metrics) {
    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["estimate"] = metric_value(m.estimate);
    mj["se"] = metric_value(m.se);
    mj["analytic"] = metric_value(m.analytic);
    mj["verdict"] = verdict_name(m.verdict);
    if (!m.note.empty()) mj["note"] = m.note;
    ms.push_back(mj);
  }
  j["metrics"] = ms;
  j["verdict"] = all_pass() ? "pass" : "fail";
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_csv() const {
  std::string out;
  out += "# schema_version: ";
  out += kSchemaVersion;
  out += "\n# tool_version: ";
  out += kToolVersion;
  out += "\n# experiment: " + experiment + "\n";
  for (const auto& [k, v] : params) out += "# " + k + ": " + v + "\n";
  out += "name,estimate,se,analytic,verdict,note\n";
  auto cell = [](const std::optional<double>& v) {
    return (v.has_value() && !std::isnan(*v)) ? fmt_sig10(*v) : std::string();
  };
  for (const Metric& m : metrics) {
    out += m.name;
    out += ',';
    out += cell(m.estimate);
    out += ',';
    out += cell(m.se);
    out += ',';
    out += cell(m.analytic);
    out += ',';
    out += verdict_name(m.verdict);
    out += ',';
    if (m.note.find_first_of(",\"\n") == std::string::npos) {
      out += m.note;
    } else {
      out += '"';
      for (char c : m.note) {
        if (c == '"') out += '"';
        out += c;
      }
      out += '"';
    }
    out += '\n';
  }
  return out;
}

}  // namespace gdlab

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace magnomech {

enum class Verdict { kPass, kFail, kVacuous };

std::string_view verdict_name(Verdict v);
Verdict parse_verdict(std::string_view s);

// Result of one check on one scenario. Residual maps are keyed by what was
// measured; `rows` is a per-sample table described by `columns`.
struct CheckReport {
  std::string scenario;
  std::string check;
  Verdict verdict = Verdict::kPass;
  std::string failed_hypothesis;
  std::map<std::string, double> hypothesis_residuals;
  std::map<std::string, double> equation_residuals;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double wall_time_s = 0.0;

  double hypothesis_residual() const;
  double equation_residual() const;

  bool operator==(const CheckReport&) const = default;
};

nlohmann::json report_to_json(const CheckReport& r);
CheckReport report_from_json(const nlohmann::json& j);

// Aligned plain-text rendering of the summary fields (no sample table).
std::string report_table(const std::vector<CheckReport>& reports);

// Folds verdicts: any FAIL wins, then PASS, VACUOUS only if all are.
Verdict combine(const std::vector<Verdict>& verdicts);

}  // namespace magnomech

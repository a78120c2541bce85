#include "magnomech/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "magnomech/errors.hpp"

namespace magnomech {

using nlohmann::json;

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kVacuous: return "VACUOUS";
  }
  return "FAIL";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "PASS") return Verdict::kPass;
  if (s == "FAIL") return Verdict::kFail;
  if (s == "VACUOUS") return Verdict::kVacuous;
  throw SchemaError("unknown verdict '" + std::string(s) + "'", "/verdict");
}

namespace {

double max_value(const std::map<std::string, double>& m) {
  double out = 0.0;
  for (const auto& [k, v] : m) {
    if (std::isnan(v)) continue;
    out = std::max(out, v);
  }
  return out;
}

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double read_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json map_to_json(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = number(v);
  return out;
}

std::map<std::string, double> map_from_json(const json& j) {
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = read_number(it.value());
  return out;
}

}  // namespace

double CheckReport::hypothesis_residual() const { return max_value(hypothesis_residuals); }
double CheckReport::equation_residual() const { return max_value(equation_residuals); }

json report_to_json(const CheckReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (double v : row) jr.push_back(number(v));
    rows.push_back(std::move(jr));
  }
  json j;
  j["scenario"] = r.scenario;
  j["check"] = r.check;
  j["verdict"] = verdict_name(r.verdict);
  j["failed_hypothesis"] = r.failed_hypothesis;
  j["hypothesis_residuals"] = map_to_json(r.hypothesis_residuals);
  j["equation_residuals"] = map_to_json(r.equation_residuals);
  j["diagnostics"] = map_to_json(r.diagnostics);
  j["notes"] = r.notes;
  j["samples"] = {{"columns", r.columns}, {"rows", rows}};
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

CheckReport report_from_json(const json& j) {
  try {
    CheckReport r;
    r.scenario = j.at("scenario").get<std::string>();
    r.check = j.at("check").get<std::string>();
    r.verdict = parse_verdict(j.at("verdict").get<std::string>());
    r.failed_hypothesis = j.value("failed_hypothesis", std::string{});
    r.hypothesis_residuals = map_from_json(j.at("hypothesis_residuals"));
    r.equation_residuals = map_from_json(j.at("equation_residuals"));
    r.diagnostics = map_from_json(j.value("diagnostics", json::object()));
    r.notes = j.value("notes", std::vector<std::string>{});
    const json& s = j.at("samples");
    r.columns = s.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : s.at("rows")) {
      std::vector<double> row;
      for (const auto& v : jr) row.push_back(read_number(v));
      r.rows.push_back(std::move(row));
    }
    r.wall_time_s = j.value("wall_time_s", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
}

std::string report_table(const std::vector<CheckReport>& reports) {
  std::size_t w_s = 8;
  std::size_t w_c = 5;
  for (const auto& r : reports) {
    w_s = std::max(w_s, r.scenario.size());
    w_c = std::max(w_c, r.check.size());
  }
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w_s)) << "scenario" << "  "
     << std::setw(static_cast<int>(w_c)) << "check" << "  " << std::setw(7) << "verdict"
     << "  " << std::setw(11) << "hypothesis" << "  " << std::setw(11) << "equation" << "\n";
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(w_s)) << r.scenario << "  "
       << std::setw(static_cast<int>(w_c)) << r.check << "  " << std::setw(7)
       << verdict_name(r.verdict) << "  " << std::scientific << std::setprecision(3)
       << std::setw(11) << r.hypothesis_residual() << "  " << std::setw(11)
       << r.equation_residual() << std::defaultfloat;
    if (!r.failed_hypothesis.empty()) os << "  (" << r.failed_hypothesis << ")";
    os << "\n";
  }
  return os.str();
}

Verdict combine(const std::vector<Verdict>& verdicts) {
  bool any_pass = false;
  for (Verdict v : verdicts) {
    if (v == Verdict::kFail) return Verdict::kFail;
    if (v == Verdict::kPass) any_pass = true;
  }
  return any_pass || verdicts.empty() ? Verdict::kPass : Verdict::kVacuous;
}

}  // namespace magnomech

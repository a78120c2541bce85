#include "magnomech/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "magnomech/errors.hpp"
#include "magnomech/integrator.hpp"
#include "magnomech/sampling.hpp"
#include "magnomech/suite.hpp"

namespace magnomech {

using nlohmann::json;

namespace {

int input_error(std::ostream& err, const std::string& code, const std::string& message,
                const std::string& path = {}, std::optional<std::size_t> position = {}) {
  json j = {{"error", code}, {"message", message}};
  if (!path.empty()) j["path"] = path;
  if (position) j["position"] = *position;
  err << j.dump() << "\n";
  return 2;
}

int exit_code(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    if (r.verdict == Verdict::kFail) return 1;
  }
  return 0;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

json reports_json(const std::vector<CheckReport>& reports) {
  std::vector<Verdict> vs;
  json arr = json::array();
  for (const auto& r : reports) {
    vs.push_back(r.verdict);
    arr.push_back(report_to_json(r));
  }
  return {{"verdict", verdict_name(combine(vs))}, {"reports", arr}};
}

int emit(const std::vector<CheckReport>& reports, const std::string& report_path, std::ostream& out) {
  out << report_table(reports);
  if (!report_path.empty()) write_file(report_path, reports_json(reports).dump(2) + "\n");
  return exit_code(reports);
}

std::vector<std::string> scenario_files(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: '" + dir + "'");
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no scenario files in '" + dir + "'");
  return files;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Magnetic and nonholonomic Hamilton-Jacobi checks", "magnomech"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  int samples = 0;
  app.add_option("--seed", seed, "Seed for sample generation");
  app.add_option("--samples", samples, "Override the per-scenario sample count")->check(CLI::PositiveNumber);

  std::string scenario;
  std::string field = "magnetic";
  double t_end = 1.0;
  double dt = 1e-3;
  std::string out_path;
  bool no_project = false;
  auto* sim = app.add_subcommand("simulate", "Integrate a trajectory and write CSV");
  sim->add_option("scenario", scenario)->required();
  sim->add_option("--field", field)->check(CLI::IsMember({"magnetic", "distributional"}));
  sim->add_option("--t-end", t_end);
  sim->add_option("--dt", dt);
  sim->add_option("--out", out_path, "CSV path (stdout if omitted)");
  sim->add_flag("--no-project", no_project);

  auto* check = app.add_subcommand("check", "Run Hamilton-Jacobi and geometry checks");
  check->require_subcommand(1);
  bool reduced = false;
  std::string report_path;
  auto* hj1 = check->add_subcommand("hj1", "Type I check");
  auto* hj2 = check->add_subcommand("hj2", "Type II check");
  auto* geo = check->add_subcommand("geometry", "Compatibility, dimensions and closedness");
  auto* all = check->add_subcommand("all", "Full suite over a scenario directory");
  for (auto* sub : {hj1, hj2, geo}) {
    sub->add_option("scenario", scenario)->required();
    sub->add_option("--report", report_path, "Write the JSON report here");
  }
  for (auto* sub : {hj1, hj2}) sub->add_flag("--reduced", reduced);
  all->add_option("dir", scenario)->required();
  all->add_option("--report", report_path, "Write the JSON report here");

  auto* cb = app.add_subcommand("construct-b", "Write a scenario with B = -d(gamma)");
  cb->add_option("scenario", scenario)->required();
  cb->add_option("--out", out_path, "Output path (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return input_error(err, "usage", e.what());
  }

  try {
    SuiteOptions opts;
    opts.seed = seed;
    opts.samples = samples;
    if (*sim) {
      if (!(dt > 0.0)) throw InvalidArgument("--dt must be positive");
      const ScenarioModel m = build_model(load_scenario_file(scenario));
      const PhasePoint z0 =
          m.initial ? *m.initial : phase_samples(m.system, m.q_box, m.p_box, 1, seed).front();
      const Trajectory tr = integrate(parse_field_kind(field), m.system, z0, {t_end, dt, !no_project});
      if (out_path.empty()) {
        tr.write_csv(out);
      } else {
        std::ofstream f(out_path);
        if (!f) throw IoError("cannot write '" + out_path + "'");
        tr.write_csv(f);
        json summary = {{"scenario", m.spec.name},
                        {"steps", tr.size() - 1},
                        {"energy_drift", tr.max_energy_error()},
                        {"constraint_residual", tr.max_constraint_residual()},
                        {"pre_projection_drift", tr.max_drift()}};
        if (!tr.aborted.empty()) summary["aborted"] = tr.aborted;
        out << summary.dump() << "\n";
      }
      return tr.aborted.empty() ? 0 : 1;
    }
    if (*cb) {
      const ScenarioSpec spec = construct_b(load_scenario_file(scenario));
      build_model(spec);  // validates the constructed field
      const std::string text = serialize_scenario(spec);
      if (out_path.empty()) {
        out << text;
      } else {
        write_file(out_path, text);
      }
      return 0;
    }
    if (*hj1 || *hj2 || *geo) {
      const ScenarioModel m = build_model(load_scenario_file(scenario));
      CheckReport r = *geo ? check_geometry(m, opts) : *hj1 ? check_hj1(m, reduced, opts) : check_hj2(m, reduced, opts);
      return emit({r}, report_path, out);
    }
    if (*all) {
      std::vector<ScenarioModel> models;
      for (const auto& f : scenario_files(scenario)) models.push_back(build_model(load_scenario_file(f)));
      std::vector<std::future<std::vector<CheckReport>>> jobs;
      for (const auto& m : models) {
        jobs.push_back(std::async(std::launch::async, [&m, &opts] { return run_suite(m, opts); }));
      }
      std::vector<CheckReport> reports;
      for (auto& j : jobs) {
        auto part = j.get();
        reports.insert(reports.end(), part.begin(), part.end());
      }
      return emit(reports, report_path, out);
    }
  } catch (const ParseError& e) {
    return input_error(err, std::string(code_name(e.code())), e.what(), e.path(), e.position());
  } catch (const Error& e) {
    return input_error(err, std::string(code_name(e.code())), e.what(), e.path());
  } catch (const std::exception& e) {
    return input_error(err, "InternalError", e.what());
  }
  return 2;
}

}  // namespace magnomech

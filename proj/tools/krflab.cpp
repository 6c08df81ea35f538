// krflab: run, sweep and verify Kähler-Ricci flow scenarios.
#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "krf/scenario.hpp"
#include "suite.hpp"

namespace {

struct Overrides {
  std::string output;
  std::vector<std::string> sets;
  std::string seed;
};

void apply_overrides(krf::ScenarioConfig& config, const Overrides& o) {
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw krf::Error(krf::ErrorKind::ConfigInvalid, "--set expects key=value, got '" + s + "'");
    }
    krf::set_config_value(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.seed.empty()) krf::set_config_value(config, "seed", o.seed);
  if (!o.output.empty()) config.output_dir = o.output;
  krf::validate_config(config);
}

void report(const krf::ScenarioResult& r, const std::string& dir) {
  std::cout << r.config.name << ": " << r.status << ", "
            << krf::to_string(r.verdict.classification) << " (" << r.verdict.cause << ")";
  for (const auto& c : r.checks) {
    if (c.status == krf::CheckStatus::Fail) std::cout << "\n  failed check " << c.name;
  }
  std::cout << "\n  artifacts in " << dir << std::endl;
}

bool ok(const krf::ScenarioResult& r) { return r.status == "completed" && r.all_checks_pass(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kähler-Ricci flow laboratory for U(n)-invariant metrics"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides run_opts;
  std::size_t resolution = 0;
  auto* run = app.add_subcommand("run", "Run one scenario and write its artifacts");
  run->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--output", run_opts.output, "Output directory (overrides output_dir)");
  run->add_option("--resolution", resolution, "Grid nodes (overrides resolution)");
  run->add_option("--seed", run_opts.seed, "Seed recorded in the manifest");
  run->add_option("--set", run_opts.sets, "key=value override, repeatable");

  std::vector<std::string> sweep_configs;
  std::vector<std::size_t> sweep_res;
  Overrides sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Run several scenarios (and resolutions) concurrently");
  sweep->add_option("--config", sweep_configs, "Scenario files")->required()->check(CLI::ExistingFile);
  sweep->add_option("--resolution", sweep_res, "Grid node counts")->delimiter(',');
  sweep->add_option("--output", sweep_opts.output, "Parent output directory")->default_val("krf-sweep");
  sweep->add_option("--set", sweep_opts.sets, "key=value override applied to every run");

  std::vector<int> criteria;
  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
  verify->add_option("criteria", criteria, "Criterion numbers (default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = krf::load_config(config_path);
      if (resolution) config.resolution = resolution;
      apply_overrides(config, run_opts);
      const auto result = krf::run_scenario(config);
      krf::write_artifacts(result, config.output_dir);
      report(result, config.output_dir);
      return ok(result) ? 0 : 1;
    }
    if (*sweep) {
      std::vector<krf::ScenarioConfig> jobs;
      for (const auto& path : sweep_configs) {
        const auto base = krf::load_config(path);
        const std::vector<std::size_t> sizes = sweep_res.empty() ? std::vector<std::size_t>{0} : sweep_res;
        for (std::size_t m : sizes) {
          auto c = base;
          if (m) c.resolution = m;
          Overrides o = sweep_opts;
          o.output = sweep_opts.output + "/" + c.name + (m ? "-m" + std::to_string(m) : "");
          apply_overrides(c, o);
          jobs.push_back(std::move(c));
        }
      }
      std::vector<std::future<krf::ScenarioResult>> futures;
      for (const auto& c : jobs) {
        futures.push_back(std::async(std::launch::async, [c] { return krf::run_scenario(c); }));
      }
      bool all = true;
      for (std::size_t k = 0; k < futures.size(); ++k) {
        const auto result = futures[k].get();
        krf::write_artifacts(result, jobs[k].output_dir);
        report(result, jobs[k].output_dir);
        all = all && ok(result);
      }
      return all ? 0 : 1;
    }
    bool all = true;
    for (const auto& r : krf::acceptance::run_acceptance(criteria)) {
      std::cout << krf::acceptance::format_line(r) << std::endl;
      all = all && r.passed;
    }
    return all ? 0 : 1;
  } catch (const krf::Error& e) {
    std::cerr << "krflab: " << e.what() << std::endl;
    return 2;
  }
}

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "krf/presets.hpp"
#include "krf/scenario.hpp"

using namespace krf;
namespace fs = std::filesystem;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.cfg");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

ScenarioConfig small(const std::string& preset) {
  ScenarioConfig c;
  c.name = preset;
  c.preset = preset;
  c.n = preset == "u2-positive-bisectional" ? 2 : 1;
  c.resolution = 192;
  c.t_end = 0.2L;
  c.dt_max = 5e-3L;
  c.monitor_stride = 20;
  if (preset == "shrinking-fixture") {
    c.rho_min = -16;
    c.rho_max = 16;
    c.resolution = 512;
    c.t_end = 0.99L;
    c.fixture_samples = 24;
  }
  return c;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("krf-unit-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing reads keys, lists and comments") {
  const auto c = parse("# comment\nname = demo  # trailing\npreset = cigar\n\ntaus = 0.5, 1,2\n"
                       "resolution = 300\nmonitor.entropy = false\ntolerance.ricci = 1e-4\n");
  CHECK(c.name == "demo");
  CHECK(c.preset == "cigar");
  REQUIRE(c.taus.size() == 3);
  CHECK(c.taus[0] == 0.5L);
  CHECK(c.taus[2] == 2.0L);
  CHECK(c.resolution == 300);
  CHECK_FALSE(c.monitor_entropy);
  CHECK(c.ricci_tolerance == 1e-4L);
}

TEST_CASE("config errors name the source line and key") {
  const auto unknown = error_of("name = a\n\nfrobnicate = 3\n");
  CHECK(unknown.find("test.cfg:3") != std::string::npos);
  CHECK(unknown.find("frobnicate") != std::string::npos);
  CHECK(error_of("n = 1\nn = 2\n").find("test.cfg:2") != std::string::npos);
  CHECK(error_of("resolution = many\n").find("resolution") != std::string::npos);
  CHECK(error_of("just text\n").find("test.cfg:1") != std::string::npos);
  CHECK_FALSE(error_of("resolution = 8\n").empty());
  CHECK_FALSE(error_of("preset = teapot\n").empty());
  CHECK_FALSE(error_of("preset = shrinking-fixture\nt_end = 1\n").empty());
  CHECK_FALSE(error_of("far_field = sideways\n").empty());
}

TEST_CASE("config echo round-trips through the setters") {
  auto c = parse("name = rt\npreset = positive-bump\ntaus = 0.25, 3\nbump_exponent = 0.7\nseed = 42\n");
  ScenarioConfig d;
  for (const auto& [k, v] : config_pairs(c)) set_config_value(d, k, v);
  CHECK(config_pairs(c) == config_pairs(d));
}

TEST_CASE("verdicts: flat is global, residual failures are inconclusive") {
  const auto r = run_scenario(small("flat"));
  CHECK(r.status == "completed");
  CHECK(r.verdict.classification == Classification::GlobalWithRicciFlatLimit);
  CHECK(r.all_checks_pass());

  VerdictInputs in;
  in.residuals = {make_check("gauge-heat-residual", 1.0L, 0.1L)};
  in.sup_ricci.assign(r.trajectory.size(), 0.0L);
  const auto v = verdict(r.trajectory, in);
  CHECK(v.classification == Classification::Inconclusive);
  CHECK(v.cause.find("gauge-heat-residual") != std::string::npos);
}

TEST_CASE("a positivity failure without curvature growth is inconclusive") {
  const auto grid = make_grid(-6.0L, 6.0L, 64);
  const auto traj = trajectory_from_states({flat_state(1, grid), flat_state(1, grid).rescaled(1.0L, 0.1L)}, 1.0L,
                                           EndStatus::PositivityFailure);
  VerdictInputs in;
  in.sup_ricci = {0.0L, 0.0L};
  const auto v = verdict(traj, in);
  CHECK(v.classification == Classification::Inconclusive);
  CHECK(v.cause == "positivity failure");
}

TEST_CASE("NaN checks fail") {
  CHECK(make_check("x", std::nan(""), 1.0L).status == CheckStatus::Fail);
  CHECK(make_check("x", 0.5L, 1.0L).status == CheckStatus::Pass);
  CHECK(make_check("x", 2.0L, 1.0L).status == CheckStatus::Fail);
}

TEST_CASE("a Ricci-flat class is never asserted with failing checks") {
  for (const auto& preset : preset_names()) {
    const auto r = run_scenario(small(preset));
    INFO(preset << ": " << r.verdict.cause);
    CHECK(r.status == "completed");
    if (r.verdict.classification != Classification::Inconclusive) {
      CHECK(r.all_checks_pass());
      CHECK(r.verdict.cause.find("not applicable") == std::string::npos);
    }
    for (const auto& c : r.checks) {
      if (c.status == CheckStatus::Fail) CHECK(r.verdict.classification == Classification::Inconclusive);
    }
  }
}

TEST_CASE("shrinking fixture runs the blow-up pipeline") {
  auto c = small("shrinking-fixture");
  c.blowup_factor = 50;  // sup|Rm| reaches 100 by t = 0.99
  const auto r = run_scenario(c);
  CHECK(r.trajectory.status == EndStatus::BlowupDetected);
  CHECK(r.blowup.performed);
  CHECK(r.blowup.entries.size() >= 2);
  for (Real b : r.blowup.base_rm) CHECK(std::fabs(b - 1) < 1e-8L);
  CHECK(r.verdict.classification == Classification::Inconclusive);
}

TEST_CASE("summaries are deterministic and artifacts match the manifest") {
  auto c = small("positive-bump");
  c.seed = 7;
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  CHECK(a.summary_json == b.summary_json);
  CHECK(a.manifest_json == b.manifest_json);

  const auto dir = temp_dir("artifacts");
  write_artifacts(a, dir);
  const auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
  CHECK(manifest["schema_version"] == kSchemaVersion);
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["preset"] == "positive-bump");
  for (const auto& f : manifest["files"]) {
    const auto path = dir / f["file"].get<std::string>();
    INFO(path.string());
    CHECK(fs::exists(path));
    if (f.contains("columns")) {
      std::ifstream in(path);
      std::string header;
      std::getline(in, header);
      CHECK(header.find(f["columns"][0].get<std::string>()) != std::string::npos);
    }
  }
  const auto summary = nlohmann::json::parse(std::ifstream(dir / "summary.json"));
  CHECK(summary["schema_version"] == kSchemaVersion);
  CHECK(summary["verdict"]["classification"] == to_string(a.verdict.classification));
  fs::remove_all(dir);
}

TEST_CASE("potential tables load and failures are recorded") {
  const auto dir = temp_dir("table");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "flat.csv");
    out << "rho,P\n";
    const auto grid = make_grid(-6.0L, 6.0L, 128);
    out.precision(21);
    for (std::size_t i = 0; i < grid.size; ++i) out << grid[i] << "," << std::exp(grid[i]) << "\n";
  }
  ScenarioConfig c = small("flat");
  c.potential_table = (dir / "flat.csv").string();
  c.ricci_potential_bounded = true;
  const auto r = run_scenario(c);
  CHECK(r.status == "completed");
  CHECK(r.verdict.classification == Classification::GlobalWithRicciFlatLimit);

  c.potential_table = (dir / "missing.csv").string();
  const auto bad = run_scenario(c);
  CHECK(bad.status == "failed");
  CHECK(bad.failure.find("missing.csv") != std::string::npos);
  write_artifacts(bad, dir / "out");
  CHECK(fs::exists(dir / "out" / "failure.json"));
  fs::remove_all(dir);
}

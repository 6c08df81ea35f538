#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "krf/blowup.hpp"
#include "krf/bounds.hpp"
#include "krf/flow.hpp"
#include "krf/functionals.hpp"
#include "krf/presets.hpp"

namespace krf {

inline constexpr int kSchemaVersion = 1;

/// Flat `key = value` configuration; `#` starts a comment. See README for the keys.
struct ScenarioConfig {
  std::string name = "scenario";
  std::string preset = "flat";
  std::string potential_table;  // CSV with columns rho,P; replaces the preset when set
  FarField far_field = FarField::Exponential;  // for potential tables
  Real far_rate = 1.0L;
  bool ricci_potential_bounded = false;
  int n = 1;
  Real rho_min = -12.0L;
  Real rho_max = 8.0L;
  std::size_t resolution = 512;
  Real t_end = 1.0L;
  Real speed = 1.0L;
  std::vector<Real> taus = {1.0L};
  Real dt_max = 1e-2L;
  Real theta_curv = 0.05L;
  Real blowup_factor = 1e3L;
  std::size_t max_steps = 200000;
  PresetParams params;
  std::size_t fixture_samples = 48;  // stored times of the shrinking fixture

  bool monitor_bounds = true;
  bool monitor_residuals = true;
  bool monitor_entropy = true;
  bool monitor_curvature_operators = true;  // Phong-Sturm sum and bisectional extremes
  bool monitor_blowup = true;
  std::size_t monitor_stride = 10;  // stored states between operator / entropy samples

  Real residual_factor = 10.0L;  // residual tol = factor (dt_max^2 + h^2) max(1, sup|Rm|(0))^2
  Real ricci_tolerance = 1e-3L;  // sup|Ric| accepted as Ricci flat
  Real mu_tolerance = 1e-4L;     // per unit time
  Real normalization_tolerance = 1e-8L;
  Real window_constant = 2.0L;

  std::string output_dir = "krf-out";
  std::uint64_t seed = 0;
};

/// Throws ConfigInvalid naming the source, line and key on any unknown key,
/// malformed value or violated invariant.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);
/// Applies one `key = value` assignment (also used for command-line overrides).
void set_config_value(ScenarioConfig& config, const std::string& key, const std::string& value);
void validate_config(const ScenarioConfig& config);
/// Every key with its current value, in a fixed order (the manifest echo).
std::vector<std::pair<std::string, std::string>> config_pairs(const ScenarioConfig& config);

enum class CheckStatus { Pass, Fail, NotApplicable };
const char* to_string(CheckStatus status);

/// A checked quantity: pass means value <= tolerance.
struct Check {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  Real value = 0.0L;
  Real tolerance = 0.0L;
  std::string note;
};
Check make_check(std::string name, Real value, Real tolerance, std::string note = {});

enum class HypothesisStatus { Holds, Fails, NotApplicable };
const char* to_string(HypothesisStatus status);

struct Hypothesis {
  std::string name;
  HypothesisStatus status = HypothesisStatus::NotApplicable;
  Real value = 0.0L;
  std::string note;
};

enum class Classification {
  FiniteTimeBlowupRicciFlatLimit,
  InfiniteTimeBlowupRicciFlatLimit,
  GlobalWithRicciFlatLimit,
  Inconclusive,
};
const char* to_string(Classification classification);

struct BlowupAnalysis {
  bool performed = false;
  std::string note;
  std::vector<BlowupEntry> entries;
  std::vector<Real> base_rm;
  std::vector<Real> scalar_defect;
  LimitDiagnostics limit;
};

struct Verdict {
  Classification classification = Classification::Inconclusive;
  std::string cause;
  std::vector<std::string> bound_ids;
  std::vector<Check> evidence;
  std::vector<Hypothesis> hypotheses;
};

struct VerdictInputs {
  const BoundReport* bounds = nullptr;   // optional
  std::vector<Check> residuals;          // any Fail forces inconclusive
  const BlowupAnalysis* blowup = nullptr;
  std::vector<Real> sup_ricci;           // per stored state
  Real ricci_tolerance = 1e-3L;
  Real window_constant = 2.0L;
  Real blowup_factor = 1e3L;
  std::vector<Hypothesis> hypotheses;
};

/// Classifies a run. A Ricci-flat limit is never asserted while the relevant
/// Ricci residual is above tolerance and not decreasing over the final
/// quartile of stored times (or over the blow-up sequence).
Verdict verdict(const FlowTrajectory& trajectory, const VerdictInputs& inputs);

/// Blow-up analysis for a trajectory: sequence, rescaled flows, limit diagnostics.
/// NoAdmissiblePoints is reported in the note, not thrown.
BlowupAnalysis analyze_blowup(const FlowTrajectory& trajectory, Real window_constant);

/// One column-separated file: header row plus data rows.
struct Series {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<Real>> rows;
  std::vector<std::string> labels;  // optional first column of text (e.g. status)
  std::string label_column;
};

struct EntropyRecord {
  Real tau = 1.0L;
  bool evaluated = false;  // F, W and mu at t = 0
  std::string note;
  Real f_value = 0.0L;
  Real w_riemannian = 0.0L;
  Real w_kahler = 0.0L;
  Real w_uform = 0.0L;
  Real mu = 0.0L;
  bool mu_converged = false;
  Real sobolev_constant = 0.0L;
  std::vector<CollapseRatio> collapse;
  bool monotonicity_run = false;
  std::string monotonicity_note;
  MonotonicitySeries monotonicity;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::string status = "completed";  // or "failed"
  std::string failure;
  FlowTrajectory trajectory;
  std::optional<BoundReport> bounds;
  BlowupAnalysis blowup;
  std::vector<EntropyRecord> entropy;
  std::vector<Check> checks;
  Verdict verdict;
  std::vector<Series> series;
  std::string summary_json;   // deterministic given the config
  std::string manifest_json;

  bool all_checks_pass() const;
};

/// Runs the scenario in memory. Mid-run failures are caught and recorded
/// (status "failed"), keeping whatever was computed.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Writes the series, summary.json and manifest.json (and failure.json when
/// the run failed) into `dir`, creating it.
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

}  // namespace krf

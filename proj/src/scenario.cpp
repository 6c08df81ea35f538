#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "krf/curvature.hpp"
#include "krf/geometry.hpp"
#include "krf/scenario.hpp"

namespace krf {

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();
constexpr Real kRoundoffTolerance = 1e-10L;

// Evaluates fn(k) for k < count on a few threads; results keep their order.
template <class Fn>
auto parallel_map(std::size_t count, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), count));
  std::vector<std::future<std::vector<T>>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [=, &fn] {
      std::vector<T> part;
      for (std::size_t k = w; k < count; k += workers) part.push_back(fn(k));
      return part;
    }));
  }
  std::vector<std::vector<T>> parts;
  for (auto& j : jobs) parts.push_back(j.get());
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(std::move(parts[k % workers][k / workers]));
  return out;
}

RadialKahlerState load_table(const ScenarioConfig& c) {
  std::ifstream in(c.potential_table);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open potential table " + c.potential_table);
  std::vector<Real> rho, p;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    long double a = 0.0L, b = 0.0L;
    if (!(ss >> a >> b)) {
      if (rho.empty()) continue;  // header row
      throw Error(ErrorKind::ConfigInvalid,
                  c.potential_table + ":" + std::to_string(number) + ": expected 'rho,P'");
    }
    rho.push_back(a);
    p.push_back(b);
  }
  Asymptotics asym;
  asym.far_field = c.far_field;
  asym.far_rate = c.far_rate;
  asym.ricci_potential_bounded = c.ricci_potential_bounded;
  return build_state(c.n, std::span<const Real>(rho), std::move(p), asym);
}

FlowTrajectory shrinking_family(const ScenarioConfig& c) {
  const auto grid = make_grid(c.rho_min, c.rho_max, c.resolution);
  const Real big_t = c.params.shrink_time;
  const Real q = (big_t - c.t_end) / big_t;
  std::vector<RadialKahlerState> states;
  for (std::size_t k = 0; k < c.fixture_samples; ++k) {
    const Real frac = static_cast<Real>(k) / static_cast<Real>(c.fixture_samples - 1);
    const Real t = k + 1 == c.fixture_samples ? c.t_end : big_t * (1.0L - std::pow(q, frac));
    states.push_back(shrinking_fixture_state(grid, big_t, t));
  }
  auto traj = trajectory_from_states(std::move(states), c.speed);
  if (singularity_monitor(traj, c.window_constant, c.blowup_factor).triggered) {
    traj.status = EndStatus::BlowupDetected;
    traj.end_reason = "curvature exceeded the blow-up threshold";
  }
  return traj;
}

Real sup_abs_ricci(const RadialKahlerState& s) {
  const auto ric = ricci_eigenvalues(s);
  Real out = 0.0L;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out = std::max({out, std::fabs(ric.radial[i]), std::fabs(ric.tangential[i])});
  }
  return out;
}

struct OperatorSample {
  Real bisectional_min = 0.0L;
  Real bisectional_max = 0.0L;
  Real phong_sturm_min = kNaN;  // min over nodes of the sum of the two lowest eigenvalues
};

OperatorSample curvature_operators(const RadialKahlerState& s) {
  const auto comps = curvature_components(s);
  const int n = s.dimension();
  OperatorSample out;
  out.bisectional_min = std::numeric_limits<Real>::infinity();
  out.bisectional_max = -std::numeric_limits<Real>::infinity();
  for (std::size_t i = DiffOps::kHalfWidth; i + DiffOps::kHalfWidth < s.size(); ++i) {
    const auto point = curvature_tensor_at(comps, n, i);
    out.bisectional_min = std::min(out.bisectional_min, point.bisectional_min);
    out.bisectional_max = std::max(out.bisectional_max, point.bisectional_max);
    if (n >= 2) {
      const Real sum = phong_sturm_operator(point, n).sum_two_lowest;
      out.phong_sturm_min = std::isnan(out.phong_sturm_min) ? sum : std::min(out.phong_sturm_min, sum);
    }
  }
  return out;
}

std::vector<std::size_t> strided(std::size_t size, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < size; k += stride) out.push_back(k);
  if (out.back() + 1 != size) out.push_back(size - 1);
  return out;
}

Hypothesis hypothesis(std::string name, bool holds, Real value, std::string note = {}) {
  Hypothesis h;
  h.name = std::move(name);
  h.status = holds ? HypothesisStatus::Holds : HypothesisStatus::Fails;
  h.value = value;
  h.note = std::move(note);
  return h;
}

Hypothesis not_applicable(std::string name, std::string note) {
  Hypothesis h;
  h.name = std::move(name);
  h.value = kNaN;
  h.note = std::move(note);
  return h;
}

Check skipped(std::string name, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = kNaN;
  c.tolerance = kNaN;
  c.note = std::move(note);
  return c;
}

std::string tau_label(Real tau) {
  std::ostringstream os;
  os << static_cast<double>(tau);
  return os.str();
}

// Summary and manifest builders live with the writers.
}  // namespace

std::string build_summary_json(const ScenarioResult& result);
std::string build_manifest_json(const ScenarioResult& result);

bool ScenarioResult::all_checks_pass() const {
  if (status != "completed") return false;
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == CheckStatus::Fail; });
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  validate_config(config);
  ScenarioResult r;
  r.config = config;
  const bool fixture = config.potential_table.empty() && config.preset == "shrinking-fixture";
  std::string stage = "initial state";
  std::vector<Real> sup_ricci;
  std::vector<Hypothesis> hypotheses;
  try {
    if (fixture) {
      r.trajectory = shrinking_family(config);
    } else {
      const auto initial =
          config.potential_table.empty()
              ? make_preset(config.preset, config.n,
                            make_grid(config.rho_min, config.rho_max, config.resolution),
                            config.params)
              : load_table(config);
      stage = "flow";
      FlowControls fc;
      fc.speed = config.speed;
      fc.dt_max = config.dt_max;
      fc.theta_curv = config.theta_curv;
      fc.blowup_factor = config.blowup_factor;
      fc.max_steps = config.max_steps;
      r.trajectory = evolve(initial, config.t_end, fc);
    }
    const auto& traj = r.trajectory;
    const auto& s0 = traj.states.front();
    const Real h = s0.grid().spacing;
    const Real dt = fixture ? 0.0L : traj.max_step();
    const Real scale = std::max(1.0L, traj.diagnostics.front().sup_rm);
    const Real residual_tol = config.residual_factor * (dt * dt + h * h) * scale * scale;

    stage = "diagnostics";
    sup_ricci = parallel_map(traj.size(), [&](std::size_t k) { return sup_abs_ricci(traj.states[k]); });
    Series diag{"diagnostics.csv",
                {"time", "dt", "sup_r", "inf_r", "sup_grad_f", "sup_combo", "sup_rm", "rm_rho",
                 "sup_abs_f", "sup_ricci"},
                {}, {}, {}};
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto& d = traj.diagnostics[k];
      diag.rows.push_back({d.time, d.dt, d.sup_r, d.inf_r, d.sup_grad_f, d.sup_combo, d.sup_rm,
                           traj.states[k].rho(d.rm_node), d.sup_abs_f, sup_ricci[k]});
    }
    r.series.push_back(std::move(diag));

    stage = "residuals";
    if (!config.monitor_residuals) {
      // disabled: nothing recorded
    } else if (fixture) {
      for (const char* name : {"gauge-heat-residual", "scalar-evolution-residual", "bochner-residual"}) {
        r.checks.push_back(skipped(name, "synthetic family, not a flow solution"));
      }
    } else if (traj.size() < 3) {
      for (const char* name : {"gauge-heat-residual", "scalar-evolution-residual", "bochner-residual"}) {
        r.checks.push_back(skipped(name, "fewer than three stored states"));
      }
    } else {
      const auto gauge = gauge_track(traj);
      const auto evo = evolution_residuals(traj);
      Series gs{"gauge.csv", {"time", "shift", "heat_residual", "tolerance"}, {}, {}, {}};
      Real heat = 0.0L;
      for (std::size_t k = 0; k < traj.size(); ++k) {
        gs.rows.push_back({traj.time(k), gauge.shift[k], gauge.heat_residual[k], residual_tol});
        heat = std::max(heat, gauge.heat_residual[k]);
      }
      r.series.push_back(std::move(gs));
      Series es{"evolution_residuals.csv", {"time", "scalar", "bochner", "tolerance"}, {}, {}, {}};
      for (std::size_t k = 0; k < evo.times.size(); ++k) {
        es.rows.push_back({evo.times[k], evo.scalar[k], evo.bochner[k], residual_tol});
      }
      r.series.push_back(std::move(es));
      const auto masked = [](std::size_t m) {
        return m ? "up to " + std::to_string(m) + " nodes masked for rounding noise" : std::string();
      };
      r.checks.push_back(make_check("gauge-heat-residual", heat, residual_tol, masked(gauge.masked_nodes)));
      r.checks.push_back(
          make_check("scalar-evolution-residual", evo.max_scalar(), residual_tol, masked(evo.masked_nodes)));
      r.checks.push_back(make_check("bochner-residual", evo.max_bochner(), residual_tol, masked(evo.masked_nodes)));
    }

    stage = "bounds";
    if (config.monitor_bounds && !fixture && traj.size() >= 2) {
      r.bounds = bound_report(traj);
      for (const auto& b : r.bounds->bounds) {
        Series bs{"bound_" + b.id + ".csv", {"time", "lhs", "rhs", "tolerance"}, {}, {}, {}};
        for (std::size_t k = 0; k < b.times.size(); ++k) {
          bs.rows.push_back({b.times[k], b.lhs[k], b.rhs[k], b.tolerance});
        }
        r.series.push_back(std::move(bs));
      }
      hypotheses.push_back(hypothesis("f-bounded", r.bounds->f_bounded, r.bounds->sup_f0,
                                      "sup|f(0)| and the declared far field"));
    } else {
      hypotheses.push_back(not_applicable("f-bounded", fixture ? "synthetic family" : "bounds disabled"));
    }

    stage = "curvature operators";
    if (config.monitor_curvature_operators) {
      const auto picks = strided(traj.size(), config.monitor_stride);
      const auto samples =
          parallel_map(picks.size(), [&](std::size_t j) { return curvature_operators(traj.states[picks[j]]); });
      Series bis{"bisectional.csv", {"time", "min", "max"}, {}, {}, {}};
      Series ps{"phong_sturm.csv", {"time", "min_sum_two_lowest"}, {}, {}, {}};
      for (std::size_t j = 0; j < picks.size(); ++j) {
        bis.rows.push_back({traj.time(picks[j]), samples[j].bisectional_min, samples[j].bisectional_max});
        if (s0.dimension() >= 2) ps.rows.push_back({traj.time(picks[j]), samples[j].phong_sturm_min});
      }
      r.series.push_back(std::move(bis));
      const Real slack = 1e-6L * scale;  // above curvature rounding on typical grids
      hypotheses.push_back(hypothesis("bisectional-nonnegative-t0", samples.front().bisectional_min >= -slack,
                                      samples.front().bisectional_min));
      if (s0.dimension() >= 2) {
        r.series.push_back(std::move(ps));
        hypotheses.push_back(hypothesis("phong-sturm-sum-nonnegative-t0",
                                        samples.front().phong_sturm_min >= -slack,
                                        samples.front().phong_sturm_min));
      } else {
        hypotheses.push_back(not_applicable("phong-sturm-sum-nonnegative-t0", "needs n >= 2"));
      }
    } else {
      hypotheses.push_back(not_applicable("bisectional-nonnegative-t0", "monitor disabled"));
      hypotheses.push_back(not_applicable("phong-sturm-sum-nonnegative-t0", "monitor disabled"));
    }

    stage = "entropy";
    if (config.monitor_entropy) {
      for (Real tau : config.taus) {
        EntropyRecord e;
        e.tau = tau;
        try {
          const auto rep = entropy_report(s0, tau, {0.5L, 1.0L, 2.0L});
          e.evaluated = true;
          e.f_value = rep.f_value;
          e.w_riemannian = rep.w_riemannian;
          e.w_kahler = rep.w_kahler;
          e.w_uform = rep.w_uform;
          e.mu = rep.mu.mu;
          e.mu_converged = rep.mu.converged;
          e.sobolev_constant = rep.probes.sobolev_constant;
          e.collapse = rep.probes.collapse;
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::NonIntegrable && err.kind() != ErrorKind::ConfigInvalid) throw;
          e.note = err.detail();
          // The mu minimizer does not need the Ricci potential to decay.
          try {
            const auto mu = mu_minimize(s0, tau);
            e.mu = mu.mu;
            e.mu_converged = mu.converged;
          } catch (const Error& inner) {
            if (inner.kind() != ErrorKind::ConfigInvalid) throw;
            e.mu = kNaN;
            e.note += "; " + inner.detail();
          }
        }
        const std::string name = "mu-monotonicity:tau=" + tau_label(tau);
        if (fixture) {
          e.monotonicity_note = "synthetic family, not a flow solution";
          r.checks.push_back(skipped(name, e.monotonicity_note));
        } else {
          try {
            e.monotonicity = mu_monotonicity(traj, tau, MonotonicityMode::Shifted, config.mu_tolerance,
                                             config.monitor_stride);
            e.monotonicity_run = true;
            Series ms{"mu_tau" + tau_label(tau) + ".csv", {"time", "tau", "mu", "converged", "tolerance"},
                      {}, {}, {}};
            for (std::size_t k = 0; k < e.monotonicity.times.size(); ++k) {
              ms.rows.push_back({e.monotonicity.times[k], e.monotonicity.taus[k], e.monotonicity.mu[k],
                                 e.monotonicity.sample_converged[k] ? 1.0L : 0.0L, config.mu_tolerance});
            }
            r.series.push_back(std::move(ms));
            r.checks.push_back(make_check(name, std::max(0.0L, -e.monotonicity.worst_rate),
                                          config.mu_tolerance, "largest decrease rate of mu"));
          } catch (const Error& err) {
            if (err.kind() != ErrorKind::ConfigInvalid && err.kind() != ErrorKind::TrajectoryTooShort) throw;
            e.monotonicity_note = err.detail();
            r.checks.push_back(skipped(name, e.monotonicity_note));
          }
        }
        r.entropy.push_back(std::move(e));
      }
      const auto& first = r.entropy.front();
      if (first.evaluated && std::isfinite(first.sobolev_constant)) {
        hypotheses.push_back(hypothesis("sobolev", true, first.sobolev_constant,
                                        "finite best constant over radial densities"));
      } else {
        hypotheses.push_back(not_applicable(
            "sobolev", s0.dimension() < 2 ? "the exponent is infinite for n = 1" : first.note));
      }
    } else {
      hypotheses.push_back(not_applicable("sobolev", "entropy monitor disabled"));
    }

    stage = "blow-up analysis";
    if (config.monitor_blowup) {
      const Real rm0 = traj.diagnostics.front().sup_rm;
      const Real rm1 = traj.diagnostics.back().sup_rm;
      const bool signal = singularity_monitor(traj, config.window_constant, config.blowup_factor).triggered;
      if (signal || rm1 >= 2.0L * std::max(rm0, config.ricci_tolerance)) {
        r.blowup = analyze_blowup(traj, config.window_constant);
        if (r.blowup.performed) {
          const auto& b = r.blowup;
          Real norm = 0.0L, window = 0.0L, scalar = 0.0L;
          Series bs{"blowup.csv",
                    {"step", "time", "rho", "curvature", "window_start", "window_sup", "base_rm",
                     "scalar_defect", "sup_rm", "collapse_ratio", "ricci_residual", "scalar_residual",
                     "profile_distance"},
                    {}, {}, {}};
          for (std::size_t j = 0; j < b.entries.size(); ++j) {
            const auto& e = b.entries[j];
            const auto& l = b.limit.entries[j];
            norm = std::max(norm, std::fabs(b.base_rm[j] - 1.0L));
            window = std::max(window, e.window_sup / (config.window_constant * e.curvature));
            scalar = std::max(scalar, b.scalar_defect[j]);
            bs.rows.push_back({static_cast<Real>(e.step), e.time, e.rho, e.curvature, e.window_start,
                               e.window_sup, b.base_rm[j], b.scalar_defect[j], l.sup_rm, l.collapse_ratio,
                               l.ricci_residual, l.scalar_residual,
                               j == 0 ? kNaN : b.limit.profile_distance[j - 1]});
          }
          r.series.push_back(std::move(bs));
          r.checks.push_back(make_check("blowup-normalization", norm, config.normalization_tolerance,
                                        "max | |Rm(g_j(0))|(base) - 1 |"));
          r.checks.push_back(make_check("blowup-window", window, 1.0L,
                                        "max window sup / (C K_j)"));
          r.checks.push_back(make_check("blowup-scalar-transform", scalar, kRoundoffTolerance,
                                        "max |K R(g_j) - R(g)| / max(1, sup|R|)"));
        }
      }
    }
  } catch (const Error& e) {
    r.status = "failed";
    r.failure = stage + ": " + e.what();
  } catch (const std::exception& e) {
    r.status = "failed";
    r.failure = stage + ": " + e.what();
  }

  if (r.status == "completed") {
    VerdictInputs in;
    in.bounds = r.bounds ? &*r.bounds : nullptr;
    in.residuals = r.checks;
    in.blowup = &r.blowup;
    in.sup_ricci = sup_ricci;
    in.ricci_tolerance = config.ricci_tolerance;
    in.window_constant = config.window_constant;
    in.blowup_factor = config.blowup_factor;
    in.hypotheses = hypotheses;
    r.verdict = verdict(r.trajectory, in);
    if (r.bounds) {
      for (const auto& c : r.verdict.evidence) {
        if (c.name.rfind("bound:", 0) == 0) r.checks.push_back(c);
      }
    }
  } else {
    r.verdict.classification = Classification::Inconclusive;
    r.verdict.cause = "run failed: " + r.failure;
    r.verdict.hypotheses = hypotheses;
  }
  r.summary_json = build_summary_json(r);
  r.manifest_json = build_manifest_json(r);
  return r;
}

}  // namespace krf

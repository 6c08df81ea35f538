#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "krf/scenario.hpp"

namespace krf {

namespace {

using Json = nlohmann::ordered_json;

// NaN and infinities become null.
Json number(Real v) { return std::isfinite(v) ? Json(static_cast<double>(v)) : Json(nullptr); }

std::string csv_number(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17Lg", v);
  return buf;
}

Json check_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["status"] = to_string(c.status);
  j["value"] = number(c.value);
  j["tolerance"] = number(c.tolerance);
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

Json entropy_json(const EntropyRecord& e) {
  Json j;
  j["tau"] = number(e.tau);
  j["evaluated"] = e.evaluated;
  if (!e.note.empty()) j["note"] = e.note;
  if (e.evaluated) {
    j["f_functional"] = number(e.f_value);
    j["w_riemannian"] = number(e.w_riemannian);
    j["w_kahler"] = number(e.w_kahler);
    j["w_uform"] = number(e.w_uform);
    j["sobolev_constant"] = number(e.sobolev_constant);
    Json collapse = Json::array();
    for (const auto& c : e.collapse) {
      collapse.push_back({{"radius", number(c.radius)},
                          {"kappa", number(c.kappa)},
                          {"sup_rm", number(c.sup_rm)},
                          {"admissible", c.admissible}});
    }
    j["collapse"] = collapse;
  }
  j["mu"] = number(e.mu);
  j["mu_converged"] = e.mu_converged;
  Json m;
  m["run"] = e.monotonicity_run;
  if (e.monotonicity_run) {
    m["samples"] = e.monotonicity.times.size();
    m["worst_rate"] = number(e.monotonicity.worst_rate);
    m["non_decreasing"] = e.monotonicity.non_decreasing;
  } else {
    m["note"] = e.monotonicity_note;
  }
  j["monotonicity"] = m;
  return j;
}

}  // namespace

std::string build_summary_json(const ScenarioResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = r.config.name;
  j["source"] = r.config.potential_table.empty() ? r.config.preset : r.config.potential_table;
  j["n"] = r.config.n;
  j["status"] = r.status;
  if (!r.failure.empty()) j["failure"] = r.failure;

  Json run;
  const auto& t = r.trajectory;
  run["end_status"] = to_string(t.status);
  run["end_reason"] = t.end_reason;
  run["stored_states"] = t.size();
  if (t.size() > 0) {
    run["t_final"] = number(t.time(t.size() - 1));
    run["max_step"] = number(t.max_step());
    run["sup_rm_initial"] = number(t.diagnostics.front().sup_rm);
    run["sup_rm_final"] = number(t.diagnostics.back().sup_rm);
    run["sup_r_final"] = number(t.diagnostics.back().sup_r);
  }
  j["run"] = run;

  Json v;
  v["classification"] = to_string(r.verdict.classification);
  v["cause"] = r.verdict.cause;
  v["bound_ids"] = r.verdict.bound_ids;
  Json ev = Json::array();
  for (const auto& c : r.verdict.evidence) ev.push_back(check_json(c));
  v["evidence"] = ev;
  Json hyp = Json::array();
  for (const auto& h : r.verdict.hypotheses) {
    Json x;
    x["name"] = h.name;
    x["status"] = to_string(h.status);
    x["value"] = number(h.value);
    if (!h.note.empty()) x["note"] = h.note;
    hyp.push_back(x);
  }
  v["hypotheses"] = hyp;
  j["verdict"] = v;

  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  j["checks"] = checks;
  j["all_checks_pass"] = r.all_checks_pass();

  if (r.bounds) {
    Json b;
    b["c0"] = number(r.bounds->c0);
    b["bernstein_c"] = number(r.bounds->bernstein_c);
    b["c1"] = number(r.bounds->c1);
    b["sup_f0"] = number(r.bounds->sup_f0);
    b["f_bounded"] = r.bounds->f_bounded;
    Json list = Json::array();
    for (const auto& rec : r.bounds->bounds) {
      Json x;
      x["id"] = rec.id;
      x["statement"] = rec.statement;
      x["status"] = to_string(rec.status);
      x["max_violation"] = number(rec.max_violation);
      x["tolerance"] = number(rec.tolerance);
      x["flagged"] = rec.flagged;
      if (!rec.note.empty()) x["note"] = rec.note;
      list.push_back(x);
    }
    b["records"] = list;
    j["bounds"] = b;
  }

  Json ent = Json::array();
  for (const auto& e : r.entropy) ent.push_back(entropy_json(e));
  j["entropy"] = ent;

  Json bl;
  bl["performed"] = r.blowup.performed;
  if (!r.blowup.note.empty()) bl["note"] = r.blowup.note;
  if (r.blowup.performed) {
    bl["entries"] = r.blowup.entries.size();
    bl["uniform_rm_bound"] = number(r.blowup.limit.uniform_rm_bound);
    bl["ricci_residual_decreasing"] = r.blowup.limit.ricci_residual_decreasing;
  }
  j["blowup"] = bl;

  Json files = Json::array();
  for (const auto& s : r.series) files.push_back(s.file);
  j["files"] = files;
  return j.dump(2) + "\n";
}

std::string build_manifest_json(const ScenarioResult& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["program"] = "krflab";
  Json config;
  for (const auto& [k, v] : config_pairs(r.config)) config[k] = v;
  j["config"] = config;
  j["seed"] = r.config.seed;
  Json files = Json::array();
  for (const auto& s : r.series) {
    files.push_back({{"file", s.file}, {"columns", s.columns}, {"rows", s.rows.size()}});
  }
  files.push_back({{"file", "summary.json"}});
  if (r.status != "completed") files.push_back({{"file", "failure.json"}});
  j["files"] = files;
  return j.dump(2) + "\n";
}

void write_artifacts(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::ConfigInvalid, "cannot write " + (dir / name).string());
    return out;
  };
  for (const auto& s : r.series) {
    auto out = open(s.file);
    bool first = true;
    if (!s.label_column.empty()) {
      out << s.label_column;
      first = false;
    }
    for (const auto& c : s.columns) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\n';
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      bool lead = true;
      if (!s.label_column.empty()) {
        out << (i < s.labels.size() ? s.labels[i] : std::string());
        lead = false;
      }
      for (Real v : s.rows[i]) {
        out << (lead ? "" : ",") << csv_number(v);
        lead = false;
      }
      out << '\n';
    }
  }
  open("summary.json") << r.summary_json;
  open("manifest.json") << r.manifest_json;
  if (r.status != "completed") {
    Json f;
    f["schema_version"] = kSchemaVersion;
    f["failure"] = r.failure;
    open("failure.json") << f.dump(2) << "\n";
  }
}

}  // namespace krf

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/lab.hpp"

#ifndef FASTDIFF_LAB_VERSION
#define FASTDIFF_LAB_VERSION "unknown"
#endif

namespace fastdiff::lab {

using nlohmann::json;

const char* code_version() { return FASTDIFF_LAB_VERSION; }

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError(field + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  if (!obj.is_object()) fail(where.empty() ? "config" : where, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) fail(where.empty() ? key : where + "." + key, "unknown field");
  }
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const std::string field = where.empty() ? std::string(key) : where + "." + key;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(field, "wrong type");
  }
}

template <class T>
void read_optional(const json& obj, const std::string& where, const char* key, std::optional<T>& out) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(obj, where, key, v);
  out = v;
}

// Infinite time bounds are written as null.
void read_bound(const json& obj, const std::string& where, const char* key, double& out, double unbounded) {
  if (!obj.contains(key)) return;
  if (obj.at(key).is_null()) {
    out = unbounded;
    return;
  }
  read(obj, where, key, out);
}

json bound_json(double v) { return std::isfinite(v) && std::abs(v) < 1e299 ? json(v) : json(nullptr); }

json window_json(const WindowPolicy& w) {
  return {{"value_lo", w.value_lo},
          {"value_hi", w.value_hi},
          {"t_min", bound_json(w.t_min)},
          {"t_max", bound_json(w.t_max)},
          {"min_samples", w.min_samples}};
}

void read_window(const json& obj, const std::string& where, WindowPolicy& w) {
  reject_unknown(obj, where, {"value_lo", "value_hi", "t_min", "t_max", "min_samples"});
  read(obj, where, "value_lo", w.value_lo);
  read(obj, where, "value_hi", w.value_hi);
  read_bound(obj, where, "t_min", w.t_min, -1e300);
  read_bound(obj, where, "t_max", w.t_max, 1e300);
  read(obj, where, "min_samples", w.min_samples);
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

void check_window(const WindowPolicy& w, const std::string& where) {
  if (!(w.value_lo > 0.0 && w.value_hi > w.value_lo)) fail(where, "need 0 < value_lo < value_hi");
  if (!(w.t_max > w.t_min)) fail(where, "need t_min < t_max");
  if (w.min_samples < 2) fail(where + ".min_samples", "must be >= 2");
}

}  // namespace

ModelParams ExperimentConfig::params() const {
  try {
    return derive_params(model.n, model.m, model.B);
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    const char* field = msg.rfind("n ", 0) == 0 ? "model.n" : msg.rfind("B ", 0) == 0 ? "model.B" : "model.m";
    fail(field, msg);
  }
}

void validate(const ExperimentConfig& c) {
  if (c.schema_version != kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");
  const ModelParams P = c.params();
  if (!(c.grid.s_max > 0.0) || !std::isfinite(c.grid.s_max)) fail("grid.s_max", "must be > 0");
  if (c.grid.count < 4) fail("grid.count", "must be >= 4");
  if (!(c.time.dt > 0.0)) fail("time.dt", "must be > 0");
  if (!(c.time.t_final > 0.0)) fail("time.t_final", "must be > 0");
  if (c.time.record_every < 1) fail("time.record_every", "must be >= 1");
  const std::string& kind = c.initial.kind;
  if (kind != "eigenmode" && kind != "bump" && kind != "delayed-barenblatt")
    fail("initial_data.kind", "must be eigenmode, bump or delayed-barenblatt (got '" + kind + "')");
  if (!(c.initial.amplitude >= 0.0) || !(c.initial.amplitude < 1.0 - kPositivityFloor))
    fail("initial_data.amplitude", "must lie in [0, 1 - positivity floor)");
  if (c.initial.k < 0) fail("initial_data.k", "must be >= 0");
  if (kind == "eigenmode" && !is_admissible({0, c.initial.k, 0}, P.eta_cr, P))
    fail("initial_data.k", "radial mode k = " + std::to_string(c.initial.k) + " is not admissible for these n, m");
  if (!(c.initial.Bplus > 0.0)) fail("initial_data.Bplus", "must be > 0");
  if (!(c.initial.tau0 > -1.0 / (2.0 * P.p))) fail("initial_data.tau0", "must be > -1/(2p)");
  if (c.analysis.ell && *c.analysis.ell < 0) fail("analysis.ell", "must be >= 0");
  if (c.analysis.ell && P.n == 1 && *c.analysis.ell > 1) fail("analysis.ell", "n = 1 has only ell = 0, 1");
  if (c.analysis.eigen_count < 1) fail("analysis.eigen_count", "must be >= 1");
  if (c.analysis.eta && !std::isfinite(*c.analysis.eta)) fail("analysis.eta", "must be finite");
  if (c.analysis.Lambda && !(*c.analysis.Lambda < 0.0)) fail("analysis.Lambda", "must be < 0");
  for (int k : c.analysis.modes)
    if (k < 0) fail("analysis.modes", "mode indices must be >= 0");
  check_window(c.analysis.window, "analysis.window");
  check_window(c.analysis.shift_window, "analysis.shift_window");
  if (c.sweep.m_values.empty()) fail("sweep.m_values", "must not be empty");
  if (!(c.sweep.dt_scale > 0.0)) fail("sweep.dt_scale", "must be > 0");
  if (!(c.sweep.horizon > 0.0)) fail("sweep.horizon", "must be > 0");
  if (c.sweep.jobs < 0) fail("sweep.jobs", "must be >= 0");
  for (const std::string& f : c.output.formats)
    if (f != "csv" && f != "json") fail("output.formats", "entries must be csv or json (got '" + f + "')");
}

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  ExperimentConfig c = base;
  reject_unknown(doc, "", {"schema_version", "model", "grid", "time", "initial_data", "analysis", "sweep", "output"});
  if (!doc.contains("schema_version")) fail("schema_version", "missing");
  read(doc, "", "schema_version", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");

  if (doc.contains("model")) {
    const json& o = doc["model"];
    reject_unknown(o, "model", {"n", "m", "B"});
    read(o, "model", "n", c.model.n);
    read(o, "model", "m", c.model.m);
    read(o, "model", "B", c.model.B);
  }
  if (doc.contains("grid")) {
    const json& o = doc["grid"];
    reject_unknown(o, "grid", {"s_max", "count"});
    read(o, "grid", "s_max", c.grid.s_max);
    read(o, "grid", "count", c.grid.count);
  }
  if (doc.contains("time")) {
    const json& o = doc["time"];
    reject_unknown(o, "time", {"dt", "t_final", "record_every", "extrapolate"});
    read(o, "time", "dt", c.time.dt);
    read(o, "time", "t_final", c.time.t_final);
    read(o, "time", "record_every", c.time.record_every);
    read(o, "time", "extrapolate", c.time.extrapolate);
  }
  if (doc.contains("initial_data")) {
    const json& o = doc["initial_data"];
    reject_unknown(o, "initial_data", {"kind", "amplitude", "k", "seed", "project_mass", "tau0", "Bplus"});
    read(o, "initial_data", "kind", c.initial.kind);
    read(o, "initial_data", "amplitude", c.initial.amplitude);
    read(o, "initial_data", "k", c.initial.k);
    read(o, "initial_data", "seed", c.initial.seed);
    read(o, "initial_data", "project_mass", c.initial.project_mass);
    read(o, "initial_data", "tau0", c.initial.tau0);
    read(o, "initial_data", "Bplus", c.initial.Bplus);
  }
  if (doc.contains("analysis")) {
    const json& o = doc["analysis"];
    reject_unknown(o, "analysis",
                   {"eta", "ell", "eigen_count", "etas", "Lambda", "modes", "window", "shift_window"});
    read_optional(o, "analysis", "eta", c.analysis.eta);
    read_optional(o, "analysis", "ell", c.analysis.ell);
    read(o, "analysis", "eigen_count", c.analysis.eigen_count);
    read(o, "analysis", "etas", c.analysis.etas);
    read_optional(o, "analysis", "Lambda", c.analysis.Lambda);
    read(o, "analysis", "modes", c.analysis.modes);
    if (o.contains("window")) read_window(o["window"], "analysis.window", c.analysis.window);
    if (o.contains("shift_window")) read_window(o["shift_window"], "analysis.shift_window", c.analysis.shift_window);
  }
  if (doc.contains("sweep")) {
    const json& o = doc["sweep"];
    reject_unknown(o, "sweep", {"m_values", "dt_scale", "horizon", "jobs"});
    read(o, "sweep", "m_values", c.sweep.m_values);
    read(o, "sweep", "dt_scale", c.sweep.dt_scale);
    read(o, "sweep", "horizon", c.sweep.horizon);
    read(o, "sweep", "jobs", c.sweep.jobs);
  }
  if (doc.contains("output")) {
    const json& o = doc["output"];
    reject_unknown(o, "output", {"directory", "formats"});
    read(o, "output", "directory", c.output.directory);
    read(o, "output", "formats", c.output.formats);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), base);
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc = {
      {"schema_version", c.schema_version},
      {"model", {{"n", c.model.n}, {"m", c.model.m}, {"B", c.model.B}}},
      {"grid", {{"s_max", c.grid.s_max}, {"count", c.grid.count}}},
      {"time",
       {{"dt", c.time.dt},
        {"t_final", c.time.t_final},
        {"record_every", c.time.record_every},
        {"extrapolate", c.time.extrapolate}}},
      {"initial_data",
       {{"kind", c.initial.kind},
        {"amplitude", c.initial.amplitude},
        {"k", c.initial.k},
        {"seed", c.initial.seed},
        {"project_mass", c.initial.project_mass},
        {"tau0", c.initial.tau0},
        {"Bplus", c.initial.Bplus}}},
      {"analysis",
       {{"eta", optional_json(c.analysis.eta)},
        {"ell", optional_json(c.analysis.ell)},
        {"eigen_count", c.analysis.eigen_count},
        {"etas", c.analysis.etas},
        {"Lambda", optional_json(c.analysis.Lambda)},
        {"modes", c.analysis.modes},
        {"window", window_json(c.analysis.window)},
        {"shift_window", window_json(c.analysis.shift_window)}}},
      {"sweep",
       {{"m_values", c.sweep.m_values},
        {"dt_scale", c.sweep.dt_scale},
        {"horizon", c.sweep.horizon},
        {"jobs", c.sweep.jobs}}},
      {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}},
  };
  return doc.dump(2);
}

}  // namespace fastdiff::lab

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fastdiff/asymptotics.hpp"
#include "fastdiff/error.hpp"
#include "fastdiff/evolve.hpp"
#include "fastdiff/lab.hpp"
#include "fastdiff/linop.hpp"

namespace fastdiff::lab {

using nlohmann::json;

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero in tables
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out += '"';
        for (char ch : c) {
          if (ch == '"') out += '"';
          out += ch;
        }
        out += '"';
      } else {
        out += c;
      }
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

namespace {

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
  if (!cfg.output.directory.empty()) return cfg.output.directory;
  if (const char* env = std::getenv("FASTDIFF_LAB_OUT"); env && *env) return env;
  return "fastdiff-lab-out";
}

bool wants(const ExperimentConfig& cfg, const char* format) {
  return std::find(cfg.output.formats.begin(), cfg.output.formats.end(), format) != cfg.output.formats.end();
}

json fit_json(const RateFit& f) {
  return {{"slope", f.slope},     {"intercept", f.intercept}, {"r_squared", f.r_squared},
          {"t_lo", f.t_lo},       {"t_hi", f.t_hi},           {"samples", f.samples}};
}

// Row of the rates table; a failed fit keeps the note and leaves numbers empty.
struct RateRow {
  std::string quantity;
  std::optional<RateFit> fit;
  std::string note;
};

Table rates_table(const std::vector<RateRow>& rows) {
  Table t{"rates", {"quantity", "slope", "intercept", "r_squared", "t_lo", "t_hi", "samples", "note"}, {}};
  for (const RateRow& r : rows) {
    if (r.fit)
      t.add({r.quantity, fmt(r.fit->slope), fmt(r.fit->intercept), fmt(r.fit->r_squared), fmt(r.fit->t_lo),
             fmt(r.fit->t_hi), fmt(r.fit->samples), r.note});
    else
      t.add({r.quantity, "", "", "", "", "", "", r.note});
  }
  return t;
}

RateRow try_fit(const std::string& name, const std::vector<double>& t, const std::vector<double>& v,
                const WindowPolicy& w) {
  RateRow row{name, std::nullopt, ""};
  try {
    row.fit = fit_rate(t, v, w);
  } catch (const ValidationError& e) {
    row.note = e.what();
  }
  return row;
}

json rate_rows_json(const std::vector<RateRow>& rows) {
  json out = json::object();
  for (const RateRow& r : rows) out[r.quantity] = r.fit ? fit_json(*r.fit) : json{{"note", r.note}};
  return out;
}

RadialGrid grid_of(const ExperimentConfig& cfg) { return make_grid(cfg.grid.s_max, cfg.grid.count); }

EvolutionState initial_state(const ExperimentConfig& cfg, const RadialGrid& grid, const ModelParams& P) {
  EvolutionState st;
  st.params = P;
  const auto& in = cfg.initial;
  if (in.kind == "delayed-barenblatt") {
    st.w = delayed_barenblatt_data(grid, 0.0, in.tau0, in.Bplus, P);
    st.outer.kind = OuterBoundary::Kind::dirichlet;
    const double tau0 = in.tau0, Bplus = in.Bplus, s_max = grid.s_max;
    st.outer.value = [=](double t) { return delayed_barenblatt_w(t, s_max, tau0, Bplus, P); };
  } else if (in.amplitude == 0.0) {
    st.w = zero_function(grid, 0);
  } else if (in.kind == "eigenmode") {
    st.w = eigenmode_data(grid, in.k, in.amplitude, P);
  } else {
    st.w = bump_data(grid, in.amplitude, in.seed, P, in.project_mass);
  }
  return st;
}

StepOptions step_options(const ExperimentConfig& cfg) {
  StepOptions so;
  so.extrapolate = cfg.time.extrapolate;
  return so;
}

std::string eta_label(double eta) { return "w_eta_" + fmt(eta); }

double max_drift(const std::vector<double>& mass) {
  double d = 0.0;
  for (double x : mass) d = std::max(d, std::abs(x - mass.front()));
  return d;
}

// Max error against the delayed Barenblatt at t_final.
double mms_error(const ExperimentConfig& cfg, int count, double dt, const ModelParams& P) {
  ExperimentConfig c = cfg;
  c.grid.count = count;
  const RadialGrid grid = grid_of(c);
  const EvolutionState st = initial_state(c, grid, P);
  RecordOptions ro;
  ro.every = 1 << 30;
  ro.energy = false;
  ro.snapshot_every = 1;
  const EvolutionTrace tr = run(st, dt, c.time.t_final, ro, step_options(c));
  const Snapshot& last = tr.snapshots.back();
  double err = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    err = std::max(err, std::abs(last.w[i] - delayed_barenblatt_w(last.t, grid.node(i), c.initial.tau0,
                                                                   c.initial.Bplus, P)));
  return err;
}

std::string describe(const ModeIndex& md) {
  return "(" + std::to_string(md.ell) + "," + std::to_string(md.k) + ")";
}

}  // namespace

std::vector<std::filesystem::path> write_bundle(const ReportBundle& bundle, const ExperimentConfig& cfg,
                                                double wall_seconds) {
  const std::filesystem::path dir = output_dir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("output: cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("output: cannot write " + path.string());
    out << text;
    written.push_back(path);
  };
  if (wants(cfg, "csv"))
    for (const Table& t : bundle.tables) put(dir / (t.name + ".csv"), to_csv(t));
  if (wants(cfg, "json")) {
    json tables = json::array();
    for (const Table& t : bundle.tables) tables.push_back(t.name + ".csv");
    json doc = {{"command", bundle.command},
                {"exit_code", bundle.exit_code},
                {"summary", json::parse(bundle.summary_json.empty() ? "{}" : bundle.summary_json)},
                {"tables", tables},
                {"provenance",
                 {{"config", json::parse(config_to_json(cfg))},
                  {"code_version", code_version()},
                  {"wall_seconds", wall_seconds}}}};
    put(dir / "summary.json", doc.dump(2) + "\n");
  }
  return written;
}

// ------------------------------------------------------------------ spectrum

ReportBundle cmd_spectrum(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelParams P = cfg.params();
  const RadialGrid grid = grid_of(cfg);
  const double eta = cfg.analysis.eta.value_or(P.eta_cr);
  const std::vector<SpectralDatum> modes = admissible_modes(eta, P);

  std::vector<int> ells;
  if (cfg.analysis.ell) {
    ells.push_back(*cfg.analysis.ell);
  } else {
    int top = 0;
    for (const auto& d : modes) top = std::max(top, d.mode->ell);
    for (int l = 0; l <= top; ++l) ells.push_back(l);
  }

  Table closed{"spectrum_closed_form", {"ell", "k", "lambda", "threshold"}, {}};
  Table disc{"spectrum_discrete",
             {"ell", "eta", "index", "re", "im", "match_ell", "match_k", "closed_form", "error", "above_threshold"},
             {}};
  json per_ell = json::array();
  double worst = 0.0;
  int matched = 0, expected = 0;
  for (int ell : ells) {
    const double thr = essential_threshold(ell, eta, P);
    int here = 0;
    for (const auto& d : modes) {
      if (d.mode->ell != ell) continue;
      closed.add({fmt(ell), fmt(d.mode->k), fmt(d.lambda), fmt(thr)});
      ++here;
    }
    expected += here;
    const TridiagonalOperator op = assemble(ell, eta, grid, P);
    const SpectrumReport rep = top_eigenvalues(op, std::max(cfg.analysis.eigen_count, here + 1));
    for (std::size_t i = 0; i < rep.discrete.size(); ++i) {
      const DiscreteEigenvalue& d = rep.discrete[i];
      std::vector<std::string> row{fmt(ell), fmt(eta), fmt(static_cast<int>(i)), fmt(d.value.real()),
                                   fmt(d.value.imag())};
      if (d.match) {
        row.insert(row.end(), {fmt(d.match->ell), fmt(d.match->k), fmt(eigenvalue(*d.match, P)), fmt(d.match_error)});
        if (d.above_threshold) {
          ++matched;
          worst = std::max(worst, std::abs(d.match_error));
        }
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
      row.push_back(d.above_threshold ? "1" : "0");
      disc.add(row);
    }
    per_ell.push_back({{"ell", ell},
                       {"threshold", thr},
                       {"closed_form_modes", here},
                       {"above_threshold", rep.count_above_threshold()},
                       {"symmetrizable", rep.symmetrizable}});
  }

  // Near-coincident closed-form eigenvalues.
  std::vector<SpectralDatum> sorted = modes;
  json crossings = json::array();
  Table cross{"spectrum_crossings", {"group", "ell", "k", "lambda"}, {}};
  int group = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && std::abs(sorted[j].lambda - sorted[j - 1].lambda) <=
                                    1e-2 * std::max(1.0, std::abs(sorted[j].lambda)))
      ++j;
    if (j - i >= 2 && !(sorted[i].mode->ell == 0 && sorted[i].lambda == 0.0)) {
      json members = json::array();
      for (std::size_t k = i; k < j; ++k) {
        members.push_back(describe(*sorted[k].mode));
        cross.add({fmt(group), fmt(sorted[k].mode->ell), fmt(sorted[k].mode->k), fmt(sorted[k].lambda)});
      }
      crossings.push_back({{"lambda", sorted[i].lambda}, {"modes", members}});
      ++group;
    }
    i = j;
  }

  ReportBundle b;
  b.command = "spectrum";
  b.tables = {closed, disc, cross};
  json s = {{"eta", eta},
            {"harmonics", per_ell},
            {"closed_form_above_threshold", expected},
            {"matched", matched},
            {"max_abs_match_error", worst},
            {"crossings", crossings},
            {"h", grid.h()},
            {"s_max", grid.s_max}};
  b.summary_json = s.dump();
  b.messages.push_back("eta = " + fmt(eta) + ": matched " + std::to_string(matched) + " of " +
                       std::to_string(expected) + " closed-form eigenvalues, max error " + fmt(worst));
  for (const auto& c : crossings) b.messages.push_back("crossing near lambda = " + fmt(c["lambda"].get<double>()));
  return b;
}

// --------------------------------------------------------------------- modes

ReportBundle cmd_modes(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelParams P = cfg.params();
  const double eta = cfg.analysis.eta.value_or(P.eta_cr);
  Table t{"modes", {"ell", "k", "lambda", "threshold", "eta"}, {}};
  for (const auto& d : admissible_modes(eta, P))
    t.add({fmt(d.mode->ell), fmt(d.mode->k), fmt(d.lambda), fmt(essential_threshold(d.mode->ell, eta, P)), fmt(eta)});

  const Landmarks L = landmarks(P);
  Table lm{"landmarks", {"name", "m"}, {}};
  lm.add({"m_0", fmt(L.m0)});
  lm.add({"m_1", fmt(L.m1)});
  lm.add({"m_2", fmt(L.m2)});
  lm.add({"m_6", fmt(L.m6)});
  lm.add({"m_n", fmt(L.mn)});
  lm.add({"m_n+4", fmt(L.mn4)});
  if (L.m_pstar) lm.add({"m_p*", fmt(*L.m_pstar)});

  json rates;
  try {
    const SecondOrderRates r = second_order_rates(P);
    rates = {{"gamma", r.gamma}, {"delta", r.delta}, {"branch", to_string(r.branch)}};
    if (r.branch_other)
      rates["other"] = {{"gamma", *r.gamma_other}, {"delta", *r.delta_other}, {"branch", to_string(*r.branch_other)}};
  } catch (const ValidationError& e) {
    rates = {{"note", e.what()}};
  }

  ReportBundle b;
  b.command = "modes";
  b.tables = {t, lm};
  json s = {{"p", P.p},
            {"beta", P.beta},
            {"eta_cr", P.eta_cr},
            {"eta", eta},
            {"continuum_onset", continuum_onset(P)},
            {"modes", static_cast<int>(t.rows.size())},
            {"second_order", rates}};
  b.summary_json = s.dump();
  b.messages.push_back("p = " + fmt(P.p) + ", " + std::to_string(t.rows.size()) + " modes above threshold at eta = " +
                       fmt(eta));
  return b;
}

// -------------------------------------------------------------------- evolve

ReportBundle cmd_evolve(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelParams P = cfg.params();
  const RadialGrid grid = grid_of(cfg);
  const EvolutionState st = initial_state(cfg, grid, P);
  const Envelope env = comparison_envelope(st.w, P);

  RecordOptions ro;
  ro.every = cfg.time.record_every;
  ro.etas = cfg.analysis.etas;
  const EvolutionTrace tr = run(st, cfg.time.dt, cfg.time.t_final, ro, step_options(cfg));

  Table trace{"trace", {"t", "sup_norm"}, {}};
  for (double e : tr.etas) trace.header.push_back(eta_label(e));
  trace.header.insert(trace.header.end(), {"mass_defect", "energy", "min_v", "max_v"});
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<std::string> row{fmt(tr.times[k]), fmt(tr.sup_norms[k])};
    for (const auto& wn : tr.weighted_norms) row.push_back(fmt(wn[k]));
    row.insert(row.end(), {fmt(tr.mass[k]), fmt(tr.energy[k]), fmt(tr.min_v[k]), fmt(tr.max_v[k])});
    trace.add(row);
  }

  const WindowPolicy& w = cfg.analysis.window;
  WindowPolicy we = w;
  we.value_lo = w.value_lo * w.value_lo;
  we.value_hi = w.value_hi * w.value_hi;
  std::vector<RateRow> rows{try_fit("sup_norm", tr.times, tr.sup_norms, w)};
  for (std::size_t k = 0; k < tr.etas.size(); ++k)
    rows.push_back(try_fit(eta_label(tr.etas[k]), tr.times, tr.weighted_norms[k], w));
  rows.push_back(try_fit("energy", tr.times, tr.energy, we));

  const double vmin = *std::min_element(tr.min_v.begin(), tr.min_v.end());
  const double vmax = *std::max_element(tr.max_v.begin(), tr.max_v.end());
  const bool inside = vmin >= env.lower * (1.0 - 1e-12) && vmax <= env.upper * (1.0 + 1e-12);

  ReportBundle b;
  b.command = "evolve";
  b.tables = {trace, rates_table(rows)};
  json s = {{"rates", rate_rows_json(rows)},
            {"window", w.describe()},
            {"energy_window", we.describe()},
            {"lambda_01", eigenvalue({0, 1, 0}, P)},
            {"mass_drift_per_time", max_drift(tr.mass) / cfg.time.t_final},
            {"envelope", {{"lower", env.lower}, {"upper", env.upper}, {"min_v", vmin}, {"max_v", vmax}, {"inside", inside}}},
            {"newton_iterations", tr.newton_iterations},
            {"halvings", tr.halvings}};
  if (cfg.initial.kind == "eigenmode") s["predicted_rate"] = eigenvalue({0, cfg.initial.k, 0}, P);

  if (cfg.initial.kind == "delayed-barenblatt") {
    Table mms{"mms", {"refine", "count", "dt", "error", "order"}, {}};
    const int c0 = std::max(4, cfg.grid.count / 4);
    double prev = 0.0;
    json orders = json::array();
    for (int lvl = 0; lvl < 3; ++lvl) {
      const int count = c0 << lvl;
      const double e = mms_error(cfg, count, cfg.time.dt, P);
      const double order = lvl ? std::log2(prev / e) : std::nan("");
      mms.add({"h", fmt(count), fmt(cfg.time.dt), fmt(e), lvl ? fmt(order) : ""});
      if (lvl) orders.push_back(order);
      prev = e;
    }
    json dt_orders = json::array();
    for (int lvl = 0; lvl < 3; ++lvl) {
      const double dt = cfg.time.dt * 4.0 / (1 << lvl);
      const double e = mms_error(cfg, cfg.grid.count, dt, P);
      const double order = lvl ? std::log2(prev / e) : std::nan("");
      mms.add({"dt", fmt(cfg.grid.count), fmt(dt), fmt(e), lvl ? fmt(order) : ""});
      if (lvl) dt_orders.push_back(order);
      prev = e;
    }
    b.tables.push_back(mms);
    s["mms"] = {{"h_orders", orders}, {"dt_orders", dt_orders}};
  }
  b.summary_json = s.dump();
  for (const RateRow& r : rows)
    b.messages.push_back(r.quantity + ": " + (r.fit ? "slope " + fmt(r.fit->slope) : r.note));
  return b;
}

// -------------------------------------------------------------------- expand

ReportBundle cmd_expand(const ExperimentConfig& cfg) {
  validate(cfg);
  const ModelParams P = cfg.params();
  const RadialGrid grid = grid_of(cfg);
  const EvolutionState st = initial_state(cfg, grid, P);
  RecordOptions ro;
  ro.every = cfg.time.record_every;
  ro.snapshot_every = 1;
  ro.energy = false;
  const EvolutionTrace tr = run(st, cfg.time.dt, cfg.time.t_final, ro, step_options(cfg));

  Table coeff{"coefficients", {"k", "t", "c"}, {}};
  std::vector<CoefficientRecord> records;
  json cj = json::array();
  for (int k : cfg.analysis.modes) {
    const ModeIndex md{0, k, 0};
    try {
      CoefficientRecord rec = extract_coefficient(tr, md, P);
      for (const auto& [t, c] : rec.estimates) coeff.add({fmt(k), fmt(t), fmt(c)});
      cj.push_back({{"k", k},
                    {"lambda", eigenvalue(md, P)},
                    {"limit", rec.limit},
                    {"converged", rec.converged},
                    {"tail_bound", rec.tail_bound},
                    {"tail_flagged", rec.tail_flagged}});
      records.push_back(std::move(rec));
    } catch (const ValidationError& e) {
      cj.push_back({{"k", k}, {"note", e.what()}});
    }
  }

  ReportBundle b;
  b.command = "expand";
  json s = {{"coefficients", cj}};

  Table shifted{"shifted", {"t", "norm"}, {}};
  try {
    const TimeShiftResult ts = mod_time_shift(tr, P, cfg.analysis.Lambda, cfg.analysis.shift_window);
    for (std::size_t k = 0; k < ts.times.size(); ++k) shifted.add({fmt(ts.times[k]), fmt(ts.norms[k])});
    s["time_shift"] = {{"tau0", ts.tau0},
                       {"c_slope", ts.c_slope},
                       {"eval_time", ts.eval_time},
                       {"Lambda", ts.Lambda},
                       {"eta", ts.eta},
                       {"fit", fit_json(ts.shifted_rate)},
                       {"window", cfg.analysis.shift_window.describe()},
                       {"gamma_measured", ts.gamma_measured()}};
    b.messages.push_back("tau0 = " + fmt(ts.tau0) + ", shifted slope " + fmt(ts.shifted_rate.slope) +
                         ", gamma " + fmt(ts.gamma_measured()));
  } catch (const ValidationError& e) {
    s["time_shift"] = {{"note", e.what()}};
    b.messages.push_back(std::string("time shift: ") + e.what());
  }
  try {
    const SecondOrderRates r = second_order_rates(P);
    s["predicted"] = {{"gamma", r.gamma}, {"delta", r.delta}, {"branch", to_string(r.branch)}};
  } catch (const ValidationError& e) {
    s["predicted"] = {{"note", e.what()}};
  }

  Table resid{"residual", {"t", "norm"}, {}};
  const double Lambda = cfg.analysis.Lambda.value_or(P.p > 2.0 ? default_target_rate(P) : continuum_onset(P));
  try {
    const ExpansionResult er = expansion_residual(tr, Lambda, records, P, cfg.analysis.window);
    for (std::size_t k = 0; k < er.times.size(); ++k) resid.add({fmt(er.times[k]), fmt(er.norms[k])});
    const double tol = 0.05 * std::abs(Lambda);
    s["residual"] = {{"Lambda", Lambda},
                     {"fit", fit_json(er.fit)},
                     {"window", cfg.analysis.window.describe()},
                     {"contract", er.fit.slope <= Lambda + tol}};
    b.messages.push_back("residual slope " + fmt(er.fit.slope) + " vs Lambda " + fmt(Lambda));
  } catch (const ValidationError& e) {
    s["residual"] = {{"Lambda", Lambda}, {"note", e.what()}};
    b.messages.push_back(std::string("residual: ") + e.what());
  }
  b.tables = {coeff, shifted, resid};
  b.summary_json = s.dump();
  return b;
}

// --------------------------------------------------------------------- sweep

void parallel_for_ordered(int count, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, std::max(count, 1));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

struct SweepRow {
  double m = 0.0;
  double p = 0.0;
  std::string branch;
  double gamma = 0.0, delta = 0.0;
  double Lambda = 0.0, eta = 0.0, tau0 = 0.0;
  RateFit fit;
  std::string status = "ok";
  std::string message;
};

SweepRow sweep_item(const ExperimentConfig& cfg, double m) {
  SweepRow row;
  row.m = m;
  ExperimentConfig c = cfg;
  c.model.m = m;
  const ModelParams P = c.params();
  row.p = P.p;
  const SecondOrderRates r = second_order_rates(P);
  row.branch = to_string(r.branch);
  row.gamma = r.gamma;
  row.delta = r.delta;
  const double l01 = std::abs(eigenvalue({0, 1, 0}, P));
  const double dt = c.sweep.dt_scale / l01;
  const double T = c.sweep.horizon / l01;
  const RadialGrid grid = grid_of(c);
  EvolutionState st{0.0, bump_data(grid, c.initial.amplitude, c.initial.seed, P, true), P, {}};
  RecordOptions ro;
  ro.every = std::max(1, static_cast<int>(std::lround(T / dt / 400.0)));
  ro.snapshot_every = 1;
  ro.energy = false;
  StepOptions so;
  so.extrapolate = true;
  const EvolutionTrace tr = run(st, dt, T, ro, so);
  const TimeShiftResult ts = mod_time_shift(tr, P, c.analysis.Lambda, c.analysis.shift_window);
  row.Lambda = ts.Lambda;
  row.eta = ts.eta;
  row.tau0 = ts.tau0;
  row.fit = ts.shifted_rate;
  return row;
}

}  // namespace

ReportBundle cmd_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.initial.amplitude == 0.0) throw ValidationError("initial_data.amplitude: sweep needs amplitude > 0");
  const int count = static_cast<int>(cfg.sweep.m_values.size());
  std::vector<SweepRow> rows(count);
  parallel_for_ordered(count, cfg.sweep.jobs, [&](int i) {
    const double m = cfg.sweep.m_values[i];
    try {
      rows[i] = sweep_item(cfg, m);
    } catch (const ValidationError& e) {
      rows[i] = SweepRow{};
      rows[i].m = m;
      rows[i].status = "validation_error";
      rows[i].message = e.what();
    } catch (const SolverError& e) {
      rows[i] = SweepRow{};
      rows[i].m = m;
      rows[i].status = "solver_error";
      rows[i].message = e.what();
    }
  });

  Table t{"sweep",
          {"index", "m", "p", "branch", "gamma_predicted", "delta_predicted", "Lambda", "weight_eta", "tau0",
           "shifted_slope", "gamma_measured", "relative_error", "status", "message"},
          {}};
  int ok = 0, validation = 0;
  json items = json::array();
  for (int i = 0; i < count; ++i) {
    const SweepRow& r = rows[i];
    if (r.status == "ok") {
      ++ok;
      const double l01 = eigenvalue({0, 1, 0}, derive_params(cfg.model.n, r.m, cfg.model.B));
      const double g = r.fit.slope / l01;
      t.add({fmt(i), fmt(r.m), fmt(r.p), r.branch, fmt(r.gamma), fmt(r.delta), fmt(r.Lambda), fmt(r.eta),
             fmt(r.tau0), fmt(r.fit.slope), fmt(g), fmt(g / r.gamma - 1.0), r.status, ""});
      items.push_back({{"m", r.m}, {"gamma_predicted", r.gamma}, {"gamma_measured", g}, {"status", r.status}});
    } else {
      if (r.status == "validation_error") ++validation;
      t.add({fmt(i), fmt(r.m), "", "", "", "", "", "", "", "", "", "", r.status, r.message});
      items.push_back({{"m", r.m}, {"status", r.status}, {"message", r.message}});
    }
  }
  ReportBundle b;
  b.command = "sweep";
  b.tables = {t};
  json s = {{"items", items},
            {"succeeded", ok},
            {"failed", count - ok},
            {"window", cfg.analysis.shift_window.describe()}};
  b.summary_json = s.dump();
  b.messages.push_back(std::to_string(ok) + " of " + std::to_string(count) + " sweep items succeeded");
  // Partial failure still reports success; only a fully failed sweep does not.
  if (ok == 0 && count > 0) b.exit_code = validation == count ? 2 : 3;
  return b;
}

}  // namespace fastdiff::lab

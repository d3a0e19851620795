// fastdiff-lab: command-line front end for the fastdiff library.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fastdiff/error.hpp"
#include "fastdiff/lab.hpp"

namespace lab = fastdiff::lab;

namespace {

struct Flags {
  std::string config;
  std::optional<int> n, points, ell, k, jobs;
  std::optional<std::string> m;
  std::optional<double> B, smax, dt, tfinal, eta, lambda, amplitude;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, format, data;
  bool extrapolate = false;
};

std::vector<double> parse_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw fastdiff::ValidationError(std::string(field) + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw fastdiff::ValidationError(std::string(field) + ": empty list");
  return out;
}

// Precedence: flags > config file > defaults.
lab::ExperimentConfig resolve(const Flags& f, const std::string& command) {
  lab::ExperimentConfig c;
  if (!f.config.empty()) c = lab::load_config(f.config, c);
  if (f.n) c.model.n = *f.n;
  if (f.m) {
    const std::vector<double> ms = parse_list(*f.m, "--m");
    if (command == "sweep") {
      c.sweep.m_values = ms;
    } else {
      if (ms.size() != 1) throw fastdiff::ValidationError("--m: a list is only accepted by sweep");
      c.model.m = ms.front();
    }
  }
  if (f.B) c.model.B = *f.B;
  if (f.smax) c.grid.s_max = *f.smax;
  if (f.points) c.grid.count = *f.points;
  if (f.dt) c.time.dt = *f.dt;
  if (f.tfinal) c.time.t_final = *f.tfinal;
  if (f.extrapolate) c.time.extrapolate = true;
  if (f.eta) c.analysis.eta = *f.eta;
  if (f.lambda) c.analysis.Lambda = *f.lambda;
  if (f.ell) c.analysis.ell = *f.ell;
  if (f.k) c.initial.k = *f.k;
  if (f.amplitude) c.initial.amplitude = *f.amplitude;
  if (f.seed) c.initial.seed = *f.seed;
  if (f.data) c.initial.kind = *f.data;
  if (f.out) c.output.directory = *f.out;
  if (f.jobs) c.sweep.jobs = *f.jobs;
  if (f.format) c.output.formats = {*f.format};
  lab::validate(c);
  return c;
}

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON experiment config");
  app.add_option("--n", f.n, "space dimension");
  app.add_option("--m", f.m, "exponent m (sweep: comma-separated list)");
  app.add_option("--b-param", f.B, "Barenblatt parameter B");
  app.add_option("--smax", f.smax, "outer radius in the geodesic coordinate s");
  app.add_option("--points", f.points, "grid intervals");
  app.add_option("--dt", f.dt, "time step");
  app.add_option("--tfinal", f.tfinal, "final rescaled time");
  app.add_option("--eta", f.eta, "weight exponent eta");
  app.add_option("--lambda-target", f.lambda, "target rate Lambda");
  app.add_option("--ell", f.ell, "spherical harmonic degree");
  app.add_option("--k", f.k, "radial eigenmode index for eigenmode data");
  app.add_option("--amplitude", f.amplitude, "initial perturbation amplitude");
  app.add_option("--seed", f.seed, "seed for bump data");
  app.add_option("--out", f.out, "output directory (default $FASTDIFF_LAB_OUT)");
  app.add_option("--jobs", f.jobs, "sweep worker count (default: logical cores)");
  app.add_option("--format", f.format, "write only csv tables or only the json summary")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--data", f.data, "initial data: eigenmode, bump or delayed-barenblatt");
  app.add_flag("--extrapolate", f.extrapolate, "second-order extrapolated time stepping");
}

int emit(const lab::ReportBundle& b, const lab::ExperimentConfig& cfg, double secs) {
  for (const std::string& line : b.messages) std::cout << line << "\n";
  for (const auto& p : lab::write_bundle(b, cfg, secs)) std::cout << "wrote " << p.string() << "\n";
  return b.exit_code;
}

int selftest(const lab::ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = lab::run_acceptance(2, [](const lab::CriterionResult& r) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.id << ". " << r.name << ": " << r.detail << "\n"
              << std::flush;
  });
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  lab::ReportBundle b;
  b.command = "selftest";
  b.tables = {lab::acceptance_table(results)};
  int passed = 0;
  for (const auto& r : results) passed += r.passed;
  b.summary_json = "{\"passed\": " + std::to_string(passed) + ", \"total\": " + std::to_string(results.size()) +
                   ", \"scale\": 2}";
  b.exit_code = all ? 0 : 4;
  b.messages.push_back(std::to_string(passed) + " of " + std::to_string(results.size()) + " criteria passed");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit(b, cfg, secs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastdiff-lab: fast-diffusion asymptotics laboratory"};
  app.require_subcommand(1);
  Flags flags;
  const char* names[] = {"spectrum", "evolve", "expand", "sweep", "modes", "selftest"};
  const char* help[] = {"closed-form and discrete spectrum of the linearized operator",
                        "nonlinear radial evolution with rate fits",
                        "coefficients, time-shift modding and expansion residual",
                        "second-order rates across a list of m",
                        "admissible modes, landmarks and second-order rates",
                        "acceptance suite at reduced resolution"};
  std::vector<CLI::App*> subs;
  for (int i = 0; i < 6; ++i) {
    CLI::App* s = app.add_subcommand(names[i], help[i]);
    add_flags(*s, flags);
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string command;
  for (int i = 0; i < 6; ++i)
    if (subs[i]->parsed()) command = names[i];

  try {
    const lab::ExperimentConfig cfg = resolve(flags, command);
    if (command == "selftest") return selftest(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    lab::ReportBundle b;
    if (command == "spectrum") b = lab::cmd_spectrum(cfg);
    else if (command == "evolve") b = lab::cmd_evolve(cfg);
    else if (command == "expand") b = lab::cmd_expand(cfg);
    else if (command == "sweep") b = lab::cmd_sweep(cfg);
    else b = lab::cmd_modes(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return emit(b, cfg, secs);
  } catch (const fastdiff::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const fastdiff::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
}

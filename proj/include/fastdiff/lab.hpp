#pragma once
// Experiment configuration, report bundles and the command layer behind the
// fastdiff-lab tool.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fastdiff/closedform.hpp"
#include "fastdiff/ratefit.hpp"

namespace fastdiff::lab {

inline constexpr int kSchemaVersion = 1;
const char* code_version();

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  struct Model {
    int n = 3;
    double m = 2.0 / 3.0;
    double B = 1.0;
  } model;
  struct Grid {
    double s_max = 12.0;
    int count = 1200;
  } grid;
  struct Time {
    double dt = 1e-3;
    double t_final = 4.0;
    int record_every = 10;
    bool extrapolate = false;
  } time;
  struct InitialData {
    std::string kind = "bump";  // eigenmode | bump | delayed-barenblatt
    double amplitude = 0.05;
    int k = 1;  // radial eigenmode index
    std::uint64_t seed = 1;
    bool project_mass = true;
    double tau0 = 0.05;
    double Bplus = 0.7;
  } initial;
  struct Analysis {
    std::optional<double> eta;  // spectrum/modes; default eta_cr
    std::optional<int> ell;     // spectrum: one harmonic instead of all
    int eigen_count = 8;
    std::vector<double> etas;   // extra weighted norms for evolve
    std::optional<double> Lambda;
    std::vector<int> modes = {0, 1};  // radial k for coefficient extraction
    WindowPolicy window;
    WindowPolicy shift_window{1e-14, 1e-8};
  } analysis;
  struct Sweep {
    std::vector<double> m_values = {0.62, 0.7, 0.78, 0.85, 0.95};
    double dt_scale = 0.005;  // dt = dt_scale / |lambda_01|
    double horizon = 30.0;    // t_final = horizon / |lambda_01|
    int jobs = 0;             // 0: hardware concurrency
  } sweep;
  struct Output {
    std::string directory;
    std::vector<std::string> formats = {"csv", "json"};
  } output;

  ModelParams params() const;  // throws ValidationError with a field prefix
};

// Parses a JSON document onto defaults; unknown keys and schema mismatches are
// validation errors naming the field.
ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base = {});
std::string config_to_json(const ExperimentConfig& cfg);
// Field-level checks shared by all commands.
void validate(const ExperimentConfig& cfg);

// ------------------------------------------------------------------ reports

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string fmt(double v);  // 17 significant digits
std::string fmt(int v);
std::string to_csv(const Table& t);

struct ReportBundle {
  std::string command;
  std::string summary_json;  // command-specific summary object
  std::vector<Table> tables;
  std::vector<std::string> messages;  // short human-readable lines
  int exit_code = 0;
};

// Writes tables and summary.json (with provenance) according to the
// configured formats; returns the files written.
std::vector<std::filesystem::path> write_bundle(const ReportBundle& bundle, const ExperimentConfig& cfg,
                                                double wall_seconds);

// ----------------------------------------------------------------- commands

ReportBundle cmd_spectrum(const ExperimentConfig& cfg);
ReportBundle cmd_evolve(const ExperimentConfig& cfg);
ReportBundle cmd_expand(const ExperimentConfig& cfg);
ReportBundle cmd_sweep(const ExperimentConfig& cfg);
ReportBundle cmd_modes(const ExperimentConfig& cfg);

// Runs body(i) for i in [0, count) on a pool of the given size; results land
// at their input index.
void parallel_for_ordered(int count, int jobs, const std::function<void(int)>& body);

// --------------------------------------------------------------- acceptance

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// scale = 1 is the full acceptance resolution; scale = 2 halves grid points
// and coarsens time steps where the criterion allows it.
std::vector<CriterionResult> run_acceptance(int scale = 1,
                                            const std::function<void(const CriterionResult&)>& on_result = {});
Table acceptance_table(const std::vector<CriterionResult>& results);

}  // namespace fastdiff::lab

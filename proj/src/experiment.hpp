#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "random_mdp.hpp"

namespace tdlsys {

// Which stages of an experiment to execute; bounds comparisons use whatever
// exact/empirical inputs their mask includes.
enum PhaseMask : unsigned {
  kPhaseExact = 1u << 0,
  kPhaseMc = 1u << 1,
  kPhaseBounds = 1u << 2,
  kPhaseStein = 1u << 3,
  kPhaseDivergence = 1u << 4,
};

unsigned phase_mask_from_name(const std::string& name);

struct DivergenceConfig {
  double epsilon = 0.5;
  std::int64_t n_runs = 100000;
  std::int64_t horizon = 50;
  int streak_n = 3;
};

struct ExperimentConfig {
  std::optional<std::string> mdp_file;
  std::optional<GeneratorSpec> generator;
  double alpha = 0.1;
  std::int64_t horizon = 100;
  std::vector<std::int64_t> probe_steps;
  std::int64_t n_runs = 0;
  std::uint64_t seed = 1;
  std::vector<double> epsilon_list;
  std::optional<Eigen::VectorXd> v0;  // defaults to the zero vector
  std::optional<DivergenceConfig> divergence;
  std::string out_dir = "out";

  // Default phase selection: everything configured, divergence only when its
  // section is present.
  unsigned default_phases() const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig config_from_json_file(const std::string& path);

struct ExperimentOutcome {
  std::string out_dir;
  std::vector<std::string> violations;
  int violation_count() const { return static_cast<int>(violations.size()); }
};

// Runs the selected phases and writes moments.csv, bounds.csv, stein.json,
// divergence.csv/.json and summary.json into config.out_dir. Rerunning the
// same configuration produces byte-identical files. Violations of the
// domination/coverage contracts are collected (not thrown); hard engine
// failures surface as errors.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 unsigned phase_mask);

struct OffPolicySpec;
struct DivergenceDemoResult;

// Writes divergence.csv (per-run max |V|) and divergence.json (streak law
// and the stability threshold table) into out_dir.
void write_divergence_report(const OffPolicySpec& spec,
                             const DivergenceDemoResult& demo,
                             const std::string& out_dir);

}  // namespace tdlsys

// Command-line front end. Talks to the library exclusively through the C
// interface in tdlsys.h.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tdlsys.h"

namespace {

int report_failure(const std::string& what, int status) {
  std::cerr << "td-lsys: " << what << ": " << tdlsys_last_error() << '\n';
  return status;
}

int run_command(const std::string& config_path, const std::string& only,
                const std::string& out_dir, bool has_seed,
                std::uint64_t seed) {
  // Directory precedence: --out flag, then TDLSYS_OUT_DIR, then the config.
  std::string override_dir = out_dir;
  if (override_dir.empty()) {
    if (const char* env = std::getenv("TDLSYS_OUT_DIR");
        env != nullptr && env[0] != '\0')
      override_dir = env;
  }
  int violations = 0;
  const int status = tdlsys_experiment_run(
      config_path.c_str(), override_dir.empty() ? nullptr : override_dir.c_str(),
      only.empty() ? nullptr : only.c_str(), has_seed ? 1 : 0, seed,
      &violations);
  if (status != TDLSYS_OK) return report_failure("run failed", status);
  if (violations > 0) {
    std::cerr << "td-lsys: " << violations << " contract violation"
              << (violations == 1 ? "" : "s")
              << " recorded in summary.json\n";
    return 1;
  }
  std::cout << "run complete, no violations\n";
  return 0;
}

int gen_mdp_command(int states, int actions, std::uint64_t seed, double gamma,
                    double reward_scale, double concentration,
                    const std::string& out_path) {
  char* json = nullptr;
  const int status = tdlsys_generate_mdp_json(states, actions, seed, gamma,
                                              reward_scale, concentration,
                                              &json);
  if (status != TDLSYS_OK) return report_failure("gen-mdp failed", status);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    std::ofstream file(out_path, std::ios::binary);
    file << json;
    file.close();
    if (!file) {
      tdlsys_string_free(json);
      std::cerr << "td-lsys: cannot write " << out_path << '\n';
      return TDLSYS_ERR_IO;
    }
  }
  tdlsys_string_free(json);
  return 0;
}

int remark1_command(double epsilon, std::int64_t runs, std::int64_t horizon,
                    int streak, std::uint64_t seed,
                    const std::string& out_dir) {
  tdlsys_divergence_summary summary;
  const int status = tdlsys_divergence_demo(
      epsilon, runs, horizon, streak, seed,
      out_dir.empty() ? nullptr : out_dir.c_str(), &summary);
  if (status != TDLSYS_OK) return report_failure("demo failed", status);
  std::cout << "epsilon                " << summary.epsilon << '\n'
            << "recursion coefficient  " << summary.coefficient << " ("
            << (summary.diverges ? "unstable" : "stable") << ")\n"
            << "streak frequency       " << summary.streak_frequency
            << "  (law " << summary.streak_probability << ", " << runs
            << " runs)\n"
            << "max |V|, off-policy    " << summary.max_abs_v << '\n'
            << "max |V|, on-policy     " << summary.on_policy_max_abs
            << "  (cap 10)\n";
  if (!out_dir.empty())
    std::cout << "report written to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Tabular TD-learning as a discrete-time stochastic linear system: "
      "exact moments, finite-time bounds, and seeded simulation"};
  app.require_subcommand(1);
  int rc = 0;

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path;
  std::string only;
  std::string run_out;
  std::uint64_t run_seed = 0;
  run->add_option("--config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--only", only, "Restrict to one phase")
      ->check(CLI::IsMember({"exact", "mc", "bounds", "stein", "divergence"}));
  run->add_option("--out", run_out, "Output directory (overrides the config)");
  auto* run_seed_opt =
      run->add_option("--seed", run_seed, "Seed (overrides the config)");
  run->callback([&] {
    rc = run_command(config_path, only, run_out, run_seed_opt->count() > 0,
                     run_seed);
  });

  auto* gen = app.add_subcommand(
      "gen-mdp", "Generate a seeded random ergodic MDP as JSON");
  int states = 0;
  int actions = 0;
  std::uint64_t gen_seed = 0;
  double gamma = 0.5;
  double reward_scale = 1.0;
  double concentration = 1.0;
  std::string gen_out;
  gen->add_option("--states", states, "Number of states")->required();
  gen->add_option("--actions", actions, "Number of actions")->required();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--gamma", gamma, "Discount factor in [0, 1)");
  gen->add_option("--reward-scale", reward_scale,
                  "Rewards drawn uniformly in [-scale, scale]");
  gen->add_option("--concentration", concentration,
                  "Transition-row sharpness (flat rows at 1)");
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");
  gen->callback([&] {
    rc = gen_mdp_command(states, actions, gen_seed, gamma, reward_scale,
                         concentration, gen_out);
  });

  auto* demo = app.add_subcommand("demo", "Companion demonstrations");
  demo->require_subcommand(1);
  auto* remark1 = demo->add_subcommand(
      "remark1",
      "Off-policy divergence threshold on the 1-state importance-sampled "
      "chain");
  double epsilon = 0.0;
  std::int64_t demo_runs = 100000;
  std::int64_t demo_horizon = 50;
  int streak = 3;
  std::uint64_t demo_seed = 1;
  std::string demo_out;
  remark1->add_option("--epsilon", epsilon, "Action-2 probability in (0, 1)")
      ->required();
  remark1->add_option("--runs", demo_runs, "Sampled trajectories");
  remark1->add_option("--horizon", demo_horizon, "Steps per trajectory");
  remark1->add_option("--streak", streak,
                      "Streak length for the probability law");
  remark1->add_option("--seed", demo_seed, "Simulation seed");
  remark1->add_option("--out", demo_out,
                      "Directory for divergence.csv and divergence.json");
  remark1->callback([&] {
    rc = remark1_command(epsilon, demo_runs, demo_horizon, streak, demo_seed,
                         demo_out);
  });

  CLI11_PARSE(app, argc, argv);
  return rc;
}

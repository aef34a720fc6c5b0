#pragma once

#include <cstdint>

#include "mdp.hpp"

namespace tdlsys {

struct GeneratorSpec {
  int n_states = 2;
  int n_actions = 2;
  std::uint64_t seed = 0;
  double gamma = 0.5;
  double reward_scale = 1.0;    // rewards drawn uniformly in [-scale, scale]
  double concentration = 1.0;   // rows sharpen as this grows

  void validate() const;
};

// Seeded random instance: transition and policy rows are normalized
// (-log u)^(1/concentration) weights (exact flat-Dirichlet rows at
// concentration 1, increasingly peaked beyond it), rewards are uniform in
// [-reward_scale, reward_scale]. Instances are resampled until the induced
// chain passes the ergodicity checks, with a bounded number of attempts;
// identical specs always produce identical instances.
Problem generate_random_mdp(const GeneratorSpec& spec);

}  // namespace tdlsys

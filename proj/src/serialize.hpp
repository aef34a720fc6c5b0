#pragma once

#include <string>

#include "linear_model.hpp"
#include "mdp.hpp"

namespace tdlsys {

// JSON document shape:
//   {"n_states": n, "n_actions": m, "gamma": g,
//    "transition": [[[...]]], "reward": [[[...]]], "policy": [[...]]}
// with tensors nested state -> action -> successor, row-major.
Problem problem_from_json_text(const std::string& text);
Problem problem_from_json_file(const std::string& path);
std::string problem_to_json_text(const TabularMdp& mdp, const Policy& policy);

// Debug dump of the built system: A, b, step size, contraction factor and
// the constants derived from the chain.
std::string model_to_json_text(const LinearSystemModel& model);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace tdlsys

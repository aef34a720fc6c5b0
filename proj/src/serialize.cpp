#include "serialize.hpp"

#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"
#include "linear_model.hpp"

namespace tdlsys {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  require(!doc.is_discarded(), ErrorCode::parse, "malformed JSON document");
  return doc;
}

double number_field(const json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::parse,
          std::string("missing field \"") + key + "\"");
  require(doc[key].is_number(), ErrorCode::parse,
          std::string("field \"") + key + "\" must be a number");
  return doc[key].get<double>();
}

int int_field(const json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::parse,
          std::string("missing field \"") + key + "\"");
  require(doc[key].is_number_integer(), ErrorCode::parse,
          std::string("field \"") + key + "\" must be an integer");
  return doc[key].get<int>();
}

// Flattens a nested JSON array of the given dimensions into out, failing on
// any shape mismatch or non-numeric leaf.
void flatten(const json& node, const std::vector<int>& dims, std::size_t depth,
             std::vector<double>& out, const char* key) {
  if (depth == dims.size()) {
    require(node.is_number(), ErrorCode::parse,
            std::string("field \"") + key + "\" has a non-numeric entry");
    out.push_back(node.get<double>());
    return;
  }
  require(node.is_array() &&
              node.size() == static_cast<std::size_t>(dims[depth]),
          ErrorCode::parse,
          std::string("field \"") + key + "\" has the wrong shape");
  for (const auto& child : node) flatten(child, dims, depth + 1, out, key);
}

std::vector<double> tensor_field(const json& doc, const char* key,
                                 const std::vector<int>& dims) {
  require(doc.contains(key), ErrorCode::parse,
          std::string("missing field \"") + key + "\"");
  std::vector<double> out;
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  out.reserve(total);
  flatten(doc[key], dims, 0, out, key);
  return out;
}

json nest_tensor(const std::vector<double>& flat, int d0, int d1, int d2) {
  json outer = json::array();
  std::size_t i = 0;
  for (int a = 0; a < d0; ++a) {
    json mid = json::array();
    for (int b = 0; b < d1; ++b) {
      json inner = json::array();
      for (int c = 0; c < d2; ++c) inner.push_back(flat[i++]);
      mid.push_back(std::move(inner));
    }
    outer.push_back(std::move(mid));
  }
  return outer;
}

}  // namespace

Problem problem_from_json_text(const std::string& text) {
  const json doc = parse_json(text);
  require(doc.is_object(), ErrorCode::parse,
          "top-level JSON value must be an object");

  TabularMdp mdp;
  mdp.n_states = int_field(doc, "n_states");
  mdp.n_actions = int_field(doc, "n_actions");
  require(mdp.n_states > 0 && mdp.n_actions > 0, ErrorCode::invalid_argument,
          "state and action counts must be positive");
  mdp.gamma = number_field(doc, "gamma");
  mdp.transition = tensor_field(doc, "transition",
                                {mdp.n_states, mdp.n_actions, mdp.n_states});
  mdp.reward =
      tensor_field(doc, "reward", {mdp.n_states, mdp.n_actions, mdp.n_states});

  Policy policy;
  policy.n_states = mdp.n_states;
  policy.n_actions = mdp.n_actions;
  policy.probs = tensor_field(doc, "policy", {mdp.n_states, mdp.n_actions});

  return make_problem(std::move(mdp), std::move(policy));
}

Problem problem_from_json_file(const std::string& path) {
  return problem_from_json_text(read_text_file(path));
}

std::string problem_to_json_text(const TabularMdp& mdp, const Policy& policy) {
  json doc;
  doc["n_states"] = mdp.n_states;
  doc["n_actions"] = mdp.n_actions;
  doc["gamma"] = mdp.gamma;
  doc["transition"] =
      nest_tensor(mdp.transition, mdp.n_states, mdp.n_actions, mdp.n_states);
  doc["reward"] =
      nest_tensor(mdp.reward, mdp.n_states, mdp.n_actions, mdp.n_states);
  json pol = json::array();
  for (int s = 0; s < policy.n_states; ++s) {
    json row = json::array();
    for (int a = 0; a < policy.n_actions; ++a) row.push_back(policy.pi(s, a));
    pol.push_back(std::move(row));
  }
  doc["policy"] = std::move(pol);
  return doc.dump(2) + "\n";
}

std::string model_to_json_text(const LinearSystemModel& model) {
  json doc;
  const int n = model.n();
  json a = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(model.a(i, j));
    a.push_back(std::move(row));
  }
  doc["a"] = std::move(a);
  doc["b"] = std::vector<double>(model.b.data(), model.b.data() + n);
  doc["v_pi"] = std::vector<double>(model.v_pi.data(), model.v_pi.data() + n);
  doc["alpha"] = model.alpha;
  doc["rho"] = model.rho;
  doc["gamma"] = model.gamma;
  doc["d_min"] = model.d_min;
  doc["w_max"] = model.w_max;
  doc["v_max"] = model.v_max;
  doc["spectral_radius"] = spectral_radius(model.a);
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  require(in.good() || in.eof(), ErrorCode::io, "cannot read file: " + path);
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::io, "cannot open file for writing: " + path);
  out << text;
  out.flush();
  require(out.good(), ErrorCode::io, "cannot write file: " + path);
}

}  // namespace tdlsys

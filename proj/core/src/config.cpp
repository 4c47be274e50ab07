#include "rdbia/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rdbia {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ParseError, "config field '" + field + "': " + why);
}

Mat parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
  Mat out;
  for (const auto& row : j) {
    if (!row.is_array()) fail(field, "expected rows to be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) fail(field, "expected numeric entries");
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> parse_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(field, "expected numeric entries");
    out.push_back(v.get<double>());
  }
  return out;
}

MarkovChain parse_chain(const json& j) {
  if (!j.is_object()) fail("chain", "expected an object");
  if (!j.contains("P")) fail("chain.P", "missing");
  if (!j.contains("pi0")) fail("chain.pi0", "missing");
  std::vector<std::string> states;
  if (j.contains("states")) {
    for (const auto& s : j.at("states")) {
      if (!s.is_string()) fail("chain.states", "expected strings");
      states.push_back(s.get<std::string>());
    }
  }
  return validate_chain(parse_matrix(j.at("P"), "chain.P"),
                        parse_vector(j.at("pi0"), "chain.pi0"),
                        std::move(states));
}

DistortionSpec parse_distortion(const json& j, std::size_t m) {
  if (j.is_string()) {
    if (j.get<std::string>() == "hamming") return hamming_distortion(m);
    fail("distortion", "unknown named distortion '" + j.get<std::string>() + "'");
  }
  DistortionSpec spec = make_distortion(parse_matrix(j, "distortion"));
  if (spec.alphabet_size() != m) {
    fail("distortion", "matrix size does not match the chain alphabet");
  }
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!j.is_object()) fail("<root>", "expected a JSON object");
  if (!j.contains("chain")) fail("chain", "missing");

  ExperimentConfig cfg;
  cfg.chain = parse_chain(j.at("chain"));
  const std::size_t m = cfg.chain.num_states();
  cfg.distortion = hamming_distortion(m);
  if (j.contains("distortion")) {
    cfg.distortion = parse_distortion(j.at("distortion"), m);
  }
  if (j.contains("initial_distributions")) {
    const auto& arr = j.at("initial_distributions");
    if (!arr.is_array()) fail("initial_distributions", "expected an array");
    for (const auto& entry : arr) {
      if (!entry.is_object() || !entry.contains("label") || !entry.contains("pi")) {
        fail("initial_distributions", "entries need {label, pi}");
      }
      std::vector<double> pi = parse_vector(entry.at("pi"), "initial_distributions.pi");
      if (pi.size() != m || !is_distribution(pi, 1e-12)) {
        fail("initial_distributions.pi", "not a probability vector over the states");
      }
      cfg.initial_distributions.emplace_back(entry.at("label").get<std::string>(),
                                             std::move(pi));
    }
  }
  if (j.contains("T")) {
    for (const auto& v : j.at("T")) {
      if (!v.is_number_integer() || v.get<int>() < 1) fail("T", "expected integers >= 1");
      cfg.T_list.push_back(v.get<int>());
    }
  }
  if (j.contains("tau")) {
    for (const auto& v : j.at("tau")) {
      if (!v.is_number_integer() || v.get<int>() < 0) fail("tau", "expected integers >= 0");
      cfg.tau_list.push_back(v.get<int>());
    }
  }
  if (j.contains("D")) cfg.D_list = parse_vector(j.at("D"), "D");
  for (double d : cfg.D_list) {
    if (!(d > 0.0)) fail("D", "distortion levels must be > 0");
  }
  if (j.contains("D_grid")) cfg.D_grid = parse_vector(j.at("D_grid"), "D_grid");
  if (j.contains("tau_max")) cfg.tau_max = j.at("tau_max").get<int>();
  if (j.contains("tau_ref")) cfg.tau_ref = j.at("tau_ref").get<int>();
  if (j.contains("tolerances")) {
    const auto& tol = j.at("tolerances");
    if (tol.contains("ba_tol_bits")) cfg.ba_tol_bits = tol.at("ba_tol_bits").get<double>();
    if (tol.contains("bound_tol_bits")) cfg.bound_tol_bits = tol.at("bound_tol_bits").get<double>();
    if (!(cfg.ba_tol_bits > 0.0) || !(cfg.bound_tol_bits > 0.0)) {
      fail("tolerances", "tolerances must be > 0");
    }
  }
  if (j.contains("max_iters")) {
    cfg.max_iters = j.at("max_iters").get<int>();
    if (cfg.max_iters < 1) fail("max_iters", "must be >= 1");
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("budget")) {
    const auto b = j.at("budget").get<std::int64_t>();
    if (b < 2) fail("budget", "budget must be >= 2");
    cfg.budget = static_cast<std::size_t>(b);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

MarkovChain chain_from_json_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return parse_chain(j);
}

}  // namespace rdbia

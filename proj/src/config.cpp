#include "dyadim/config.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace dyadim {

namespace {

constexpr std::array<const char*, 7> kCommands = {
    "entropy",    "dimension",  "sample",        "window-gap",
    "lemma-scan", "continuity", "counterexample"};

constexpr std::array<const char*, 4> kWeightKinds = {"constant", "periodic", "explicit",
                                                     "random"};

bool contains(const auto& names, const std::string& value) {
  return std::find_if(names.begin(), names.end(),
                      [&](const char* name) { return value == name; }) != names.end();
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto stop = text.find(separator, start);
    parts.push_back(trim(text.substr(start, stop - start)));
    if (stop == std::string::npos) {
      return parts;
    }
    start = stop + 1;
  }
}

struct Location {
  const std::string& origin;
  std::size_t line{0};  // 0 = no line information (JSON)

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream message;
    message << origin;
    if (line > 0) {
      message << ":" << line;
    }
    message << ": " << what;
    throw ConfigError(message.str());
  }
};

double parse_double(const std::string& text, const Location& at, const std::string& key) {
  const std::string value = trim(text);
  if (!value.empty()) {
    char* end = nullptr;
    const double parsed = std::strtod(value.c_str(), &end);
    if (end == value.c_str() + value.size()) {
      return parsed;
    }
  }
  at.fail("key '" + key + "' expects a number, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& text, const Location& at, const std::string& key) {
  const std::string value = trim(text);
  if (!value.empty() && value.find('-') == std::string::npos) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() + value.size()) {
      return parsed;
    }
  }
  at.fail("key '" + key + "' expects a non-negative integer, got '" + value + "'");
}

bool parse_bool(const std::string& text, const Location& at, const std::string& key) {
  const std::string value = trim(text);
  if (value == "true") {
    return true;
  }
  if (value == "false") {
    return false;
  }
  at.fail("key '" + key + "' expects true or false, got '" + value + "'");
}

std::vector<WeightPair> parse_pairs(const std::string& text, const Location& at,
                                    const std::string& key) {
  std::vector<WeightPair> pairs;
  for (const std::string& entry : split(text, ';')) {
    if (entry.empty()) {
      continue;
    }
    const std::vector<std::string> coords = split(entry, ',');
    if (coords.size() != 2) {
      at.fail("key '" + key + "' expects 'p,q' pairs separated by ';', got '" + entry + "'");
    }
    pairs.push_back(WeightPair{parse_double(coords[0], at, key), parse_double(coords[1], at, key)});
  }
  if (pairs.empty()) {
    at.fail("key '" + key + "' expects at least one 'p,q' pair");
  }
  return pairs;
}

void apply_experiment_key(ExperimentConfig& config, const std::string& key,
                          const std::string& value, const Location& at) {
  if (key == "command") {
    config.command = trim(value);
  } else if (key == "horizon") {
    config.horizon = parse_u64(value, at, key);
  } else if (key == "window") {
    config.window = parse_u64(value, at, key);
  } else if (key == "depth") {
    config.depth = parse_u64(value, at, key);
  } else if (key == "paths") {
    config.paths = parse_u64(value, at, key);
  } else if (key == "seed") {
    config.seed = parse_u64(value, at, key);
  } else if (key == "checkpoints") {
    config.checkpoints.clear();
    for (const std::string& entry : split(value, ',')) {
      config.checkpoints.push_back(parse_u64(entry, at, key));
    }
  } else if (key == "zetas") {
    config.zetas.clear();
    for (const std::string& entry : split(value, ',')) {
      config.zetas.push_back(parse_double(entry, at, key));
    }
  } else if (key == "perturb_mode") {
    config.perturb_mode = trim(value);
  } else if (key == "epsilon") {
    config.epsilon = parse_double(value, at, key);
  } else if (key == "delta") {
    config.delta = parse_double(value, at, key);
  } else if (key == "stages") {
    config.stages = parse_u64(value, at, key);
  } else if (key == "grid_step") {
    config.grid_step = parse_double(value, at, key);
  } else if (key == "n_max") {
    config.n_max = parse_u64(value, at, key);
  } else if (key == "k_max") {
    config.k_max = parse_u64(value, at, key);
  } else if (key == "output_dir") {
    config.output_dir = trim(value);
  } else if (key == "oracle") {
    config.oracle = parse_bool(value, at, key);
  } else {
    at.fail("unknown key '" + key + "' in [experiment]");
  }
}

void apply_weights_key(WeightsDecl& weights, const std::string& key, const std::string& value,
                       const Location& at) {
  if (key == "kind") {
    weights.kind = trim(value);
  } else if (key == "pairs") {
    weights.pairs = parse_pairs(value, at, key);
  } else if (key == "tail") {
    const auto colon = value.find(':');
    if (colon == std::string::npos) {
      at.fail("key 'tail' expects '<kind>: p,q[; p,q ...]', got '" + trim(value) + "'");
    }
    weights.tail_kind = trim(value.substr(0, colon));
    weights.tail = parse_pairs(value.substr(colon + 1), at, key);
  } else if (key == "seed") {
    weights.seed = parse_u64(value, at, key);
  } else if (key == "period") {
    weights.period = parse_u64(value, at, key);
  } else {
    at.fail("unknown key '" + key + "' in [weights]");
  }
}

void validate(ExperimentConfig& config, const std::string& origin) {
  const Location at{origin, 0};
  // An empty command is allowed here; the CLI positional argument fills it.
  if (!config.command.empty() && !contains(kCommands, config.command)) {
    at.fail("unknown command '" + config.command + "'");
  }
  if (config.perturb_mode != "uniform-shift" && config.perturb_mode != "seeded-random") {
    at.fail("perturb_mode must be 'uniform-shift' or 'seeded-random', got '" +
            config.perturb_mode + "'");
  }
  if (config.has_weights) {
    const WeightsDecl& w = config.weights;
    if (!contains(kWeightKinds, w.kind)) {
      at.fail("weights kind must be one of constant|periodic|explicit|random, got '" + w.kind +
              "'");
    }
    if (w.kind == "random") {
      if (w.period == 0) {
        at.fail("random weights need period >= 1");
      }
    } else if (w.pairs.empty()) {
      at.fail("weights kind '" + w.kind + "' needs a 'pairs' entry");
    }
    if (w.kind == "constant" && w.pairs.size() != 1) {
      at.fail("constant weights take exactly one pair");
    }
    if (w.kind == "explicit") {
      if (w.tail_kind.empty()) {
        at.fail("explicit weights need a 'tail' entry");
      }
      if (w.tail_kind != "constant" && w.tail_kind != "periodic") {
        at.fail("tail kind must be 'constant' or 'periodic', got '" + w.tail_kind + "'");
      }
      if (w.tail_kind == "constant" && w.tail.size() != 1) {
        at.fail("constant tail takes exactly one pair");
      }
    }
    auto check_range = [&](const std::vector<WeightPair>& pairs, const char* key) {
      for (const WeightPair& pair : pairs) {
        if (!(pair.p >= 0.0 && pair.p <= 1.0 && pair.q >= 0.0 && pair.q <= 1.0)) {
          at.fail(std::string("weights '") + key + "' values must lie in [0, 1]");
        }
      }
    };
    check_range(w.pairs, "pairs");
    check_range(w.tail, "tail");
  }
}

ExperimentConfig parse_ini(const std::string& text, const std::string& origin) {
  ExperimentConfig config;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  std::size_t line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const Location at{origin, line_number};
    const auto comment = raw.find('#');
    if (comment != std::string::npos) {
      raw.erase(comment);
    }
    const std::string line = trim(raw);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        at.fail("unterminated section header '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "weights") {
        at.fail("unknown section [" + section + "]");
      }
      if (section == "weights") {
        config.has_weights = true;
      }
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      at.fail("expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = line.substr(equals + 1);
    if (key.empty()) {
      at.fail("empty key");
    }
    if (section.empty()) {
      at.fail("key '" + key + "' appears before any section header");
    }
    if (section == "experiment") {
      apply_experiment_key(config, key, value, at);
    } else {
      apply_weights_key(config.weights, key, value, at);
    }
  }
  return config;
}

std::string json_scalar_to_string(const nlohmann::json& value, const Location& at,
                                  const std::string& key) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_boolean()) {
    return value.get<bool>() ? "true" : "false";
  }
  if (value.is_number()) {
    return value.dump();
  }
  at.fail("key '" + key + "' has an unsupported JSON type");
}

std::vector<WeightPair> json_pairs(const nlohmann::json& value, const Location& at,
                                   const std::string& key) {
  if (!value.is_array() || value.empty()) {
    at.fail("key '" + key + "' expects a non-empty array of [p, q] pairs");
  }
  std::vector<WeightPair> pairs;
  for (const nlohmann::json& entry : value) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !entry[1].is_number()) {
      at.fail("key '" + key + "' expects [p, q] pairs of numbers");
    }
    pairs.push_back(WeightPair{entry[0].get<double>(), entry[1].get<double>()});
  }
  return pairs;
}

ExperimentConfig parse_json(const std::string& text, const std::string& origin) {
  const Location at{origin, 0};
  nlohmann::json document;
  try {
    document = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& error) {
    at.fail(std::string("JSON parse error: ") + error.what());
  }
  if (!document.is_object()) {
    at.fail("top-level JSON value must be an object");
  }

  ExperimentConfig config;
  for (const auto& [section, body] : document.items()) {
    if (section == "experiment") {
      if (!body.is_object()) {
        at.fail("'experiment' must be an object");
      }
      for (const auto& [key, value] : body.items()) {
        if (key == "checkpoints" || key == "zetas") {
          if (!value.is_array()) {
            at.fail("key '" + key + "' expects an array");
          }
          std::string joined;
          for (const nlohmann::json& entry : value) {
            if (!entry.is_number()) {
              at.fail("key '" + key + "' expects an array of numbers");
            }
            joined += (joined.empty() ? "" : ",") + entry.dump();
          }
          apply_experiment_key(config, key, joined, at);
        } else {
          apply_experiment_key(config, key, json_scalar_to_string(value, at, key), at);
        }
      }
    } else if (section == "weights") {
      if (!body.is_object()) {
        at.fail("'weights' must be an object");
      }
      config.has_weights = true;
      for (const auto& [key, value] : body.items()) {
        if (key == "pairs") {
          config.weights.pairs = json_pairs(value, at, key);
        } else if (key == "tail") {
          if (!value.is_object() || !value.contains("kind") || !value.contains("pairs")) {
            at.fail("key 'tail' expects an object with 'kind' and 'pairs'");
          }
          for (const auto& [tail_key, tail_value] : value.items()) {
            if (tail_key == "kind") {
              config.weights.tail_kind = tail_value.get<std::string>();
            } else if (tail_key == "pairs") {
              config.weights.tail = json_pairs(tail_value, at, "tail.pairs");
            } else {
              at.fail("unknown key '" + tail_key + "' in weights tail");
            }
          }
        } else {
          apply_weights_key(config.weights, key, json_scalar_to_string(value, at, key), at);
        }
      }
    } else {
      at.fail("unknown section '" + section + "'");
    }
  }
  return config;
}

}  // namespace

WeightSequence WeightsDecl::build() const {
  if (kind == "constant") {
    return WeightSequence::constant(pairs.front().p, pairs.front().q);
  }
  if (kind == "periodic") {
    return WeightSequence::periodic(pairs);
  }
  if (kind == "explicit") {
    if (tail_kind == "constant") {
      return WeightSequence::explicit_with_tail(pairs, tail.front());
    }
    return WeightSequence::explicit_with_tail(pairs, tail);
  }
  if (kind == "random") {
    return WeightSequence::random_uniform(period, seed);
  }
  throw ConfigError("unknown weights kind '" + kind + "'");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  const auto first = text.find_first_not_of(" \t\r\n");
  ExperimentConfig config = (first != std::string::npos && text[first] == '{')
                                ? parse_json(text, origin)
                                : parse_ini(text, origin);
  validate(config, origin);
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string config_to_json(const ExperimentConfig& config) {
  nlohmann::json experiment;
  experiment["command"] = config.command;
  experiment["horizon"] = config.horizon;
  experiment["window"] = config.window;
  experiment["depth"] = config.depth;
  experiment["paths"] = config.paths;
  experiment["seed"] = config.seed;
  experiment["checkpoints"] = config.checkpoints;
  experiment["zetas"] = config.zetas;
  experiment["perturb_mode"] = config.perturb_mode;
  experiment["epsilon"] = config.epsilon;
  experiment["delta"] = config.delta;
  experiment["stages"] = config.stages;
  experiment["grid_step"] = config.grid_step;
  experiment["n_max"] = config.n_max;
  experiment["k_max"] = config.k_max;
  experiment["output_dir"] = config.output_dir;
  experiment["oracle"] = config.oracle;

  nlohmann::json document;
  document["experiment"] = experiment;
  if (config.has_weights) {
    nlohmann::json weights;
    weights["kind"] = config.weights.kind;
    nlohmann::json pairs = nlohmann::json::array();
    for (const WeightPair& pair : config.weights.pairs) {
      pairs.push_back({pair.p, pair.q});
    }
    weights["pairs"] = pairs;
    if (!config.weights.tail_kind.empty()) {
      nlohmann::json tail_pairs = nlohmann::json::array();
      for (const WeightPair& pair : config.weights.tail) {
        tail_pairs.push_back({pair.p, pair.q});
      }
      weights["tail"] = {{"kind", config.weights.tail_kind}, {"pairs", tail_pairs}};
    }
    if (config.weights.kind == "random") {
      weights["seed"] = config.weights.seed;
      weights["period"] = config.weights.period;
    }
    document["weights"] = weights;
  }
  return document.dump(2);
}

}  // namespace dyadim

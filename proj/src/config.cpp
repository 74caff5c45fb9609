#include "lds/config.hpp"

#include <fmt/format.h>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lds/errors.hpp"

namespace lds {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  if (!obj.is_object()) throw UsageError(fmt::format("config: '{}' must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      throw UsageError(fmt::format("config: unknown key '{}{}'", where.empty() ? "" : where + ".", key));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(fmt::format("config: '{}.{}' has the wrong type", where, key));
  }
}

void read_simulation(const json& j, RunConfig& cfg) {
  reject_unknown(j, "simulation",
                 {"t_line", "t_return", "sample_hz", "pages", "lines", "sigma", "repetition",
                  "repeat_min", "repeat_max", "noise_corr", "line_length"});
  auto& s = cfg.sim;
  read(j, "t_line", s.t_line, "simulation");
  read(j, "t_return", s.t_return, "simulation");
  read(j, "sample_hz", s.sample_hz, "simulation");
  read(j, "pages", s.n_pages, "simulation");
  read(j, "lines", s.n_lines, "simulation");
  read(j, "sigma", s.sigma, "simulation");
  read(j, "repeat_min", s.repeat_min, "simulation");
  read(j, "repeat_max", s.repeat_max, "simulation");
  read(j, "noise_corr", s.noise_corr, "simulation");
  read(j, "line_length", s.line_length, "simulation");
  std::string rep = s.repetition == Repetition::none ? "none" : "random";
  read(j, "repetition", rep, "simulation");
  if (rep == "none") {
    s.repetition = Repetition::none;
  } else if (rep == "random") {
    s.repetition = Repetition::random;
  } else {
    throw UsageError("config: simulation.repetition must be 'none' or 'random'");
  }
}

void read_em(const json& j, RunConfig& cfg) {
  reject_unknown(j, "em", {"max_iters", "tol", "prob_floor", "threads", "prior_off_diagonal",
                           "stay", "emission_off_diagonal"});
  read(j, "max_iters", cfg.em.max_iters, "em");
  read(j, "tol", cfg.em.tol, "em");
  read(j, "prob_floor", cfg.em.prob_floor, "em");
  read(j, "threads", cfg.em.threads, "em");
  read(j, "prior_off_diagonal", cfg.guess.prior_off_diagonal, "em");
  read(j, "stay", cfg.guess.stay, "em");
  read(j, "emission_off_diagonal", cfg.guess.emission_off_diagonal, "em");
}

void read_experiment(const json& j, RunConfig& cfg) {
  reject_unknown(j, "experiment", {"noise_levels", "train_pages", "test_pages"});
  read(j, "noise_levels", cfg.noise_levels, "experiment");
  read(j, "train_pages", cfg.train_pages, "experiment");
  read(j, "test_pages", cfg.test_pages, "experiment");
}

void read_input(const json& j, RunConfig& cfg) {
  reject_unknown(j, "input", {"coordinates", "screen_width", "screen_height", "non_finite",
                              "k_sigma", "batch"});
  std::string units = "native";
  read(j, "coordinates", units, "input");
  if (units == "native" || units == "pixels") {
    cfg.csv.units = CoordinateUnits::native;
  } else if (units == "normalized") {
    cfg.csv.units = CoordinateUnits::normalized;
  } else {
    throw UsageError("config: input.coordinates must be 'native', 'pixels' or 'normalized'");
  }
  std::string policy = "error";
  read(j, "non_finite", policy, "input");
  if (policy == "error") {
    cfg.csv.non_finite = NonFinitePolicy::reject;
  } else if (policy == "drop") {
    cfg.csv.non_finite = NonFinitePolicy::drop;
  } else {
    throw UsageError("config: input.non_finite must be 'error' or 'drop'");
  }
  read(j, "screen_width", cfg.csv.screen_width, "input");
  read(j, "screen_height", cfg.csv.screen_height, "input");
  read(j, "k_sigma", cfg.region_estimate.k_sigma, "input");
  read(j, "batch", cfg.region_estimate.batch, "input");
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(fmt::format("config: {}", e.what()));
  }
  RunConfig cfg;
  reject_unknown(doc, "", {"simulation", "em", "experiment", "input", "seed"});
  if (doc.contains("simulation")) read_simulation(doc["simulation"], cfg);
  if (doc.contains("em")) read_em(doc["em"], cfg);
  if (doc.contains("experiment")) read_experiment(doc["experiment"], cfg);
  if (doc.contains("input")) read_input(doc["input"], cfg);
  read(doc, "seed", cfg.seed, "");
  cfg.sim.check();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("{}: cannot open config", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace lds

#pragma once

// TOML-backed configuration for the CLI: the task description and detection
// parameters ([task], [detection]) and the simulation setup ([simulation],
// [[edges]]).

#include <fstream>
#include <istream>
#include <set>
#include <string>
#include <vector>

#include "navmine/core.hpp"
#include "navmine/detect.hpp"
#include "navmine/errors.hpp"
#include "navmine/model.hpp"
#include "navmine/simulate.hpp"
#include "navmine/toml.hpp"

namespace navmine {

struct AppConfig {
  TaskSpec task;
  DetectionConfig detection;
  ProgressMethod progress_method = ProgressMethod::hitting_time;
  double exclusion_tau = 1.0;

  ModelConfig model_config() const { return ModelConfig{progress_method, exclusion_tau}; }
};

namespace detail {

inline PageId page_from_config(const std::string& raw, const std::string& what) {
  try {
    return PageId(raw);
  } catch (const Error& e) {
    fail(Errc::invalid_config, what + ": " + e.what());
  }
}

inline TaskSpec task_from_toml(const toml::Table& table) {
  const toml::Array& pages_raw = table.at("pages").as_array();
  std::set<PageId> pages;
  for (const toml::Value& v : pages_raw) {
    PageId page = page_from_config(v.as_string(), "task.pages");
    if (!pages.insert(page).second)
      fail(Errc::invalid_config, "task.pages lists '" + page.value() + "' twice");
  }
  TaskSpec task{std::move(pages), page_from_config(table.get_string("begin"), "task.begin"),
                page_from_config(table.get_string("final"), "task.final")};
  try {
    validate_task(task);
  } catch (const Error& e) {
    fail(Errc::invalid_config, e.what());
  }
  return task;
}

inline ScoreFormula score_formula_from(const std::string& name) {
  if (name == "consistent") return ScoreFormula::consistent;
  if (name == "literal") return ScoreFormula::literal;
  fail(Errc::invalid_config, "unknown score_formula '" + name + "'");
}

inline FeatureCombine feature_combine_from(const std::string& name) {
  if (name == "max") return FeatureCombine::max;
  if (name == "count_only") return FeatureCombine::count_only;
  if (name == "intensity_only") return FeatureCombine::intensity_only;
  fail(Errc::invalid_config, "unknown feature_combine '" + name + "'");
}

inline ProgressMethod progress_method_from(const std::string& name) {
  if (name == "hitting_time") return ProgressMethod::hitting_time;
  if (name == "shortest_path") return ProgressMethod::shortest_path;
  fail(Errc::invalid_config, "unknown progress_method '" + name + "'");
}

}  // namespace detail

inline AppConfig load_app_config(std::istream& in) {
  const toml::Document doc = toml::parse(in);
  AppConfig config{detail::task_from_toml(doc.table("task")), DetectionConfig{},
                   ProgressMethod::hitting_time, 1.0};

  if (doc.tables.count("detection")) {
    const toml::Table& d = doc.tables.at("detection");
    config.detection.epsilon = d.get_float_or("epsilon", config.detection.epsilon);
    config.detection.window_ms = d.get_int_or("window_ms", config.detection.window_ms);
    config.detection.score_formula =
        detail::score_formula_from(d.get_string_or("score_formula", "consistent"));
    config.detection.feature_combine =
        detail::feature_combine_from(d.get_string_or("feature_combine", "max"));
    config.progress_method =
        detail::progress_method_from(d.get_string_or("progress_method", "hitting_time"));
    config.exclusion_tau = d.get_float_or("exclusion_tau", config.exclusion_tau);
  }
  config.detection.validate();
  if (!(config.exclusion_tau > 0.0))
    fail(Errc::invalid_config, "exclusion_tau must be > 0");
  return config;
}

inline SimConfig load_sim_config(std::istream& in) {
  const toml::Document doc = toml::parse(in);
  const TaskSpec task = detail::task_from_toml(doc.table("task"));
  const toml::Table& sim = doc.table("simulation");

  auto arrays = doc.table_arrays.find("edges");
  if (arrays == doc.table_arrays.end() || arrays->second.empty())
    fail(Errc::invalid_config, "at least one [[edges]] entry is required");
  std::vector<Edge> edges;
  for (const toml::Table& e : arrays->second) {
    edges.push_back(Edge{detail::page_from_config(e.get_string("from"), "edges.from"),
                         detail::page_from_config(e.get_string("to"), "edges.to"),
                         e.get_float("prob")});
  }

  TransitionModel ground_truth = [&] {
    try {
      return TransitionModel::from_probabilities(task.pages, edges);
    } catch (const Error& e) {
      fail(Errc::invalid_config, e.what());
    }
  }();

  SimConfig config{std::move(ground_truth),
                   task,
                   sim.get_int("n_users"),
                   sim.get_float("failure_rate"),
                   detail::page_from_config(sim.get_string("failure_page"),
                                            "simulation.failure_page"),
                   sim.get_int_or("retry_min", 3),
                   sim.get_int_or("retry_max", 8),
                   sim.get_int_or("retry_gap_ms_max", 60000),
                   sim.get_int_or("normal_gap_mean_ms", 20000),
                   sim.get_int_or("max_steps", 200),
                   0};
  const std::int64_t seed = sim.get_int_or("seed", 0);
  if (seed < 0)
    fail(Errc::invalid_config, "seed must be >= 0");
  config.seed = static_cast<std::uint64_t>(seed);
  try {
    config.validate();
  } catch (const Error& e) {
    if (e.code() == Errc::invalid_config) throw;
    fail(Errc::invalid_config, e.what());
  }
  return config;
}

inline std::ifstream open_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    fail(Errc::invalid_config, "cannot open config file '" + path + "'");
  return in;
}

inline AppConfig load_app_config_file(const std::string& path) {
  std::ifstream in = open_config_file(path);
  return load_app_config(in);
}

inline SimConfig load_sim_config_file(const std::string& path) {
  std::ifstream in = open_config_file(path);
  return load_sim_config(in);
}

}  // namespace navmine

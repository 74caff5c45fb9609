#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lds/gaze_sim.hpp"
#include "lds/hmm.hpp"
#include "lds/line_detector.hpp"

namespace lds {

enum class Scenario { no_repeat, random_repeat };

std::string scenario_name(Scenario scenario);

/// The nine noise levels of the published error tables, in line-widths.
std::vector<double> table_noise_levels();

struct ExperimentSpec {
  Scenario scenario = Scenario::no_repeat;
  std::vector<double> noise_levels = table_noise_levels();
  SimConfig sim;  // sigma, repetition, n_pages and seed are set per run
  int train_pages = 40;
  int test_pages = 10;
  EmSettings em;
  InitialGuess guess;
  std::uint64_t seed = 0;

  void check() const;
};

struct BaselineComparison {
  EvalReport baseline;  // discretized observation used as the line estimate
  EvalReport hmm;
};

/// Scores the raw discretizer and the trained model on the same labelled
/// pages. Each page is discretized with its own region.
BaselineComparison compare_baseline(std::span<const LabeledPage> pages, const LdsModel& model);

struct TableRow {
  double sigma = 0.0;
  BaselineComparison errors;
  TrainingTrace trace;
};

/// For each noise level: simulate train + test pages with the spec's seed,
/// train on the first block, and score the rest.
std::vector<TableRow> run_table_experiment(const ExperimentSpec& spec);

/// Trains on simulated pages at each noise level and scores logged pages
/// (the real-data protocol, where labels come from the recording session).
std::vector<TableRow> run_logged_experiment(std::span<const LabeledPage> pages,
                                            const ExperimentSpec& spec);

// Plot data files.
void emit_page_scatter(const std::filesystem::path& path, const LabeledPage& page);
void emit_error_comparison(const std::filesystem::path& path, const BaselineComparison& report,
                           int first_page_number = 1);

struct ScenarioResults {
  Scenario scenario;
  std::vector<TableRow> rows;
};

/// Writes `<dir>/<scenario>/<sigma>/table.csv` for every row and
/// `<dir>/summary.csv` across all scenarios.
void write_results(const std::filesystem::path& dir, std::span<const ScenarioResults> results,
                   int first_test_page);

}  // namespace lds

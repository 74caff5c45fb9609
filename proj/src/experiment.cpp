#include "lds/experiment.hpp"

#include <fmt/format.h>
#include <ostream>

#include "lds/discretizer.hpp"
#include "lds/errors.hpp"
#include "lds/fixation_io.hpp"

namespace lds {

namespace fs = std::filesystem;

std::string scenario_name(Scenario scenario) {
  return scenario == Scenario::no_repeat ? "no_repeat" : "random_repeat";
}

std::vector<double> table_noise_levels() { return {1, 0.63, 0.46, 0.37, 0.3, 0.26, 0.25, 0.22, 0.2}; }

void ExperimentSpec::check() const {
  if (noise_levels.empty()) throw UsageError("experiment: no noise levels");
  for (double s : noise_levels) {
    if (!(s >= 0.0)) throw UsageError("experiment: noise levels must be non-negative");
  }
  if (train_pages < 1 || test_pages < 1) throw UsageError("experiment: empty train or test split");
}

BaselineComparison compare_baseline(std::span<const LabeledPage> pages, const LdsModel& model) {
  BaselineComparison out;
  out.baseline.method = Method::discretizer_only;
  out.hmm.method = Method::hmm;
  for (const auto& page : pages) {
    if (page.labels.size() != page.fixations.size()) {
      throw UsageError("compare_baseline: page labels and fixations differ in length");
    }
    if (page.region.n_lines != model.region.n_lines) {
      throw RangeError(fmt::format("page has {} lines, model has {}", page.region.n_lines,
                                   model.region.n_lines));
    }
    for (int label : page.labels) {
      if (label < 1 || label > model.region.n_lines) {
        throw RangeError(fmt::format("label {} outside 1..{}", label, model.region.n_lines));
      }
    }
    const auto obs = discretize_page(page.fixations, page.region);
    out.baseline.per_page_error.push_back(page_error(obs, page.labels));
    out.hmm.per_page_error.push_back(page_error(detect_lines(model, obs).states, page.labels));
  }
  if (!pages.empty()) {
    out.baseline.average_error = average_error(out.baseline.per_page_error);
    out.hmm.average_error = average_error(out.hmm.per_page_error);
  }
  return out;
}

std::vector<TableRow> run_table_experiment(const ExperimentSpec& spec) {
  spec.check();
  std::vector<TableRow> rows;
  for (double sigma : spec.noise_levels) {
    SimConfig sim = spec.sim;
    sim.sigma = sigma;
    sim.seed = spec.seed;
    sim.n_pages = spec.train_pages + spec.test_pages;
    sim.repetition = spec.scenario == Scenario::no_repeat ? Repetition::none : Repetition::random;
    const auto pages = simulate_corpus(sim);
    const auto [train_set, test_set] = split_corpus(pages, static_cast<std::size_t>(spec.train_pages));
    auto trained = train(train_set, spec.em, spec.guess);
    rows.push_back({sigma, compare_baseline(test_set, trained.model), std::move(trained.trace)});
  }
  return rows;
}

std::vector<TableRow> run_logged_experiment(std::span<const LabeledPage> pages,
                                            const ExperimentSpec& spec) {
  spec.check();
  if (pages.empty()) throw UsageError("experiment: no logged pages");
  std::vector<TableRow> rows;
  for (double sigma : spec.noise_levels) {
    SimConfig sim = spec.sim;
    sim.sigma = sigma;
    sim.seed = spec.seed;
    sim.n_pages = spec.train_pages;
    sim.n_lines = pages.front().region.n_lines;
    sim.repetition = spec.scenario == Scenario::no_repeat ? Repetition::none : Repetition::random;
    auto trained = train(simulate_corpus(sim), spec.em, spec.guess);
    rows.push_back({sigma, compare_baseline(pages, trained.model), std::move(trained.trace)});
  }
  return rows;
}

void emit_page_scatter(const fs::path& path, const LabeledPage& page) {
  write_file_atomically(path, [&](std::ostream& out) {
    write_fixation_csv(out, page.fixations, page.labels);
  });
}

void emit_error_comparison(const fs::path& path, const BaselineComparison& report,
                           int first_page_number) {
  if (report.baseline.per_page_error.size() != report.hmm.per_page_error.size()) {
    throw UsageError("emit_error_comparison: reports cover different page counts");
  }
  write_file_atomically(path, [&](std::ostream& out) {
    out << "page,e_discretizer,e_hmm\n";
    for (std::size_t p = 0; p < report.hmm.per_page_error.size(); ++p) {
      out << fmt::format("{},{},{}\n", first_page_number + static_cast<int>(p),
                         report.baseline.per_page_error[p], report.hmm.per_page_error[p]);
    }
  });
}

void write_results(const fs::path& dir, std::span<const ScenarioResults> results,
                   int first_test_page) {
  for (const auto& scenario : results) {
    for (const auto& row : scenario.rows) {
      emit_error_comparison(dir / scenario_name(scenario.scenario) / fmt::format("{}", row.sigma) /
                                "table.csv",
                            row.errors, first_test_page);
    }
  }
  write_file_atomically(dir / "summary.csv", [&](std::ostream& out) {
    out << "scenario,sigma,e_avg,e_avg_discretizer,em_iterations,converged\n";
    for (const auto& scenario : results) {
      for (const auto& row : scenario.rows) {
        out << fmt::format("{},{},{:.4f},{:.4f},{},{}\n", scenario_name(scenario.scenario),
                           row.sigma, row.errors.hmm.average_error,
                           row.errors.baseline.average_error, row.trace.iterations_run,
                           row.trace.converged ? 1 : 0);
      }
    }
  });
}

}  // namespace lds

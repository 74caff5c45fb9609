#include "commands.hpp"

#include <fmt/format.h>
#include <fstream>
#include <iostream>

#include "lds/config.hpp"
#include "lds/discretizer.hpp"
#include "lds/errors.hpp"
#include "lds/experiment.hpp"
#include "lds/fixation_io.hpp"
#include "lds/gaze_sim.hpp"
#include "lds/line_detector.hpp"

namespace lds::cli {

namespace {

RunConfig base_config(const Common& common) {
  RunConfig cfg = common.config ? load_config(*common.config) : RunConfig{};
  if (common.seed) cfg.seed = *common.seed;
  cfg.sim.seed = cfg.seed;
  return cfg;
}

Repetition parse_repetition(const std::string& name) {
  if (name == "none") return Repetition::none;
  if (name == "random") return Repetition::random;
  throw UsageError("--repeat must be 'none' or 'random'");
}

LdsModel load_model(const Path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open model", path.string()));
  try {
    return read_model(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

SurveillanceRegion page_region(const RunConfig& cfg, const RegionOptions& opts,
                               const FixationLog& log, int n_lines) {
  if (opts.estimate) return estimate_region(log.fixations, n_lines, cfg.region_estimate);
  SimConfig geometry = cfg.sim;
  geometry.n_lines = n_lines;
  auto region = geometry.region();
  if (!opts.bounds.empty()) {
    region.y_top = opts.bounds.at(0);
    region.y_bottom = opts.bounds.at(1);
  }
  check_region(region);
  return region;
}

LabeledPage load_page(const RunConfig& cfg, const RegionOptions& opts, const Path& path,
                      int n_lines) {
  auto log = parse_fixation_csv(path, cfg.csv);
  if (log.fixations.empty()) throw DataError(fmt::format("{}: no fixations", path.string()));
  for (int label : log.labels) {
    if (label > n_lines) {
      throw RangeError(fmt::format("{}: label {} outside 1..{}", path.string(), label, n_lines));
    }
  }
  auto region = page_region(cfg, opts, log, n_lines);
  return LabeledPage{std::move(log.fixations), std::move(log.labels), region};
}

void check_lines(const LdsModel& model, const std::optional<int>& lines) {
  if (lines && *lines != model.region.n_lines) {
    throw RangeError(fmt::format("requested {} lines but the model has {}", *lines,
                                 model.region.n_lines));
  }
}

}  // namespace

void run_simulate(const Common& common, const SimulateOptions& opts) {
  auto cfg = base_config(common);
  if (opts.sigma) cfg.sim.sigma = *opts.sigma;
  if (opts.pages) cfg.sim.n_pages = *opts.pages;
  if (opts.lines) cfg.sim.n_lines = *opts.lines;
  if (opts.repeat) cfg.sim.repetition = parse_repetition(*opts.repeat);
  if (opts.noise_corr) cfg.sim.noise_corr = *opts.noise_corr;
  cfg.sim.check();

  for (int p = 0; p < cfg.sim.n_pages; ++p) {
    const auto page = simulate_page(cfg.sim, p);
    emit_page_scatter(opts.out / fmt::format("page_{:03}.csv", p + 1), page);
  }
  std::cout << fmt::format("wrote {} pages ({} lines, sigma {}) to {}\n", cfg.sim.n_pages,
                           cfg.sim.n_lines, cfg.sim.sigma, opts.out.string());
}

void run_train(const Common& common, const TrainOptions& opts) {
  auto cfg = base_config(common);
  if (opts.max_iters) cfg.em.max_iters = *opts.max_iters;
  if (opts.tol) cfg.em.tol = *opts.tol;
  if (opts.lines) cfg.sim.n_lines = *opts.lines;

  TrainedModel trained;
  std::size_t n_pages = 0;
  if (opts.inputs.empty()) {
    // Train on simulated pages at the device's noise level.
    if (opts.sigma) cfg.sim.sigma = *opts.sigma;
    cfg.sim.n_pages = opts.pages.value_or(cfg.train_pages);
    if (opts.repeat) cfg.sim.repetition = parse_repetition(*opts.repeat);
    const auto pages = simulate_corpus(cfg.sim);
    n_pages = pages.size();
    trained = train(pages, cfg.em, cfg.guess);
  } else {
    std::vector<LabeledPage> pages;
    for (const auto& path : collect_csv_inputs(opts.inputs)) {
      pages.push_back(load_page(cfg, opts.region, path, cfg.sim.n_lines));
    }
    if (pages.empty()) throw DataError("train: no input pages found");
    n_pages = pages.size();
    trained = train(pages, cfg.em, cfg.guess);
  }

  write_file_atomically(opts.model, [&](std::ostream& out) { write_model(out, trained.model); });
  const auto& ll = trained.trace.log_likelihoods;
  std::cout << fmt::format("trained on {} pages: {} EM iterations, {}, log-likelihood {:.4f} -> {:.4f}\n",
                           n_pages, trained.trace.iterations_run,
                           trained.trace.converged ? "converged" : "iteration limit reached",
                           ll.front(), ll.back());
}

void run_decode(const Common& common, const DecodeOptions& opts) {
  auto cfg = base_config(common);
  const auto model = load_model(opts.model);
  check_lines(model, opts.lines);

  auto log = parse_fixation_csv(opts.input, cfg.csv);
  if (log.fixations.empty()) throw DataError(fmt::format("{}: no fixations", opts.input.string()));
  for (int label : log.labels) {
    if (label > model.region.n_lines) {
      throw RangeError(fmt::format("{}: label {} outside the model's 1..{}", opts.input.string(),
                                   label, model.region.n_lines));
    }
  }
  const auto region = opts.region.estimate || !opts.region.bounds.empty()
                          ? page_region(cfg, opts.region, log, model.region.n_lines)
                          : model.region;
  const auto obs = discretize_page(log.fixations, region);
  const auto lines = opts.window > 0 ? detect_lines_streaming(model, obs, opts.window)
                                     : detect_lines(model, obs).states;

  auto emit = [&](std::ostream& out) {
    out << "t,observation,line\n";
    for (std::size_t i = 0; i < obs.size(); ++i) {
      out << fmt::format("{},{},{}\n", log.fixations[i].t, obs[i], lines[i]);
    }
  };
  if (opts.out) {
    write_file_atomically(*opts.out, emit);
  } else {
    emit(std::cout);
  }
}

void run_evaluate(const Common& common, const EvaluateOptions& opts) {
  auto cfg = base_config(common);
  if (opts.model.has_value() == opts.train_sigma.has_value()) {
    throw UsageError("evaluate needs exactly one of --model or --train-sigma");
  }
  LdsModel model;
  if (opts.model) {
    model = load_model(*opts.model);
  } else {
    cfg.sim.sigma = *opts.train_sigma;
    cfg.sim.n_pages = cfg.train_pages;
    model = train(simulate_corpus(cfg.sim), cfg.em, cfg.guess).model;
  }

  std::vector<LabeledPage> pages;
  for (const auto& path : collect_csv_inputs(opts.inputs)) {
    auto page = load_page(cfg, opts.region, path, model.region.n_lines);
    if (page.labels.empty()) {
      throw DataError(fmt::format("{}: evaluate needs a label column", path.string()));
    }
    if (!opts.region.estimate && opts.region.bounds.empty()) page.region = model.region;
    pages.push_back(std::move(page));
  }
  if (pages.empty()) throw DataError("evaluate: no input pages found");

  const auto report = compare_baseline(pages, model);
  if (opts.out) emit_error_comparison(*opts.out, report);
  std::cout << fmt::format("pages {}\n{:<18}{:.4f} %\n{:<18}{:.4f} %\n", pages.size(),
                           to_string(report.baseline.method), report.baseline.average_error,
                           to_string(report.hmm.method), report.hmm.average_error);
}

void run_estimate_region(const Common& common, const EstimateRegionOptions& opts) {
  auto cfg = base_config(common);
  if (opts.k_sigma) cfg.region_estimate.k_sigma = *opts.k_sigma;
  if (opts.batch) cfg.region_estimate.batch = *opts.batch;
  const int lines = opts.lines.value_or(cfg.sim.n_lines);
  const auto log = parse_fixation_csv(opts.input, cfg.csv);
  const auto r = estimate_region(log.fixations, lines, cfg.region_estimate);
  std::cout << fmt::format("region {} {} {} {} {}\nL_y {}\nL_x {}\n", r.y_top, r.y_bottom,
                           r.x_left, r.x_right, r.n_lines, r.height(), r.width());
}

void run_tables(const Common& common, const TablesOptions& opts) {
  auto cfg = base_config(common);
  if (opts.max_iters) cfg.em.max_iters = *opts.max_iters;

  std::vector<Scenario> scenarios;
  if (opts.scenario == "all" || opts.scenario == "no_repeat") scenarios.push_back(Scenario::no_repeat);
  if (opts.scenario == "all" || opts.scenario == "random_repeat") {
    scenarios.push_back(Scenario::random_repeat);
  }
  if (scenarios.empty()) throw UsageError("--scenario must be all, no_repeat or random_repeat");

  std::vector<ScenarioResults> results;
  for (auto scenario : scenarios) {
    ExperimentSpec spec;
    spec.scenario = scenario;
    spec.noise_levels = opts.sigmas.empty() ? cfg.noise_levels : opts.sigmas;
    spec.sim = cfg.sim;
    spec.train_pages = cfg.train_pages;
    spec.test_pages = cfg.test_pages;
    spec.em = cfg.em;
    spec.guess = cfg.guess;
    spec.seed = cfg.seed;
    results.push_back({scenario, run_table_experiment(spec)});
    for (const auto& row : results.back().rows) {
      std::cout << fmt::format("{:<14} sigma {:<5} e_avg {:8.4f} %   discretizer {:8.4f} %\n",
                               scenario_name(scenario), row.sigma, row.errors.hmm.average_error,
                               row.errors.baseline.average_error);
    }
  }
  write_results(opts.out, results, cfg.train_pages + 1);
  std::cout << fmt::format("results written to {}\n", opts.out.string());
}

}  // namespace lds::cli

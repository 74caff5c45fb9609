// Command-line front end: simulate | train | decode | evaluate | estimate-region | tables.
//
// Exit codes: 0 success, 1 usage, 2 data/format, 3 numeric failure.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lds/errors.hpp"

namespace {

void add_common(CLI::App* cmd, lds::cli::Common& common) {
  cmd->add_option("--config", common.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", common.seed, "Base RNG seed");
}

void add_region(CLI::App* cmd, lds::cli::RegionOptions& region) {
  auto* est = cmd->add_flag("--estimate-region", region.estimate,
                            "Estimate each page's text block from its fixations");
  cmd->add_option("--region", region.bounds, "Text block as y_top,y_bottom")
      ->delimiter(',')
      ->expected(2)
      ->excludes(est);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lds::cli;
  CLI::App app{"Line detection for reading from noisy eye-gaze fixations"};
  app.require_subcommand(1);

  Common common;

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Write simulated labelled pages as CSV");
  add_common(simulate, common);
  simulate->add_option("--sigma", sim.sigma, "Gaze noise std in line-widths");
  simulate->add_option("--pages", sim.pages, "Number of pages");
  simulate->add_option("--lines", sim.lines, "Lines per page");
  simulate->add_option("--repeat", sim.repeat, "none | random")->check(CLI::IsMember({"none", "random"}));
  simulate->add_option("--noise-corr", sim.noise_corr, "AR(1) noise coefficient in [0, 1)");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a line detection model");
  add_common(train, common);
  train->add_option("--model", tr.model, "Model file to write")->required();
  train->add_option("--input", tr.inputs, "CSV pages or directories (default: simulate)");
  train->add_option("--sigma", tr.sigma, "Noise level of simulated training pages");
  train->add_option("--pages", tr.pages, "Number of simulated training pages");
  train->add_option("--lines", tr.lines, "Lines per page");
  train->add_option("--repeat", tr.repeat, "none | random")->check(CLI::IsMember({"none", "random"}));
  train->add_option("--max-iters", tr.max_iters, "EM iteration limit");
  train->add_option("--tol", tr.tol, "EM log-likelihood tolerance");
  add_region(train, tr.region);

  DecodeOptions dec;
  auto* decode = app.add_subcommand("decode", "Estimate the line read at every sample");
  add_common(decode, common);
  decode->add_option("--model", dec.model, "Model file")->required();
  decode->add_option("--input", dec.input, "CSV page")->required();
  decode->add_option("--out", dec.out, "Output CSV (default: stdout)");
  decode->add_option("--lines", dec.lines, "Expected lines per page");
  decode->add_option("--window", dec.window, "Decode in windows of this many samples");
  add_region(decode, dec.region);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compare discretizer and HMM errors on labelled pages");
  add_common(evaluate, common);
  auto* model_opt = evaluate->add_option("--model", ev.model, "Model file");
  evaluate->add_option("--train-sigma", ev.train_sigma, "Train on simulated pages at this noise level instead")
      ->excludes(model_opt);
  evaluate->add_option("--input", ev.inputs, "CSV pages or directories")->required();
  evaluate->add_option("--out", ev.out, "Per-page error CSV");
  add_region(evaluate, ev.region);

  EstimateRegionOptions er;
  auto* estimate = app.add_subcommand("estimate-region", "Estimate the text block from fixations");
  add_common(estimate, common);
  estimate->add_option("--input", er.input, "CSV page")->required();
  estimate->add_option("--lines", er.lines, "Lines per page");
  estimate->add_option("--k-sigma", er.k_sigma, "Outlier threshold in standard deviations");
  estimate->add_option("--batch", er.batch, "Extreme points averaged per bound");

  TablesOptions tb;
  auto* tables = app.add_subcommand("tables", "Run the simulated error tables");
  add_common(tables, common);
  tables->add_option("--out", tb.out, "Results directory")->capture_default_str();
  tables->add_option("--scenario", tb.scenario, "all | no_repeat | random_repeat")
      ->check(CLI::IsMember({"all", "no_repeat", "random_repeat"}));
  tables->add_option("--sigmas", tb.sigmas, "Noise levels")->delimiter(',');
  tables->add_option("--max-iters", tb.max_iters, "EM iteration limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*simulate) run_simulate(common, sim);
    if (*train) run_train(common, tr);
    if (*decode) run_decode(common, dec);
    if (*evaluate) run_evaluate(common, ev);
    if (*estimate) run_estimate_region(common, er);
    if (*tables) run_tables(common, tb);
  } catch (const lds::UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const lds::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    // RangeError, DataError and filesystem errors.
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

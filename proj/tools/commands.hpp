#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lds::cli {

using Path = std::filesystem::path;

struct Common {
  std::optional<Path> config;
  std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
  std::optional<double> sigma;
  std::optional<int> pages;
  std::optional<int> lines;
  std::optional<std::string> repeat;
  std::optional<double> noise_corr;
  Path out;
};

// How input pages are placed on screen.
struct RegionOptions {
  bool estimate = false;
  std::vector<double> bounds;  // y_top, y_bottom
};

struct TrainOptions {
  Path model;
  std::vector<Path> inputs;  // empty: train on simulated pages
  std::optional<double> sigma;
  std::optional<int> pages;
  std::optional<int> lines;
  std::optional<std::string> repeat;
  std::optional<int> max_iters;
  std::optional<double> tol;
  RegionOptions region;
};

struct DecodeOptions {
  Path model;
  Path input;
  std::optional<Path> out;
  std::optional<int> lines;
  std::size_t window = 0;  // 0 = whole page
  RegionOptions region;
};

struct EvaluateOptions {
  std::optional<Path> model;
  std::optional<double> train_sigma;
  std::vector<Path> inputs;
  std::optional<Path> out;
  RegionOptions region;
};

struct EstimateRegionOptions {
  Path input;
  std::optional<int> lines;
  std::optional<double> k_sigma;
  std::optional<int> batch;
};

struct TablesOptions {
  Path out = "results";
  std::string scenario = "all";
  std::vector<double> sigmas;
  std::optional<int> max_iters;
};

void run_simulate(const Common& common, const SimulateOptions& opts);
void run_train(const Common& common, const TrainOptions& opts);
void run_decode(const Common& common, const DecodeOptions& opts);
void run_evaluate(const Common& common, const EvaluateOptions& opts);
void run_estimate_region(const Common& common, const EstimateRegionOptions& opts);
void run_tables(const Common& common, const TablesOptions& opts);

}  // namespace lds::cli

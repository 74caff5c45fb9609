#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lds/discretizer.hpp"

namespace lds {

enum class Repetition { none, random };

/// Reading simulation parameters. Lengths are in line-widths (the distance
/// between adjacent line centres), so `sigma` is directly comparable across
/// page sizes.
struct SimConfig {
  double t_line = 1.0;     // seconds spent reading one line
  double t_return = 0.1;   // right-to-left return sweep, taken from the start of each line
  double sample_hz = 60.0;
  int n_pages = 50;
  int n_lines = 25;
  double sigma = 0.2;      // gaze noise std, both axes
  Repetition repetition = Repetition::none;
  int repeat_min = 1;      // consecutive reads per line when repetition == random
  int repeat_max = 5;
  std::uint64_t seed = 0;
  double noise_corr = 0.0;   // AR(1) coefficient of the noise, 0 = white
  double line_length = 20.0; // L_x

  void check() const;
  SurveillanceRegion region() const;
};

/// A simulated or logged page with ground-truth line labels.
struct LabeledPage {
  std::vector<Fixation> fixations;
  std::vector<int> labels;
  SurveillanceRegion region;
};

int samples_per_line(const SimConfig& config);

/// Expected fixation count of one page: (T_l * f_s) * N_l, times the mean
/// repetition count when lines repeat. Return sweeps are part of T_l.
std::int64_t samples_per_page(const SimConfig& config);

/// Deterministic in (config, page_index); the page RNG is seeded with
/// config.seed + page_index.
LabeledPage simulate_page(const SimConfig& config, int page_index);

std::vector<LabeledPage> simulate_corpus(const SimConfig& config);

/// First `n_train` pages and the remainder.
std::pair<std::span<const LabeledPage>, std::span<const LabeledPage>> split_corpus(
    std::span<const LabeledPage> pages, std::size_t n_train);

}  // namespace lds

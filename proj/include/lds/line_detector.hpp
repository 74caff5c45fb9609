#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "lds/discretizer.hpp"
#include "lds/gaze_sim.hpp"
#include "lds/hmm.hpp"

namespace lds {

/// Trained HMM plus the region used to discretize its input.
struct LdsModel {
  HmmParams params;
  SurveillanceRegion region;
};

struct InitialGuess {
  double prior_off_diagonal = 0.01;     // mass on each line other than the first
  double stay = 0.9;                    // A0 diagonal
  double emission_off_diagonal = 0.01;  // B0 off-diagonal; diagonal takes the rest
};

/// Starting point for training: reading starts on line 1, moves at most one
/// line per sample, and mostly observes the true line.
HmmParams default_initial_params(int n_lines, const InitialGuess& guess = {});

struct TrainedModel {
  LdsModel model;
  TrainingTrace trace;
};

/// Unsupervised training from default_initial_params; page labels are ignored.
TrainedModel train(std::span<const LabeledPage> pages, const EmSettings& em = {},
                   const InitialGuess& guess = {});
TrainedModel train(std::span<const ObservationSequence> corpus, const SurveillanceRegion& region,
                   const EmSettings& em = {}, const InitialGuess& guess = {});

/// Batch Viterbi decode of one page.
StatePath detect_lines(const LdsModel& model, std::span<const int> obs);

/// Fixed-window decode: each window is decoded on its own, starting from the
/// transition row of the previous window's last decoded line.
std::vector<int> detect_lines_streaming(const LdsModel& model, std::span<const int> obs,
                                        std::size_t window = 1200);

/// Percentage of samples where predicted != truth.
double page_error(std::span<const int> predicted, std::span<const int> truth);
double average_error(std::span<const double> page_errors);

enum class Method { discretizer_only, hmm };

struct EvalReport {
  std::vector<double> per_page_error;
  double average_error = 0.0;
  Method method = Method::hmm;
};

const char* to_string(Method method);

/// Model file: a `region y_top y_bottom x_left x_right n_lines` line followed
/// by the HMM matrix block.
void write_model(std::ostream& out, const LdsModel& model);
LdsModel read_model(std::istream& in);

}  // namespace lds

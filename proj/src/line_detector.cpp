#include "lds/line_detector.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "lds/errors.hpp"

namespace lds {

namespace {

void check_model(const LdsModel& model) {
  check_region(model.region);
  if (model.params.n_states() != model.region.n_lines) {
    throw UsageError(fmt::format("model has {} states but its region has {} lines",
                                 model.params.n_states(), model.region.n_lines));
  }
}

}  // namespace

HmmParams default_initial_params(int n_lines, const InitialGuess& guess) {
  if (n_lines < 2) throw UsageError("default_initial_params: n_lines must be at least 2");
  const double others = n_lines - 1;
  if (!(guess.prior_off_diagonal >= 0.0) || guess.prior_off_diagonal * others >= 1.0) {
    throw UsageError("prior off-diagonal mass too large for the number of lines");
  }
  if (!(guess.emission_off_diagonal >= 0.0) || guess.emission_off_diagonal * others >= 1.0) {
    throw UsageError("emission off-diagonal mass too large for the number of lines");
  }
  if (!(guess.stay > 0.0 && guess.stay < 1.0)) throw UsageError("stay probability must be in (0, 1)");

  const auto n = static_cast<Eigen::Index>(n_lines);
  HmmParams p{Vector::Constant(n, guess.prior_off_diagonal), Matrix::Zero(n, n),
              Matrix::Constant(n, n, guess.emission_off_diagonal)};
  p.prior(0) = 1.0 - guess.prior_off_diagonal * others;

  const double move = 1.0 - guess.stay;
  for (Eigen::Index i = 0; i < n; ++i) {
    p.transition(i, i) = guess.stay;
    if (i == 0) {
      p.transition(i, 1) = move;
    } else if (i == n - 1) {
      p.transition(i, i - 1) = move;
    } else {
      p.transition(i, i - 1) = move / 2;
      p.transition(i, i + 1) = move / 2;
    }
    p.emission(i, i) = 1.0 - guess.emission_off_diagonal * others;
  }
  return p;
}

TrainedModel train(std::span<const ObservationSequence> corpus, const SurveillanceRegion& region,
                   const EmSettings& em, const InitialGuess& guess) {
  check_region(region);
  if (corpus.empty()) throw UsageError("train: empty corpus");
  auto [params, trace] = baum_welch(default_initial_params(region.n_lines, guess), corpus, em);
  if (auto violation = validate(params)) {
    throw NumericError("training produced an invalid model: " + *violation);
  }
  return {LdsModel{std::move(params), region}, std::move(trace)};
}

TrainedModel train(std::span<const LabeledPage> pages, const EmSettings& em,
                   const InitialGuess& guess) {
  if (pages.empty()) throw UsageError("train: empty corpus");
  const auto& region = pages.front().region;
  std::vector<ObservationSequence> corpus;
  corpus.reserve(pages.size());
  for (const auto& page : pages) {
    if (page.region.n_lines != region.n_lines) {
      throw UsageError("train: pages disagree on the number of lines");
    }
    corpus.push_back(discretize_page(page.fixations, page.region));
  }
  return train(corpus, region, em, guess);
}

StatePath detect_lines(const LdsModel& model, std::span<const int> obs) {
  check_model(model);
  return viterbi(model.params, obs);
}

std::vector<int> detect_lines_streaming(const LdsModel& model, std::span<const int> obs,
                                        std::size_t window) {
  check_model(model);
  if (window == 0) throw UsageError("streaming window must be positive");
  if (obs.empty()) throw UsageError("observation sequence is empty");
  std::vector<int> states;
  states.reserve(obs.size());
  HmmParams params = model.params;
  for (std::size_t start = 0; start < obs.size(); start += window) {
    const auto chunk = obs.subspan(start, std::min(window, obs.size() - start));
    auto path = viterbi(params, chunk);
    states.insert(states.end(), path.states.begin(), path.states.end());
    params.prior = model.params.transition.row(path.states.back() - 1).transpose();
  }
  return states;
}

double page_error(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw UsageError(fmt::format("page_error: {} predictions for {} labels", predicted.size(),
                                 truth.size()));
  }
  if (truth.empty()) throw UsageError("page_error: empty page");
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) wrong += predicted[t] != truth[t];
  return 100.0 * static_cast<double>(wrong) / static_cast<double>(truth.size());
}

double average_error(std::span<const double> page_errors) {
  if (page_errors.empty()) throw UsageError("average_error: no pages");
  return std::accumulate(page_errors.begin(), page_errors.end(), 0.0) /
         static_cast<double>(page_errors.size());
}

const char* to_string(Method method) {
  return method == Method::hmm ? "hmm" : "discretizer-only";
}

void write_model(std::ostream& out, const LdsModel& model) {
  check_model(model);
  const auto& r = model.region;
  out << std::setprecision(17) << "region " << r.y_top << ' ' << r.y_bottom << ' ' << r.x_left
      << ' ' << r.x_right << ' ' << r.n_lines << '\n';
  write_params(out, model.params);
}

LdsModel read_model(std::istream& in) {
  std::string tag;
  LdsModel model;
  auto& r = model.region;
  if (!(in >> tag) || tag != "region" ||
      !(in >> r.y_top >> r.y_bottom >> r.x_left >> r.x_right >> r.n_lines)) {
    throw DataError("model file: missing or malformed region header");
  }
  model.params = read_params(in);
  try {
    check_model(model);
  } catch (const UsageError& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  return model;
}

}  // namespace lds

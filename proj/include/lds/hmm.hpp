#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lds {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Discrete hidden Markov model whose observation alphabet has the same size
/// as its state space (one symbol per text line).
///
/// States and symbols are 1-based in every public sequence type; the matrices
/// are indexed from 0 as usual for Eigen, so `transition(i - 1, j - 1)` is
/// P(S(t+1) = j | S(t) = i) and `emission(i - 1, k - 1)` is
/// P(o(t) = k | S(t) = i).
struct HmmParams {
  Vector prior;
  Matrix transition;
  Matrix emission;

  int n_states() const { return static_cast<int>(prior.size()); }
};

/// Observed line numbers, each in 1..n_states.
using ObservationSequence = std::vector<int>;

struct StatePath {
  std::vector<int> states;  // 1-based
  double log_prob = 0.0;    // log P(states, observations)
};

struct TrainingTrace {
  std::vector<double> log_likelihoods;  // one per E-step
  int iterations_run = 0;               // M-steps applied
  bool converged = false;
};

struct EmSettings {
  int max_iters = 500;
  double tol = 1e-4;          // absolute improvement of the summed log-likelihood
  double prob_floor = 1e-10;  // applied after each M-step, rows renormalised
  int threads = 0;            // 0 = hardware concurrency
};

/// Returns the first violated invariant, or nothing when `params` is a valid
/// model. Row sums must be 1 within 1e-12.
std::optional<std::string> validate(const HmmParams& params);

/// log P(obs | params) via the scaled forward recursion. Returns -infinity if
/// the sequence is impossible under the model.
double forward_log_likelihood(const HmmParams& params, std::span<const int> obs);

/// Multi-sequence Baum-Welch. E-step statistics are summed over all sequences
/// in input order before each M-step, so the result does not depend on the
/// thread count.
std::pair<HmmParams, TrainingTrace> baum_welch(const HmmParams& init,
                                               std::span<const ObservationSequence> sequences,
                                               const EmSettings& settings = {});

/// Most probable state path. Ties go to the lower state index.
StatePath viterbi(const HmmParams& params, std::span<const int> obs);

/// Plain-text matrix format: `n`, then the prior row, n transition rows and
/// n emission rows of whitespace-separated decimals.
void write_params(std::ostream& out, const HmmParams& params);
HmmParams read_params(std::istream& in);

}  // namespace lds

#include "lds/hmm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fmt/format.h>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "lds/errors.hpp"

namespace lds {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::optional<std::string> check_stochastic_rows(const Matrix& m, const char* name) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!is_probability(m(i, j))) {
        return fmt::format("{} entry ({}, {}) outside [0, 1]", name, i + 1, j + 1);
      }
    }
    if (std::abs(m.row(i).sum() - 1.0) > kStochasticTol) {
      return fmt::format("{} row {} not stochastic", name, i + 1);
    }
  }
  return std::nullopt;
}

void require_valid(const HmmParams& params) {
  if (auto violation = validate(params)) {
    throw UsageError("invalid HMM parameters: " + *violation);
  }
}

void require_symbols(std::span<const int> obs, int n_symbols) {
  if (obs.empty()) {
    throw UsageError("observation sequence is empty");
  }
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] < 1 || obs[t] > n_symbols) {
      throw RangeError(fmt::format("observation {} at position {} outside 1..{}", obs[t], t + 1,
                                   n_symbols));
    }
  }
}

// Sufficient statistics of one sequence under the current parameters.
struct SequenceStats {
  Vector first_posterior;  // gamma_1
  Matrix transitions;      // sum_t xi_t
  Matrix emissions;        // state x symbol, sum_t gamma_t [o_t = k]
  double log_likelihood = 0.0;
};

class ForwardBackward {
 public:
  explicit ForwardBackward(const HmmParams& params)
      : params_(params), emission_by_symbol_(params.emission.transpose()) {}

  SequenceStats run(std::span<const int> obs) const {
    const auto n = params_.n_states();
    const auto len = static_cast<Eigen::Index>(obs.size());
    SequenceStats stats;
    Matrix alpha(len, n);
    std::vector<double> scale(obs.size());

    alpha.row(0) = params_.prior.transpose().cwiseProduct(emission_by_symbol_.row(obs[0] - 1));
    for (Eigen::Index t = 0; t < len; ++t) {
      if (t > 0) {
        alpha.row(t) = (alpha.row(t - 1) * params_.transition)
                           .cwiseProduct(emission_by_symbol_.row(obs[t] - 1));
      }
      const double c = alpha.row(t).sum();
      if (!(c > 0.0)) {
        stats.log_likelihood = kNegInf;
        return stats;
      }
      alpha.row(t) /= c;
      scale[t] = c;
      stats.log_likelihood += std::log(c);
    }

    Matrix outer = Matrix::Zero(n, n);
    Matrix symbol_posteriors = Matrix::Zero(n, n);  // symbol x state
    Eigen::RowVectorXd beta = Eigen::RowVectorXd::Ones(n);
    symbol_posteriors.row(obs[len - 1] - 1) += alpha.row(len - 1);
    for (Eigen::Index t = len - 2; t >= 0; --t) {
      const Eigen::RowVectorXd weighted =
          emission_by_symbol_.row(obs[t + 1] - 1).cwiseProduct(beta) / scale[t + 1];
      outer.noalias() += alpha.row(t).transpose() * weighted;
      beta = (params_.transition * weighted.transpose()).transpose();
      symbol_posteriors.row(obs[t] - 1) += alpha.row(t).cwiseProduct(beta);
      if (t == 0) {
        stats.first_posterior = alpha.row(0).cwiseProduct(beta).transpose();
      }
    }
    if (len == 1) {
      stats.first_posterior = alpha.row(0).transpose();
    }
    stats.transitions = params_.transition.cwiseProduct(outer);
    stats.emissions = symbol_posteriors.transpose();
    return stats;
  }

  double log_likelihood(std::span<const int> obs) const {
    const auto n = params_.n_states();
    Eigen::RowVectorXd alpha(n);
    double ll = 0.0;
    for (std::size_t t = 0; t < obs.size(); ++t) {
      const auto b = emission_by_symbol_.row(obs[t] - 1);
      if (t == 0) {
        alpha = params_.prior.transpose().cwiseProduct(b);
      } else {
        alpha = (alpha * params_.transition).cwiseProduct(b);
      }
      const double c = alpha.sum();
      if (!(c > 0.0)) {
        return kNegInf;
      }
      alpha /= c;
      ll += std::log(c);
    }
    return ll;
  }

 private:
  const HmmParams& params_;
  Matrix emission_by_symbol_;
};

std::vector<SequenceStats> expectation(const HmmParams& params,
                                       std::span<const ObservationSequence> sequences,
                                       int threads) {
  const ForwardBackward fb(params);
  std::vector<SequenceStats> stats(sequences.size());
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), sequences.size());
  if (workers <= 1) {
    for (std::size_t k = 0; k < sequences.size(); ++k) stats[k] = fb.run(sequences[k]);
    return stats;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto k = next++; k < sequences.size(); k = next++) stats[k] = fb.run(sequences[k]);
      });
    }
  }
  return stats;
}

void floor_and_normalize(auto&& row, double floor) {
  row = row.cwiseMax(floor);
  row /= row.sum();
}

}  // namespace

std::optional<std::string> validate(const HmmParams& params) {
  const auto n = params.prior.size();
  if (n < 2) return "n_states must be at least 2";
  if (params.transition.rows() != n || params.transition.cols() != n) {
    return fmt::format("transition must be {0}x{0}", n);
  }
  if (params.emission.rows() != n || params.emission.cols() != n) {
    return fmt::format("emission must be {0}x{0}", n);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!is_probability(params.prior(i))) {
      return fmt::format("prior entry {} outside [0, 1]", i + 1);
    }
  }
  if (std::abs(params.prior.sum() - 1.0) > kStochasticTol) return "prior does not sum to 1";
  if (auto v = check_stochastic_rows(params.transition, "transition")) return v;
  if (auto v = check_stochastic_rows(params.emission, "emission")) return v;
  return std::nullopt;
}

double forward_log_likelihood(const HmmParams& params, std::span<const int> obs) {
  require_valid(params);
  require_symbols(obs, params.n_states());
  return ForwardBackward(params).log_likelihood(obs);
}

std::pair<HmmParams, TrainingTrace> baum_welch(const HmmParams& init,
                                               std::span<const ObservationSequence> sequences,
                                               const EmSettings& settings) {
  require_valid(init);
  if (sequences.empty()) throw UsageError("baum_welch needs at least one sequence");
  if (settings.max_iters < 1) throw UsageError("max_iters must be at least 1");
  if (!(settings.tol > 0.0)) throw UsageError("tol must be positive");
  if (!(settings.prob_floor >= 0.0) || settings.prob_floor * init.n_states() >= 1.0) {
    throw UsageError("prob_floor out of range");
  }
  const auto n = init.n_states();
  for (const auto& seq : sequences) require_symbols(seq, n);

  const int threads = settings.threads > 0
                          ? settings.threads
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  HmmParams params = init;
  TrainingTrace trace;
  for (;;) {
    const auto stats = expectation(params, sequences, threads);

    Vector first = Vector::Zero(n);
    Matrix transitions = Matrix::Zero(n, n);
    Matrix emissions = Matrix::Zero(n, n);
    double total_ll = 0.0;
    for (std::size_t k = 0; k < stats.size(); ++k) {
      if (!std::isfinite(stats[k].log_likelihood)) {
        throw NumericError(
            fmt::format("sequence {} has zero likelihood under the current model", k + 1));
      }
      total_ll += stats[k].log_likelihood;
      first += stats[k].first_posterior;
      transitions += stats[k].transitions;
      emissions += stats[k].emissions;
    }

    const bool improved_enough =
        trace.log_likelihoods.empty() || total_ll - trace.log_likelihoods.back() >= settings.tol;
    trace.log_likelihoods.push_back(total_ll);
    if (!improved_enough) {
      trace.converged = true;
      break;
    }
    if (trace.iterations_run == settings.max_iters) break;

    // Rows without any expected counts keep their previous estimate.
    params.prior = first / static_cast<double>(sequences.size());
    floor_and_normalize(params.prior, settings.prob_floor);
    for (int i = 0; i < n; ++i) {
      if (const double mass = transitions.row(i).sum(); mass > 0.0) {
        params.transition.row(i) = transitions.row(i) / mass;
      }
      floor_and_normalize(params.transition.row(i), settings.prob_floor);
      if (const double mass = emissions.row(i).sum(); mass > 0.0) {
        params.emission.row(i) = emissions.row(i) / mass;
      }
      floor_and_normalize(params.emission.row(i), settings.prob_floor);
    }
    ++trace.iterations_run;
  }
  return {std::move(params), std::move(trace)};
}

StatePath viterbi(const HmmParams& params, std::span<const int> obs) {
  require_valid(params);
  const int n = params.n_states();
  require_symbols(obs, n);

  const Vector log_prior = params.prior.array().log();
  const Matrix log_trans_by_dest = params.transition.transpose().array().log();
  const Matrix log_emit_by_symbol = params.emission.transpose().array().log();

  const auto len = obs.size();
  std::vector<int> back(len * static_cast<std::size_t>(n), 0);
  Vector delta(n);
  Vector next(n);
  for (int j = 0; j < n; ++j) delta(j) = log_prior(j) + log_emit_by_symbol(obs[0] - 1, j);

  for (std::size_t t = 1; t < len; ++t) {
    const auto b = log_emit_by_symbol.row(obs[t] - 1);
    int* psi = back.data() + t * static_cast<std::size_t>(n);
    for (int j = 0; j < n; ++j) {
      const auto a = log_trans_by_dest.row(j);
      double best = kNegInf;
      int arg = 0;
      for (int i = 0; i < n; ++i) {
        const double v = delta(i) + a(i);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      next(j) = best + b(j);
      psi[j] = arg;
    }
    delta.swap(next);
  }

  int state = 0;
  for (int j = 1; j < n; ++j) {
    if (delta(j) > delta(state)) state = j;
  }
  StatePath path;
  path.log_prob = delta(state);
  path.states.resize(len);
  for (std::size_t t = len; t-- > 0;) {
    path.states[t] = state + 1;
    if (t > 0) state = back[t * static_cast<std::size_t>(n) + static_cast<std::size_t>(state)];
  }
  return path;
}

void write_params(std::ostream& out, const HmmParams& params) {
  require_valid(params);
  const auto n = params.n_states();
  out << n << '\n' << std::setprecision(17);
  auto write_row = [&](const auto& row) {
    for (Eigen::Index j = 0; j < row.size(); ++j) out << (j ? " " : "") << row(j);
    out << '\n';
  };
  write_row(params.prior.transpose());
  for (int i = 0; i < n; ++i) write_row(params.transition.row(i));
  for (int i = 0; i < n; ++i) write_row(params.emission.row(i));
}

HmmParams read_params(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 2) throw DataError("model file: expected n_states >= 2 on the first line");
  HmmParams params{Vector(n), Matrix(n, n), Matrix(n, n)};
  auto read = [&](double& v, const char* what) {
    if (!(in >> v)) throw DataError(fmt::format("model file: truncated or malformed {}", what));
  };
  for (int j = 0; j < n; ++j) read(params.prior(j), "prior");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) read(params.transition(i, j), "transition");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) read(params.emission(i, j), "emission");
  if (auto violation = validate(params)) throw DataError("model file: " + *violation);
  return params;
}

}  // namespace lds

#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "lds/errors.hpp"
#include "lds/gaze_sim.hpp"
#include "lds/hmm.hpp"
#include "lds/line_detector.hpp"
#include "oracles.hpp"

using namespace lds;

namespace {

HmmParams uniform_identity(int n) {
  return HmmParams{Vector::Constant(n, 1.0 / n), Matrix::Constant(n, n, 1.0 / n),
                   Matrix::Identity(n, n)};
}

HmmParams two_state(Vector prior, Matrix a, Matrix b) {
  return HmmParams{std::move(prior), std::move(a), std::move(b)};
}

Matrix m2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector v2(double a, double b) { return Vector{{a, b}}; }

}  // namespace

TEST_CASE("validate") {
  CHECK_FALSE(validate(uniform_identity(3)).has_value());

  auto p = uniform_identity(3);
  p.transition.row(1) << 0.5, 0.28, 0.2;
  auto v = validate(p);
  REQUIRE(v.has_value());
  CHECK(v->find("row 2 not stochastic") != std::string::npos);

  p = uniform_identity(3);
  p.prior << -0.1, 0.6, 0.5;
  CHECK(validate(p).has_value());

  p = uniform_identity(3);
  p.emission(0, 0) = std::nan("");
  CHECK(validate(p).has_value());

  CHECK(validate(HmmParams{Vector::Ones(1), Matrix::Ones(1, 1), Matrix::Ones(1, 1)}).has_value());
}

TEST_CASE("forward log-likelihood on closed-form cases") {
  const ObservationSequence ones{1, 1, 1};
  const auto chain = two_state(v2(1, 0), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK(forward_log_likelihood(chain, ones) == doctest::Approx(0.0));

  const auto coin = two_state(v2(0.5, 0.5), m2(0.5, 0.5, 0.5, 0.5), Matrix::Identity(2, 2));
  const ObservationSequence obs{1, 2};
  CHECK(forward_log_likelihood(coin, obs) == doctest::Approx(std::log(0.25)).epsilon(1e-14));

  // Impossible sequence under a deterministic chain.
  const ObservationSequence impossible{1, 2};
  CHECK(std::isinf(forward_log_likelihood(chain, impossible)));
}

TEST_CASE("forward matches exhaustive path enumeration") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = oracle::random_hmm(3, rng);
    const auto obs = oracle::random_obs(3, 5, rng);
    const double expected = oracle::total_probability(p, obs);
    CHECK(std::abs(std::exp(forward_log_likelihood(p, obs)) - expected) < 1e-10);
  }
}

TEST_CASE("forward and viterbi reject bad observations") {
  const auto p = uniform_identity(3);
  const ObservationSequence bad{1, 4};
  CHECK_THROWS_AS(forward_log_likelihood(p, bad), RangeError);
  CHECK_THROWS_AS(viterbi(p, bad), RangeError);
  const ObservationSequence zero{0};
  CHECK_THROWS_AS(viterbi(p, zero), RangeError);
  CHECK_THROWS_AS(forward_log_likelihood(p, ObservationSequence{}), UsageError);
}

TEST_CASE("long sequences stay finite") {
  const int n = 5;
  HmmParams p{Vector::Constant(n, 1.0 / n), Matrix::Constant(n, n, 0.2), Matrix(n, n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) p.emission(i, j) = i == j ? 1.0 - 1e-3 * (n - 1) : 1e-3;
  }
  std::mt19937_64 rng(3);
  const auto obs = oracle::random_obs(n, 10000, rng);
  const double ll = forward_log_likelihood(p, obs);
  CHECK(std::isfinite(ll));
  CHECK(ll < -10000.0);
  const auto path = viterbi(p, obs);
  CHECK(std::isfinite(path.log_prob));
  CHECK(path.states.size() == obs.size());
}

TEST_CASE("viterbi closed-form cases") {
  SUBCASE("noiseless emission reproduces the observations") {
    HmmParams p{Vector::Constant(3, 1.0 / 3), Matrix(3, 3), Matrix::Identity(3, 3)};
    p.transition << 0.8, 0.1, 0.1, 0.1, 0.8, 0.1, 0.1, 0.1, 0.8;
    const ObservationSequence obs{1, 2, 2, 3};
    CHECK(viterbi(p, obs).states == std::vector<int>{1, 2, 2, 3});
  }
  SUBCASE("state unreachable from the prior") {
    const auto p = two_state(v2(1, 0), Matrix::Identity(2, 2), m2(0.9, 0.1, 0.1, 0.9));
    const ObservationSequence obs{2, 1, 1};
    const auto path = viterbi(p, obs);
    CHECK(path.states == std::vector<int>{1, 1, 1});
    CHECK(path.log_prob == doctest::Approx(std::log(0.1 * 0.9 * 0.9)));
  }
  SUBCASE("ties go to the lowest state") {
    const auto p = uniform_identity(3);
    HmmParams flat = p;
    flat.emission = Matrix::Constant(3, 3, 1.0 / 3);
    const ObservationSequence obs{2, 3, 1};
    CHECK(viterbi(flat, obs).states == std::vector<int>{1, 1, 1});
  }
}

TEST_CASE("viterbi matches exhaustive enumeration") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const auto p = oracle::random_hmm(4, rng);
    const auto obs = oracle::random_obs(4, 7, rng);
    const auto path = viterbi(p, obs);
    const double best = oracle::max_path_log_prob(p, obs);
    CHECK(std::abs(path.log_prob - best) <= 1e-12);
    CHECK(std::abs(oracle::path_log_prob(p, obs, path.states) - path.log_prob) <= 1e-12);
  }
}

TEST_CASE("baum_welch leaves a deterministic generator fixed") {
  // Alternating chain 1,2,1,2,... observed without noise.
  const auto p = two_state(v2(1, 0), m2(0, 1, 1, 0), Matrix::Identity(2, 2));
  const std::vector<ObservationSequence> data{{1, 2, 1, 2, 1, 2, 1, 2}};
  const auto [trained, trace] = baum_welch(p, data);
  CHECK(trace.converged);
  CHECK(trace.iterations_run <= 2);
  CHECK((trained.prior - p.prior).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((trained.transition - p.transition).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((trained.emission - p.emission).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("baum_welch keeps rows that receive no expected counts") {
  const auto p = two_state(v2(1, 0), Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  const std::vector<ObservationSequence> data{{1, 1, 1, 1}};
  const auto [trained, trace] = baum_welch(p, data);
  CHECK(trained.transition(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(trained.emission(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(validate(trained).has_value());
}

TEST_CASE("baum_welch improves a perturbed two-state model") {
  std::mt19937_64 rng(21);
  const auto truth = two_state(v2(0.6, 0.4), m2(0.9, 0.1, 0.2, 0.8), m2(0.85, 0.15, 0.25, 0.75));
  std::vector<ObservationSequence> data;
  for (int k = 0; k < 5; ++k) data.push_back(oracle::sample_hmm(truth, 200, rng).second);
  const auto init = two_state(v2(0.5, 0.5), m2(0.7, 0.3, 0.4, 0.6), m2(0.6, 0.4, 0.4, 0.6));
  EmSettings em;
  em.tol = 1e-8;
  const auto [trained, trace] = baum_welch(init, data, em);
  const auto& ll = trace.log_likelihoods;
  CHECK(ll.back() >= ll.front());
  for (std::size_t i = 1; i < ll.size(); ++i) CHECK(ll[i] >= ll[i - 1] - 1e-9);
  CHECK_FALSE(validate(trained).has_value());
}

TEST_CASE("baum_welch output is valid and deterministic for random inputs") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 4;
    const auto init = oracle::random_hmm(n, rng);
    std::vector<ObservationSequence> data;
    for (int k = 0; k < 3; ++k) data.push_back(oracle::random_obs(n, 30 + 10 * k, rng));
    EmSettings em;
    em.max_iters = 25;
    em.threads = 1;
    const auto [a, trace_a] = baum_welch(init, data, em);
    em.threads = 3;
    const auto [b, trace_b] = baum_welch(init, data, em);
    CHECK_FALSE(validate(a).has_value());
    CHECK(a.transition == b.transition);
    CHECK(a.emission == b.emission);
    CHECK(a.prior == b.prior);
    CHECK(trace_a.log_likelihoods == trace_b.log_likelihoods);
  }
}

TEST_CASE("baum_welch argument errors") {
  const auto p = uniform_identity(2);
  CHECK_THROWS_AS(baum_welch(p, std::vector<ObservationSequence>{}), UsageError);
  EmSettings em;
  em.max_iters = 0;
  CHECK_THROWS_AS(baum_welch(p, std::vector<ObservationSequence>{{1}}, em), UsageError);
  CHECK_THROWS_AS(baum_welch(p, std::vector<ObservationSequence>{{3}}), RangeError);
}

TEST_CASE("trained 10-line emission matrix is diagonally dominant") {
  SimConfig sim;
  sim.n_lines = 10;
  sim.n_pages = 40;
  sim.sigma = 0.3;
  sim.seed = 4;
  const auto pages = simulate_corpus(sim);
  std::vector<ObservationSequence> corpus;
  for (const auto& page : pages) corpus.push_back(discretize_page(page.fixations, page.region));
  const auto [trained, trace] = baum_welch(default_initial_params(10), corpus);
  for (int i = 0; i < 10; ++i) {
    Eigen::Index arg = 0;
    trained.emission.row(i).maxCoeff(&arg);
    CHECK(arg == i);
  }
}

TEST_CASE("parameter file round trip") {
  std::mt19937_64 rng(2);
  const auto p = oracle::random_hmm(4, rng);
  std::stringstream buf;
  write_params(buf, p);
  const auto q = read_params(buf);
  CHECK(((p.transition - q.transition).array().abs() <= 1e-15 * p.transition.array().abs()).all());
  CHECK(((p.emission - q.emission).array().abs() <= 1e-15 * p.emission.array().abs()).all());
  CHECK(((p.prior - q.prior).array().abs() <= 1e-15 * p.prior.array().abs()).all());

  std::stringstream truncated("3\n0.5 0.5");
  CHECK_THROWS_AS(read_params(truncated), DataError);
  std::stringstream bad("2\n0.5 0.5\n1 0\n0 0.5\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_params(bad), DataError);
}

#include "lds/gaze_sim.hpp"

#include <cmath>
#include <random>

#include "lds/errors.hpp"

namespace lds {

namespace {

// Stationary AR(1) Gaussian noise with standard deviation `sigma`.
class NoiseProcess {
 public:
  NoiseProcess(double sigma, double corr) : sigma_(sigma), corr_(corr), innovation_(std::sqrt(1 - corr * corr)) {}

  double next(std::mt19937_64& rng) {
    const double w = normal_(rng);
    state_ = started_ ? corr_ * state_ + innovation_ * w : w;
    started_ = true;
    return sigma_ * state_;
  }

 private:
  double sigma_;
  double corr_;
  double innovation_;
  double state_ = 0.0;
  bool started_ = false;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace

void SimConfig::check() const {
  if (!(t_line > 0.0)) throw UsageError("t_line must be positive");
  if (!(t_return >= 0.0) || t_return >= t_line) throw UsageError("t_return must be in [0, t_line)");
  if (!(sample_hz > 0.0)) throw UsageError("sample_hz must be positive");
  if (n_pages < 1) throw UsageError("n_pages must be positive");
  if (n_lines < 1) throw UsageError("n_lines must be positive");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw UsageError("sigma must be non-negative");
  if (!(noise_corr >= 0.0 && noise_corr < 1.0)) throw UsageError("noise_corr must be in [0, 1)");
  if (!(line_length > 0.0)) throw UsageError("line_length must be positive");
  if (repetition == Repetition::random && (repeat_min < 1 || repeat_min > repeat_max)) {
    throw UsageError("repetition bounds need 1 <= min <= max");
  }
  if (std::llround(t_line * sample_hz) < 1) throw UsageError("t_line * sample_hz below one sample");
}

SurveillanceRegion SimConfig::region() const {
  return SurveillanceRegion{0.0, static_cast<double>(n_lines), 0.0, line_length, n_lines};
}

int samples_per_line(const SimConfig& config) {
  return static_cast<int>(std::llround(config.t_line * config.sample_hz));
}

std::int64_t samples_per_page(const SimConfig& config) {
  config.check();
  const double per_page = static_cast<double>(samples_per_line(config)) * config.n_lines;
  if (config.repetition == Repetition::none) return static_cast<std::int64_t>(per_page);
  return std::llround(per_page * (config.repeat_min + config.repeat_max) / 2.0);
}

LabeledPage simulate_page(const SimConfig& config, int page_index) {
  config.check();
  std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(page_index));

  std::vector<int> visits;
  for (int line = 1; line <= config.n_lines; ++line) {
    int reads = 1;
    if (config.repetition == Repetition::random) {
      reads = std::uniform_int_distribution<int>(config.repeat_min, config.repeat_max)(rng);
    }
    visits.insert(visits.end(), static_cast<std::size_t>(reads), line);
  }

  const int per_line = samples_per_line(config);
  const int sweep = static_cast<int>(std::min<long long>(std::llround(config.t_return * config.sample_hz), per_line - 1));
  const auto region = config.region();
  const auto centers = line_centers(region);
  const double spacing = region.line_spacing();
  NoiseProcess noise_x(config.sigma * spacing, config.noise_corr);
  NoiseProcess noise_y(config.sigma * spacing, config.noise_corr);

  LabeledPage page;
  page.region = region;
  page.fixations.reserve(visits.size() * static_cast<std::size_t>(per_line));
  page.labels.reserve(page.fixations.capacity());
  std::size_t sample = 0;
  for (std::size_t v = 0; v < visits.size(); ++v) {
    const int line = visits[v];
    // Every line after the first opens with the return sweep from the right
    // margin; gaze height is already on the upcoming line.
    const int sweep_len = v == 0 ? 0 : sweep;
    for (int k = 0; k < per_line; ++k, ++sample) {
      double x;
      if (k < sweep_len) {
        x = region.x_right - region.width() * (k + 1) / sweep_len;
      } else {
        const int reading = per_line - sweep_len;
        x = region.x_left + region.width() * (reading > 1 ? double(k - sweep_len) / (reading - 1) : 0.0);
      }
      Fixation f;
      f.t = static_cast<double>(sample) / config.sample_hz;
      f.x = x + noise_x.next(rng);
      f.y = centers[line - 1] + noise_y.next(rng);
      page.fixations.push_back(f);
      page.labels.push_back(line);
    }
  }
  return page;
}

std::vector<LabeledPage> simulate_corpus(const SimConfig& config) {
  config.check();
  std::vector<LabeledPage> pages;
  pages.reserve(static_cast<std::size_t>(config.n_pages));
  for (int p = 0; p < config.n_pages; ++p) pages.push_back(simulate_page(config, p));
  return pages;
}

std::pair<std::span<const LabeledPage>, std::span<const LabeledPage>> split_corpus(
    std::span<const LabeledPage> pages, std::size_t n_train) {
  if (n_train > pages.size()) throw UsageError("split_corpus: more training pages than pages");
  return {pages.first(n_train), pages.subspan(n_train)};
}

}  // namespace lds

#include "lds/discretizer.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "lds/errors.hpp"

namespace lds {

namespace {

int nearest_line(double y, const SurveillanceRegion& region, std::span<const double> centers) {
  if (!std::isfinite(y)) throw DataError("non-finite fixation coordinate");
  const int n = region.n_lines;
  const double rel = std::ceil((y - region.y_top) / region.line_spacing());
  const int guess = static_cast<int>(std::clamp(rel, 1.0, static_cast<double>(n)));
  // The guess can be off by one next to a boundary; settle it on distances.
  int best = std::max(1, guess - 1);
  for (int j = best + 1; j <= std::min(n, guess + 1); ++j) {
    if (std::abs(y - centers[j - 1]) < std::abs(y - centers[best - 1])) best = j;
  }
  return best;
}

// Keeps coordinates within k standard deviations of their mean.
std::vector<double> clean(std::vector<double> values, double k_sigma) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double limit = k_sigma * std::sqrt(ss / n);
  std::erase_if(values, [&](double v) { return std::abs(v - mean) > limit; });
  return values;
}

std::pair<double, double> extreme_means(std::vector<double> values, int batch, const char* axis) {
  const auto b = static_cast<std::size_t>(batch);
  if (values.size() < 2 * b) {
    throw InsufficientDataError(fmt::format(
        "estimate_region: {} {}-coordinates survive cleaning, need at least {}", values.size(),
        axis, 2 * b));
  }
  std::sort(values.begin(), values.end());
  const double low = std::accumulate(values.begin(), values.begin() + batch, 0.0) / batch;
  const double high = std::accumulate(values.end() - batch, values.end(), 0.0) / batch;
  return {low, high};
}

}  // namespace

void check_region(const SurveillanceRegion& region) {
  if (region.n_lines < 1) throw UsageError("region needs at least one line");
  if (!(region.y_bottom > region.y_top)) throw UsageError("region needs y_bottom > y_top");
  if (!std::isfinite(region.y_top) || !std::isfinite(region.y_bottom)) {
    throw UsageError("region bounds must be finite");
  }
}

std::vector<double> line_centers(const SurveillanceRegion& region) {
  check_region(region);
  std::vector<double> centers(static_cast<std::size_t>(region.n_lines));
  const double spacing = region.line_spacing();
  for (int j = 1; j <= region.n_lines; ++j) centers[j - 1] = region.y_top + (j - 0.5) * spacing;
  return centers;
}

int discretize(const Fixation& fix, const SurveillanceRegion& region) {
  const auto centers = line_centers(region);
  return nearest_line(fix.y, region, centers);
}

ObservationSequence discretize_page(std::span<const Fixation> fixes,
                                    const SurveillanceRegion& region) {
  if (fixes.empty()) throw UsageError("discretize_page: no fixations");
  const auto centers = line_centers(region);
  ObservationSequence obs;
  obs.reserve(fixes.size());
  for (const auto& f : fixes) obs.push_back(nearest_line(f.y, region, centers));
  return obs;
}

SurveillanceRegion estimate_region(std::span<const Fixation> fixes, int n_lines,
                                   const RegionEstimateOptions& options) {
  if (n_lines < 1) throw UsageError("estimate_region: n_lines must be positive");
  if (options.batch < 1) throw UsageError("estimate_region: batch must be positive");
  if (!(options.k_sigma > 0.0)) throw UsageError("estimate_region: k_sigma must be positive");
  if (fixes.size() < 2 * static_cast<std::size_t>(options.batch)) {
    throw InsufficientDataError(fmt::format("estimate_region: {} fixations, need at least {}",
                                            fixes.size(), 2 * options.batch));
  }
  std::vector<double> ys;
  std::vector<double> xs;
  ys.reserve(fixes.size());
  xs.reserve(fixes.size());
  for (const auto& f : fixes) {
    if (!std::isfinite(f.x) || !std::isfinite(f.y)) {
      throw DataError("estimate_region: non-finite fixation coordinate");
    }
    ys.push_back(f.y);
    xs.push_back(f.x);
  }

  const auto [top, bottom] = extreme_means(clean(std::move(ys), options.k_sigma), options.batch, "y");
  const auto [left, right] = extreme_means(clean(std::move(xs), options.k_sigma), options.batch, "x");
  if (!(bottom > top)) {
    throw InsufficientDataError("estimate_region: fixations span zero height");
  }
  return SurveillanceRegion{top, bottom, left, right, n_lines};
}

}  // namespace lds

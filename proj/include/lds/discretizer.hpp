#pragma once

#include <span>
#include <vector>

#include "lds/hmm.hpp"

namespace lds {

/// One gaze sample. Screen coordinates grow rightwards and downwards.
struct Fixation {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

/// Rectangle holding the text block, with `n_lines` evenly spaced lines.
struct SurveillanceRegion {
  double y_top = 0.0;
  double y_bottom = 1.0;
  double x_left = 0.0;
  double x_right = 1.0;
  int n_lines = 1;

  double height() const { return y_bottom - y_top; }
  double width() const { return x_right - x_left; }
  double line_spacing() const { return height() / n_lines; }
};

/// Throws UsageError unless y_bottom > y_top and n_lines >= 1.
void check_region(const SurveillanceRegion& region);

/// y_j = y_top + (j - 0.5) * L_y / N_l for j = 1..N_l.
std::vector<double> line_centers(const SurveillanceRegion& region);

/// Line number (1-based) whose centre is nearest to `fix.y`; a point exactly
/// half-way between two centres goes to the upper (lower-numbered) line, and
/// points beyond the region clamp to the first or last line.
int discretize(const Fixation& fix, const SurveillanceRegion& region);

ObservationSequence discretize_page(std::span<const Fixation> fixes,
                                    const SurveillanceRegion& region);

struct RegionEstimateOptions {
  double k_sigma = 1.9;  // cleaning threshold in standard deviations
  int batch = 10;        // extreme points averaged for each bound
};

/// Estimates the text block from the gaze data alone: one pass discards points
/// further than k_sigma standard deviations from the mean (y and x cleaned
/// independently), then each bound is the mean of the `batch` most extreme
/// surviving coordinates. Throws InsufficientDataError when fewer than
/// 2 * batch points survive or the estimate has zero extent.
SurveillanceRegion estimate_region(std::span<const Fixation> fixes, int n_lines,
                                   const RegionEstimateOptions& options = {});

}  // namespace lds

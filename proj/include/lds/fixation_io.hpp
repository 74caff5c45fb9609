#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "lds/discretizer.hpp"
#include "lds/gaze_sim.hpp"

namespace lds {

enum class NonFinitePolicy { reject, drop };

// Gazepoint-style trackers report coordinates as fractions of the screen.
enum class CoordinateUnits { native, normalized };

struct CsvOptions {
  NonFinitePolicy non_finite = NonFinitePolicy::reject;
  CoordinateUnits units = CoordinateUnits::native;
  double screen_width = 1920.0;   // used when units == normalized
  double screen_height = 1080.0;
};

/// Parsed `t,x,y[,label]` log. `labels` is empty when the file has no label
/// column.
struct FixationLog {
  std::vector<Fixation> fixations;
  std::vector<int> labels;
  std::optional<double> sample_hz;  // from the timestamp span, if it is positive
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;

  bool has_labels() const { return !labels.empty(); }
};

FixationLog parse_fixation_csv(std::istream& in, const CsvOptions& options = {});
FixationLog parse_fixation_csv(const std::filesystem::path& path, const CsvOptions& options = {});

void write_fixation_csv(std::ostream& out, std::span<const Fixation> fixations,
                        std::span<const int> labels = {});

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& body);

/// Expands directories into their *.csv files (sorted); files pass through.
std::vector<std::filesystem::path> collect_csv_inputs(std::span<const std::filesystem::path> inputs);

}  // namespace lds

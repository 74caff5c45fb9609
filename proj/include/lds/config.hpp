#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "lds/discretizer.hpp"
#include "lds/experiment.hpp"
#include "lds/fixation_io.hpp"
#include "lds/gaze_sim.hpp"
#include "lds/hmm.hpp"
#include "lds/line_detector.hpp"

namespace lds {

/// Everything a CLI run can be configured with. Defaults reproduce the
/// published simulation setup.
struct RunConfig {
  SimConfig sim;
  EmSettings em;
  InitialGuess guess;
  std::vector<double> noise_levels = table_noise_levels();
  int train_pages = 40;
  int test_pages = 10;
  CsvOptions csv;
  RegionEstimateOptions region_estimate;
  std::uint64_t seed = 0;
};

/// Parses a JSON config document. Unknown keys and wrong types raise
/// UsageError naming the offending key.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lds

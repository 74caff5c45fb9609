#include "lds/fixation_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "lds/errors.hpp"

namespace lds {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  for (;;) {
    const auto comma = line.find(',');
    fields.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

double parse_real(std::string_view field, std::size_t line_no, const char* column) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw DataError(fmt::format("line {}: invalid {} value '{}'", line_no, column, field));
  }
  return value;
}

int parse_label(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || value < 1) {
    throw DataError(fmt::format("line {}: invalid label '{}'", line_no, field));
  }
  return value;
}

}  // namespace

FixationLog parse_fixation_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  bool with_labels = false;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto header = split_fields(text);
    if (header.size() >= 3 && header[0] == "t" && header[1] == "x" && header[2] == "y" &&
        (header.size() == 3 || (header.size() == 4 && header[3] == "label"))) {
      with_labels = header.size() == 4;
      have_header = true;
    }
    break;
  }
  if (!have_header) throw DataError("missing header: expected 't,x,y' or 't,x,y,label'");

  const double x_scale = options.units == CoordinateUnits::normalized ? options.screen_width : 1.0;
  const double y_scale = options.units == CoordinateUnits::normalized ? options.screen_height : 1.0;
  const std::size_t columns = with_labels ? 4 : 3;

  FixationLog log;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto fields = split_fields(text);
    if (fields.size() != columns) {
      throw DataError(
          fmt::format("line {}: expected {} fields, found {}", line_no, columns, fields.size()));
    }
    ++log.rows_read;
    Fixation f{parse_real(fields[0], line_no, "t"), parse_real(fields[1], line_no, "x"),
               parse_real(fields[2], line_no, "y")};
    if (!std::isfinite(f.t) || !std::isfinite(f.x) || !std::isfinite(f.y)) {
      if (options.non_finite == NonFinitePolicy::drop) {
        ++log.rows_dropped;
        continue;
      }
      throw DataError(fmt::format("line {}: non-finite value", line_no));
    }
    if (!log.fixations.empty() && f.t < log.fixations.back().t) {
      throw DataError(fmt::format("line {}: timestamp decreases", line_no));
    }
    f.x *= x_scale;
    f.y *= y_scale;
    log.fixations.push_back(f);
    if (with_labels) log.labels.push_back(parse_label(fields[3], line_no));
  }

  if (log.fixations.size() >= 2) {
    const double span = log.fixations.back().t - log.fixations.front().t;
    if (span > 0.0) log.sample_hz = static_cast<double>(log.fixations.size() - 1) / span;
  }
  return log;
}

FixationLog parse_fixation_csv(const fs::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("{}: cannot open", path.string()));
  try {
    return parse_fixation_csv(in, options);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_fixation_csv(std::ostream& out, std::span<const Fixation> fixations,
                        std::span<const int> labels) {
  const bool with_labels = !labels.empty();
  if (with_labels && labels.size() != fixations.size()) {
    throw UsageError("write_fixation_csv: label count differs from fixation count");
  }
  out << (with_labels ? "t,x,y,label\n" : "t,x,y\n");
  for (std::size_t i = 0; i < fixations.size(); ++i) {
    const auto& f = fixations[i];
    if (with_labels) {
      out << fmt::format("{},{},{},{}\n", f.t, f.x, f.y, labels[i]);
    } else {
      out << fmt::format("{},{},{}\n", f.t, f.x, f.y);
    }
  }
}

void write_file_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(fmt::format("{}: cannot open for writing", tmp.string()));
    body(out);
    out.flush();
    if (!out) throw DataError(fmt::format("{}: write failed", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError(fmt::format("{}: {}", path.string(), ec.message()));
  }
}

std::vector<fs::path> collect_csv_inputs(std::span<const fs::path> inputs) {
  std::vector<fs::path> files;
  for (const auto& input : inputs) {
    if (fs::is_directory(input)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(input)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::exists(input)) {
      files.push_back(input);
    } else {
      throw DataError(fmt::format("{}: no such file or directory", input.string()));
    }
  }
  return files;
}

}  // namespace lds

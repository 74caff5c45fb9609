#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "lds/config.hpp"
#include "lds/errors.hpp"
#include "lds/fixation_io.hpp"
#include "lds/gaze_sim.hpp"

using namespace lds;
namespace fs = std::filesystem;

namespace {

FixationLog parse(const std::string& text, const CsvOptions& opts = {}) {
  std::istringstream in(text);
  return parse_fixation_csv(in, opts);
}

std::string error_of(const std::string& text, const CsvOptions& opts = {}) {
  try {
    parse(text, opts);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parses a minimal log") {
  const auto log = parse("t,x,y\n0.000,0.1,0.2\n0.016,0.11,0.21\n");
  REQUIRE(log.fixations.size() == 2);
  CHECK(log.rows_read == 2);
  CHECK_FALSE(log.has_labels());
  CHECK(log.fixations[1].t == 0.016);
  CHECK(log.fixations[1].x == 0.11);
  CHECK(log.fixations[1].y == 0.21);
  REQUIRE(log.sample_hz.has_value());
  CHECK(*log.sample_hz == doctest::Approx(62.5));
}

TEST_CASE("label column, CRLF and blank lines") {
  const auto log = parse("t, x, y, label\r\n0,1,2,1\r\n\r\n0.5,1,2.5,25\r\n");
  REQUIRE(log.has_labels());
  CHECK(log.labels == std::vector<int>{1, 25});
}

TEST_CASE("malformed input reports the line") {
  CHECK(error_of("t,x,y\n0.000,0.1,0.2\n0.032,abc,0.2\n").find("line 3") != std::string::npos);
  CHECK(error_of("0,1,2\n").find("missing header") != std::string::npos);
  CHECK(error_of("").find("missing header") != std::string::npos);
  CHECK(error_of("t,x,y\n0,1\n").find("line 2") != std::string::npos);
  CHECK(error_of("t,x,y,label\n0,1,2,0\n").find("label") != std::string::npos);
  CHECK(error_of("t,x,y\n1,1,1\n0.5,1,1\n").find("timestamp") != std::string::npos);
}

TEST_CASE("non-finite rows are rejected or dropped") {
  const std::string text = "t,x,y\n0,1,2\n0.1,nan,2\n0.2,1,inf\n0.3,1,2\n";
  CHECK(error_of(text).find("line 3") != std::string::npos);
  CsvOptions drop;
  drop.non_finite = NonFinitePolicy::drop;
  const auto log = parse(text, drop);
  CHECK(log.fixations.size() == 2);
  CHECK(log.rows_read == 4);
  CHECK(log.rows_dropped == 2);
}

TEST_CASE("normalized coordinates scale to the screen") {
  CsvOptions opts;
  opts.units = CoordinateUnits::normalized;
  const auto log = parse("t,x,y\n0,0.5,0.25\n", opts);
  CHECK(log.fixations[0].x == 960.0);
  CHECK(log.fixations[0].y == 270.0);
}

TEST_CASE("export then parse reproduces the values") {
  SimConfig sim;
  sim.sigma = 0.37;
  sim.seed = 61;
  sim.repetition = Repetition::random;
  for (int p = 0; p < 3; ++p) {
    const auto page = simulate_page(sim, p);
    std::stringstream buf;
    write_fixation_csv(buf, page.fixations, page.labels);
    const auto log = parse_fixation_csv(buf);
    REQUIRE(log.fixations.size() == page.fixations.size());
    CHECK(log.labels == page.labels);
    for (std::size_t i = 0; i < log.fixations.size(); ++i) {
      CHECK(std::abs(log.fixations[i].y - page.fixations[i].y) <= 1e-12 * std::abs(page.fixations[i].y));
      CHECK(std::abs(log.fixations[i].x - page.fixations[i].x) <= 1e-12 * std::abs(page.fixations[i].x));
      CHECK(std::abs(log.fixations[i].t - page.fixations[i].t) <= 1e-12 * std::abs(page.fixations[i].t));
    }
  }
}

TEST_CASE("files: missing paths, directories and atomic writes") {
  const auto dir = fs::temp_directory_path() / "lds_test_io";
  fs::remove_all(dir);
  CHECK_THROWS_AS(parse_fixation_csv(dir / "nope.csv"), DataError);

  write_file_atomically(dir / "b.csv", [](std::ostream& out) { out << "t,x,y\n0,0,0\n"; });
  write_file_atomically(dir / "a.csv", [](std::ostream& out) { out << "t,x,y\n0,0,1\n"; });
  write_file_atomically(dir / "notes.txt", [](std::ostream& out) { out << "x"; });
  CHECK_FALSE(fs::exists(dir / "a.csv.tmp"));
  const std::vector<fs::path> inputs{dir};
  const auto files = collect_csv_inputs(inputs);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "a.csv");
  CHECK(parse_fixation_csv(files[0]).fixations[0].y == 1.0);

  const std::vector<fs::path> missing{dir / "gone"};
  CHECK_THROWS_AS(collect_csv_inputs(missing), DataError);

  std::ofstream(dir / "bad.csv") << "t,x,y\n0,x,0\n";
  try {
    parse_fixation_csv(dir / "bad.csv");
    FAIL("expected a parse error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad.csv") != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"({
    "seed": 7,
    "simulation": {"sigma": 0.46, "lines": 10, "repetition": "random"},
    "em": {"max_iters": 50, "tol": 1e-3},
    "experiment": {"noise_levels": [0.3, 0.2], "train_pages": 20},
    "input": {"coordinates": "normalized", "non_finite": "drop", "batch": 5}
  })");
  CHECK(cfg.seed == 7);
  CHECK(cfg.sim.sigma == 0.46);
  CHECK(cfg.sim.n_lines == 10);
  CHECK(cfg.sim.repetition == Repetition::random);
  CHECK(cfg.em.max_iters == 50);
  CHECK(cfg.noise_levels == std::vector<double>{0.3, 0.2});
  CHECK(cfg.train_pages == 20);
  CHECK(cfg.test_pages == 10);
  CHECK(cfg.csv.units == CoordinateUnits::normalized);
  CHECK(cfg.csv.non_finite == NonFinitePolicy::drop);
  CHECK(cfg.region_estimate.batch == 5);

  CHECK_THROWS_AS(parse_config(R"({"simulation": {"sigmaa": 1}})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"em": {"tol": "small"}})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"simulation": {"sigma": -1}})"), UsageError);
  CHECK_THROWS_AS(parse_config("{"), UsageError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), UsageError);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pairsim/cli.hpp"
#include "pairsim/config.hpp"
#include "pairsim/csv.hpp"

using namespace pairsim;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "pairsim");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pairsim_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("tune") {
  const auto r = run({"tune"});
  REQUIRE(r.code == cli::kSuccess);
  const auto t = csv::parse(r.out);
  CHECK(t.rows.size() == 10);
  CHECK(t.number(0, "T_C") == 140.0);
  CHECK(contains(r.err, "tuning coefficient"));

  const auto one = run({"tune", "--temp-range", "142"});
  REQUIRE(one.code == cli::kSuccess);
  const auto single = csv::parse(one.out);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.number(0, "lambda_s_nm") == doctest::Approx(808.0).epsilon(1e-5));

  CHECK(run({"tune", "--temp-range", "185:140:5"}).code == cli::kConfigError);
  CHECK(run({"tune", "--set", "phase_matching.signal_bracket_nm=760,770"}).code ==
        cli::kNumericalError);
}

TEST_CASE("spectrum") {
  const auto r = run({"spectrum"});
  REQUIRE(r.code == cli::kSuccess);
  const auto t = csv::parse(r.out);
  CHECK(t.rows.size() == 121);
  double peak = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) peak = std::max(peak, t.number(i, "rel_eff"));
  CHECK(peak == 1.0);
  CHECK(contains(r.err, "FWHM (idler): 1.30"));

  const auto longer = run({"spectrum", "--set", "crystal.length_mm=40", "--out",
                           scratch("spectrum").string()});
  REQUIRE(longer.code == cli::kSuccess);
  CHECK(contains(longer.out, "FWHM (idler): 0.65"));
}

TEST_CASE("budget") {
  const auto r = run({"budget"});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(contains(r.err, "3.06%"));
  CHECK(contains(r.err, "mode matching: 36.0%"));
  CHECK(contains(r.err, "130719"));
  CHECK(contains(r.err, "93333.3"));
  const auto t = csv::parse(r.out);
  CHECK(t.number(2, "cumulative") == doctest::Approx(0.0306));

  const auto empty = run({"budget", "--set", "source.conditional_chain="});
  REQUIRE(empty.code == cli::kSuccess);
  CHECK(contains(empty.err, "100.00%"));
}

TEST_CASE("detector curve") {
  const auto r = run({"detector-curve"});
  REQUIRE(r.code == cli::kSuccess);
  const auto t = csv::parse(r.out);
  CHECK(t.rows.size() == 36);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    CHECK(t.number(i, "qe") >= t.number(i - 1, "qe"));
    CHECK(t.rows[i][t.column("dark_prob_per_gate")] == t.rows[0][t.column("dark_prob_per_gate")]);
  }
  bool found = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (std::abs(t.number(i, "overbias_V") - 3.7) < 1e-9) {
      CHECK(t.number(i, "qe") == 0.2);
      found = true;
    }
  CHECK(found);

  const auto wide = run({"detector", "--overbias-range", "0:5:0.5"});
  REQUIRE(wide.code == cli::kSuccess);
  const auto w = csv::parse(wide.out);
  CHECK(w.rows.front()[w.column("clamped")] == "1");
  CHECK(w.rows.back()[w.column("clamped")] == "1");
  CHECK(w.rows[4][w.column("clamped")] == "0");
  CHECK(contains(wide.err, "clamped"));
}

TEST_CASE("simulate") {
  CHECK(run({"simulate"}).code == cli::kConfigError);
  CHECK(run({"simulate", "--seed", "-1"}).code == cli::kConfigError);

  const auto dir = scratch("simulate");
  const auto a = run({"simulate", "--seed", "1", "--out", (dir / "a").string()});
  const auto b = run({"simulate", "--seed", "1", "--out", (dir / "b").string()});
  REQUIRE(a.code == cli::kSuccess);
  REQUIRE(b.code == cli::kSuccess);
  const auto csv_a = slurp(dir / "a" / "histogram.csv");
  CHECK(!csv_a.empty());
  CHECK(csv_a == slurp(dir / "b" / "histogram.csv"));
  CHECK(slurp(dir / "a" / "simulate_summary.txt") == slurp(dir / "b" / "simulate_summary.txt"));
  CHECK(csv_a.find('\r') == std::string::npos);

  const auto t = csv::parse(csv_a);
  double eta = 0.0;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    eta += t.number(i, "conditional_prob") - t.number(i, "accidental_level");
  CHECK(eta >= 0.0290);
  CHECK(eta <= 0.0322);

  const auto analytic = run({"simulate", "--analytic"});
  REQUIRE(analytic.code == cli::kSuccess);
  const auto h = csv::parse(analytic.out);
  for (std::size_t i = 0; i < h.rows.size(); ++i)
    CHECK(h.rows[i][h.column("conditional_prob")] == h.rows[i][h.column("expected_prob")]);
  CHECK(contains(analytic.err, "mode = analytic"));
}

TEST_CASE("repro writes a passing manifest") {
  const auto dir = scratch("repro");
  CHECK(run({"repro"}).code == cli::kConfigError);
  const auto r = run({"repro", "--seed", "1", "--out", dir.string()});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(contains(r.out, "all figures within tolerance"));
  for (const char* f : {"tuning_curve.csv", "pm_spectrum.csv", "budget.csv", "detector_curve.csv",
                        "histogram.csv", "simulate_summary.txt", "manifest.csv"})
    CHECK(fs::exists(dir / f));
  const auto m = csv::parse(slurp(dir / "manifest.csv"));
  CHECK(m.rows.size() >= 10);
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    CAPTURE(m.rows[i][0]);
    CHECK(m.rows[i][m.column("pass")] == "1");
  }
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == cli::kConfigError);
  CHECK(run({"bogus"}).code == cli::kConfigError);
  CHECK(run({"tune", "--config", "/nonexistent/run.ini"}).code == cli::kConfigError);
  CHECK(run({"tune", "--set", "nonsense"}).code == cli::kConfigError);
  CHECK(run({"simulate", "--seed", "1", "--triggers", "0"}).code == cli::kConfigError);
  CHECK(run({"--help"}).code == cli::kSuccess);
}

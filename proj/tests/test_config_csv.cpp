#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pairsim/config.hpp"
#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"

using namespace pairsim;

namespace {

const auto kShipped = config::shipped_data_dir() / "operating_point.ini";

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pairsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("number formatting") {
  CHECK(csv::format_number(0.0) == "0");
  CHECK(csv::format_number(142.0) == "142");
  CHECK(csv::format_number(0.0306) == "0.0306");
  CHECK(csv::format_number(1558.30663) == "1558.31");
  CHECK(csv::format_number(1.1e-4) == "1.10000e-04");
  CHECK(csv::format_number(-2.5e-5) == "-2.50000e-05");
  CHECK(csv::format_number(1e-3) == "0.001");
  CHECK(csv::format_number(1.23456789e7) == "1.23457e+07");
}

TEST_CASE("printed numbers round-trip to full printed precision") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> mantissa(-10.0, 10.0);
  std::uniform_int_distribution<int> exponent(-12, 12);
  for (int i = 0; i < 5000; ++i) {
    const double x = mantissa(rng) * std::pow(10.0, exponent(rng));
    const std::string printed = csv::format_number(x);
    const double back = csv::parse_number(printed);
    CHECK(csv::format_number(back) == printed);
    CHECK(std::abs(back - x) <= 5e-6 * std::abs(x) + 1e-300);
  }
}

TEST_CASE("CSV tables") {
  std::ostringstream out;
  csv::Writer w(out);
  w.header({"name", "value", "flag"});
  w.row("a", 0.5, true);
  w.row("b", 2e-5, false);
  const auto t = csv::parse("# comment\n" + out.str());
  REQUIRE(t.rows.size() == 2);
  CHECK(t.column("flag") == 2);
  CHECK(t.number(1, "value") == 2e-5);
  CHECK(t.rows[0][2] == "1");
  CHECK_THROWS_AS(t.column("missing"), ConfigError);
  CHECK_THROWS_AS(csv::parse_number("1.5x"), ConfigError);
  CHECK_THROWS_AS(csv::parse_number(""), ConfigError);
}

TEST_CASE("shipped configuration loads") {
  const auto rc = config::load_run_config(kShipped);
  CHECK(rc.dispersion.name == "congruent-LiNbO3-ne-jundt1997");
  CHECK(rc.raw_poling_period_um == 21.6);
  REQUIRE(rc.calibration.has_value());
  CHECK(rc.crystal.poling_period_um == doctest::Approx(21.577077).epsilon(1e-6));
  CHECK(rc.crystal.qpm_order == 3);
  CHECK(rc.phase_matching.tune_lo_C == 140.0);
  CHECK(rc.phase_matching.tune_hi_C == 185.0);
  CHECK(source::chain_efficiency(rc.source.conditional_chain) == doctest::Approx(0.0306));
  CHECK(rc.experiment.fiber_delay_ns == doctest::Approx(342.770464).epsilon(1e-8));
  CHECK(rc.apd.qe_curve.size() == 9);
  CHECK(rc.apd.afterpulse.trap_lifetime_us == 1.5);
  CHECK(rc.spcm.efficiency == 0.54);
  CHECK(rc.overbias_V == 3.7);
  CHECK(rc.overbias_sweep.step == doctest::Approx(0.1));
  CHECK_FALSE(rc.seed.has_value());
}

TEST_CASE("overrides win over the file") {
  const auto rc = config::load_run_config(
      kShipped, {{"crystal.length_mm", "40"}, {"run.seed", "77"}, {"apd.jitter_sigma_ns", "0.5"},
                 {"experiment.idler_chain", "x:0.5"}});
  CHECK(rc.crystal.length_mm == 40.0);
  CHECK(rc.seed == 77u);
  CHECK(rc.apd.jitter_sigma_ns == 0.5);
  CHECK(source::chain_efficiency(rc.experiment.idler_chain) == 0.5);

  CHECK_THROWS_AS(config::load_run_config(kShipped, {{"nosection", "1"}}), ConfigError);
  CHECK_THROWS_AS(config::load_run_config(kShipped, {{"run.seed", "-3"}}), ConfigError);
  CHECK_THROWS_AS(config::load_run_config(kShipped, {{"crystal.qpm_order", "2"}}), ConfigError);
  CHECK_THROWS_AS(config::load_run_config(kShipped, {{"experiment.bin_width_ns", "3"}}),
                  ConfigError);
}

TEST_CASE("model paths resolve relative to the config") {
  const auto dir = scratch_dir("relative");
  std::filesystem::create_directories(dir / "models");
  std::filesystem::copy_file(config::shipped_data_dir() / "ln_congruent_jundt1997.sellmeier",
                             dir / "models" / "ln.sellmeier");
  write_file(dir / "run.ini", "[run]\ndispersion_model = models/ln.sellmeier\n");
  const auto rc = config::load_run_config(dir / "run.ini");
  CHECK(rc.dispersion_path == dir / "models" / "ln.sellmeier");
  CHECK(rc.apd.qe_curve.size() == detector::default_ingaas_apd().qe_curve.size());

  write_file(dir / "broken.ini", "[run]\ndispersion_model = nowhere.sellmeier\n");
  CHECK_THROWS_AS(config::load_run_config(dir / "broken.ini"), ConfigError);
  CHECK_THROWS_AS(config::load_run_config(dir / "absent.ini"), ConfigError);
  write_file(dir / "garbled.ini", "[run\nfoo\n");
  CHECK_THROWS_AS(config::load_run_config(dir / "garbled.ini"), ConfigError);
}

TEST_CASE("chain and range parsing") {
  const auto c = config::parse_chain("a:0.5, b : 0.25");
  CHECK(c.stages().size() == 2);
  CHECK(source::chain_efficiency(c) == 0.125);
  CHECK(config::parse_chain("").empty());
  CHECK_THROWS_AS(config::parse_chain("a=0.5"), ConfigError);
  CHECK_THROWS_AS(config::parse_chain("a:0.5, a:0.4"), ConfigError);
  CHECK_THROWS_AS(config::parse_chain("a:1.5"), ConfigError);

  const auto r = config::parse_range("140:185:5");
  CHECK(r.lo == 140.0);
  CHECK(r.hi == 185.0);
  CHECK(r.step == 5.0);
  const auto single = config::parse_range("142");
  CHECK(single.lo == single.hi);
  CHECK_THROWS_AS(config::parse_range("185:140:5"), ConfigError);
  CHECK_THROWS_AS(config::parse_range("140:185:0"), ConfigError);
  CHECK_THROWS_AS(config::parse_range("140:185"), ConfigError);
  CHECK_THROWS_AS(config::parse_range("a:b:c"), ConfigError);
}

TEST_CASE("detector model files") {
  const auto m = config::parse_apd_model(
      "qe_knots = 1:0.1, 2:0.3\ndark_prob_per_gate = 2e-3\n[afterpulse]\namplitude = 0.1\n");
  CHECK(m.qe_curve.size() == 2);
  CHECK(detector::qe_at_overbias(m, 1.5).efficiency == doctest::Approx(0.2));
  CHECK(m.dark_prob_per_gate == 2e-3);
  CHECK(m.afterpulse.amplitude == 0.1);
  CHECK(m.gate_length_ns == 20.0);

  CHECK_THROWS_AS(config::parse_apd_model("dark_prob_per_gate = 1e-3\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_apd_model("qe_knots = 2:0.3, 1:0.1\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_apd_model("qe_knots = 1:0.1\ngate_length_ns = -1\n"), ConfigError);

  const auto shipped = config::load_apd_model(config::shipped_data_dir() / "ingaas_apd_m50C.detector");
  CHECK(detector::qe_at_overbias(shipped, 3.7).efficiency == 0.2);
}

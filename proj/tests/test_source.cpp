#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/source.hpp"

using namespace pairsim;
using namespace pairsim::source;

namespace {

LossChain measured_conditional() {
  return LossChain({{"apd_qe", 0.20}, {"propagation", 0.85}, {"coupling_and_matching", 0.18}});
}

LossChain random_chain(std::mt19937_64& rng, int n, const std::string& prefix) {
  std::uniform_real_distribution<double> eta(0.0, 1.0);
  LossChain c;
  for (int i = 0; i < n; ++i) c.add(prefix + std::to_string(i), eta(rng));
  return c;
}

}  // namespace

TEST_CASE("chain efficiency") {
  CHECK(chain_efficiency(measured_conditional()) == doctest::Approx(0.0306).epsilon(1e-12));
  CHECK(chain_efficiency(LossChain{}) == 1.0);
  CHECK(chain_efficiency(LossChain({{"a", 0.5}, {"dead", 0.0}, {"b", 0.9}})) == 0.0);
}

TEST_CASE("loss chain invariants") {
  LossChain c;
  c.add("a", 0.5);
  CHECK_THROWS_AS(c.add("a", 0.4), ConfigError);
  CHECK_THROWS_AS(c.add("b", 1.01), ConfigError);
  CHECK_THROWS_AS(c.add("c", -0.1), ConfigError);
  CHECK(c.stages().size() == 1);
}

TEST_CASE("chain efficiency is permutation invariant and multiplicative") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_chain(rng, 1 + trial % 6, "a");
    auto b = random_chain(rng, 1 + trial % 4, "b");
    auto stages = a.stages();
    std::shuffle(stages.begin(), stages.end(), rng);
    CHECK(chain_efficiency(LossChain(stages)) ==
          doctest::Approx(chain_efficiency(a)).epsilon(1e-14));
    CHECK(chain_efficiency(a.concatenated(b)) ==
          doctest::Approx(chain_efficiency(a) * chain_efficiency(b)).epsilon(1e-14));
  }
}

TEST_CASE("generation-rate inference") {
  const LossChain signal({{"propagation", 0.85}, {"si_detector", 0.54}, {"fiber_coupling", 0.50}});
  const double inferred = infer_generation_rate(3e4, signal);
  CHECK(inferred == doctest::Approx(130718.954248366).epsilon(1e-12));
  CHECK(std::abs(inferred - 1.31e5) / 1.31e5 < 0.005);
  CHECK(infer_generation_rate(4.2e3, LossChain({{"x", 1.0}, {"y", 1.0}})) == 4.2e3);
  CHECK_THROWS_AS(infer_generation_rate(1.0, LossChain({{"dead", 0.0}})), RangeError);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(1.0, 1e8);
  for (int i = 0; i < 100; ++i) {
    auto c = random_chain(rng, 4, "s");
    if (chain_efficiency(c) == 0.0) continue;
    const double r = rate(rng);
    CHECK(infer_generation_rate(r * chain_efficiency(c), c) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("spectral brightness") {
  CHECK(spectral_brightness(1.4e7, 150.0) == doctest::Approx(93333.333333).epsilon(1e-9));
  CHECK(spectral_brightness(0.0, 150.0) == 0.0);
  CHECK(spectral_brightness(3.0 * 1.4e7, 150.0) ==
        doctest::Approx(3.0 * spectral_brightness(1.4e7, 150.0)).epsilon(1e-15));
  CHECK_THROWS_AS(spectral_brightness(1.0, 0.0), RangeError);
  CHECK_THROWS_AS(spectral_brightness(1.0, -5.0), RangeError);
  const auto f = rate_figures(1.4e7, 150.0);
  CHECK(f.spectral_brightness == f.pair_rate_per_mW / f.bandwidth_GHz);
}

TEST_CASE("mode matching ratio") {
  const auto mm = mode_matching_ratio(0.18, 0.50);
  CHECK(mm.ratio == doctest::Approx(0.36).epsilon(1e-14));
  CHECK_FALSE(mm.inconsistent);
  CHECK(mode_matching_ratio(0.42, 1.0).ratio == 0.42);
  CHECK(mode_matching_ratio(0.0, 0.3).ratio == 0.0);
  CHECK(mode_matching_ratio(0.6, 0.5).inconsistent);
  CHECK_THROWS_AS(mode_matching_ratio(0.1, 0.0), RangeError);
}

TEST_CASE("ideal QPM effective nonlinearity") {
  CHECK(d_eff_qpm(3, 0.5, 25.2) == doctest::Approx(2.0 * 25.2 / (3.0 * std::numbers::pi)));
  CHECK(std::abs(d_eff_qpm(3, 0.5, 25.2) - 5.35) < 0.005);
  CHECK(d_eff_qpm(3, 0.5, 25.2) > 3.8);
  CHECK(d_eff_qpm(1, 0.5, 17.0) == doctest::Approx(2.0 / std::numbers::pi * 17.0));
  CHECK(d_eff_qpm(3, 1.0 / 3.0, 25.2) < 1e-14);
  CHECK_THROWS_AS(d_eff_qpm(2, 0.5, 25.2), ConfigError);
  CHECK_THROWS_AS(d_eff_qpm(-1, 0.5, 25.2), ConfigError);
}

TEST_CASE("third-order d_eff has equal maxima at D = 1/6, 1/2, 5/6") {
  const double peak = d_eff_qpm(3, 0.5, 1.0);
  for (double d : {1.0 / 6.0, 0.5, 5.0 / 6.0}) {
    CHECK(d_eff_qpm(3, d, 1.0) == doctest::Approx(peak).epsilon(1e-14));
    CHECK(d_eff_qpm(3, d - 0.01, 1.0) < peak);
    CHECK(d_eff_qpm(3, d + 0.01, 1.0) < peak);
  }
  // Numerical scan finds no higher value.
  for (double d = 0.001; d < 1.0; d += 0.001) CHECK(d_eff_qpm(3, d, 1.0) <= peak + 1e-15);
}

TEST_CASE("budget renderings carry the cumulative product") {
  std::ostringstream text, csv_out;
  write_budget_text(text, measured_conditional());
  CHECK(text.str().find("3.06%") != std::string::npos);
  write_budget_csv(csv_out, measured_conditional());
  const auto table = csv::parse(csv_out.str());
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][0] == "apd_qe");
  CHECK(table.number(1, "cumulative") == doctest::Approx(0.17));
  CHECK(table.number(2, "cumulative") == doctest::Approx(0.0306));

  std::ostringstream empty;
  write_budget_text(empty, LossChain{});
  CHECK(empty.str().find("100.00%") != std::string::npos);
}

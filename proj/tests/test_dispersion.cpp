#include <doctest.h>

#include <cmath>
#include <string>

#include "pairsim/dispersion.hpp"
#include "pairsim/errors.hpp"

using namespace pairsim::dispersion;

namespace {

// Independent evaluation of the published closed form (Python, plain floats).
constexpr double kIndex1064At24p5 = 2.1557974335;
constexpr double kIndex532At142 = 2.2418881338;
constexpr double kIndex1550At100 = 2.1410453658;

const SellmeierModel& model() {
  static const SellmeierModel m = default_lithium_niobate();
  return m;
}

}  // namespace

TEST_CASE("refractive index matches frozen golden values") {
  CHECK(refractive_index(model(), 1.064, 24.5) == doctest::Approx(kIndex1064At24p5).epsilon(1e-9));
  CHECK(refractive_index(model(), 0.532, 142.0) == doctest::Approx(kIndex532At142).epsilon(1e-9));
  CHECK(refractive_index(model(), 1.55, 100.0) == doctest::Approx(kIndex1550At100).epsilon(1e-9));
  CHECK(std::abs(refractive_index(model(), 1.064, 24.5) - kIndex1064At24p5) < 1e-4);
}

TEST_CASE("refractive index is pure") {
  const double a = refractive_index(model(), 0.8081, 142.3);
  const double b = refractive_index(model(), 0.8081, 142.3);
  CHECK(a == b);
}

TEST_CASE("index stays physical and continuous across the validity box") {
  double previous = 0.0;
  for (double t = 20.0; t <= 250.0; t += 10.0) {
    for (double l = 0.4; l <= 5.0; l += 0.01) {
      const double n = refractive_index(model(), l, t);
      CHECK(n > 1.0);
      CHECK(n < 3.5);
      CHECK(std::isfinite(n));
      if (l > 0.4) CHECK(std::abs(n - previous) < 0.015);
      previous = n;
    }
  }
}

TEST_CASE("out-of-range inputs name the violated bound") {
  auto message = [](auto&& fn) {
    try {
      fn();
    } catch (const pairsim::RangeError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  const auto short_wl = message([] { refractive_index(model(), 0.3, 100.0); });
  CHECK(short_wl.find("wavelength") != std::string::npos);
  CHECK(short_wl.find("lower bound 0.4") != std::string::npos);
  const auto hot = message([] { refractive_index(model(), 1.0, 300.0); });
  CHECK(hot.find("temperature") != std::string::npos);
  CHECK(hot.find("upper bound 250") != std::string::npos);
  CHECK_THROWS_AS(dn_dwavelength(model(), 0.4, 100.0), pairsim::RangeError);
  CHECK_THROWS_AS(dn_dwavelength(model(), 5.0, 100.0), pairsim::RangeError);
}

TEST_CASE("normal dispersion in the visible and near infrared") {
  for (double l : {0.5, 0.6, 0.8, 1.064, 1.55}) CHECK(dn_dwavelength(model(), l, 25.0) < 0.0);
}

TEST_CASE("dn/dlambda integrates back to the index difference") {
  const double l1 = 0.7, l2 = 1.7, t = 142.0;
  const int n = 2000;  // Simpson
  const double h = (l2 - l1) / n;
  double sum = dn_dwavelength(model(), l1, t) + dn_dwavelength(model(), l2, t);
  for (int k = 1; k < n; ++k) sum += (k % 2 ? 4.0 : 2.0) * dn_dwavelength(model(), l1 + k * h, t);
  const double integral = sum * h / 3.0;
  CHECK(std::abs(integral - (refractive_index(model(), l2, t) - refractive_index(model(), l1, t))) <
        1e-6);
}

TEST_CASE("finite-difference step is converged") {
  const double d = dn_dwavelength(model(), 1.55, 142.0);
  const double half = dn_dwavelength(model(), 1.55, 142.0, 0.5 * kDerivativeRelStep);
  CHECK(std::abs(d - half) < 1e-8);

  for (int k = 0; k < 20; ++k) {
    const double l = 0.45 + k * 0.2;
    const double fine = dn_dwavelength(model(), l, 80.0, 0.1 * kDerivativeRelStep);
    CHECK(std::abs(dn_dwavelength(model(), l, 80.0) - fine) < 1e-7);
  }
}

TEST_CASE("thermo-optic coefficient of n_e is positive") {
  for (double l : {0.532, 0.808, 1.559}) {
    for (double t = 20.0; t + 1.0 <= 250.0; t += 1.0)
      CHECK(refractive_index(model(), l, t + 1.0) > refractive_index(model(), l, t));
  }
}

TEST_CASE("group index exceeds phase index under normal dispersion") {
  CHECK(group_index(model(), 1.55, 142.0) > refractive_index(model(), 1.55, 142.0));
}

TEST_CASE("group delay") {
  CHECK(group_delay({1.468, 70.0}) * 1e9 == doctest::Approx(342.770464).epsilon(1e-8));
  CHECK(std::abs(group_delay({1.468, 70.0}) - 345e-9) / 345e-9 < 0.01);
  CHECK(group_delay({1.7, 0.0}) == 0.0);
  CHECK(group_delay({1.0, 299'792'458.0}) == 1.0);
  const DelayMedium l{1.468, 31.7}, two_l{1.468, 63.4};
  CHECK(group_delay(two_l) == 2.0 * group_delay(l));
  CHECK_THROWS_AS(group_delay({0.9, 1.0}), pairsim::ConfigError);
  CHECK_THROWS_AS(group_delay({1.5, -1.0}), pairsim::ConfigError);
}

TEST_CASE("shipped coefficient file matches the built-in model") {
  const auto loaded = load_sellmeier(std::string(PAIRSIM_DATA_DIR) + "/ln_congruent_jundt1997.sellmeier");
  CHECK(loaded.name == model().name);
  CHECK(loaded.coefficients == model().coefficients);
  CHECK(loaded.wavelength_um.lower == 0.4);
  CHECK(loaded.temperature_C.upper == 250.0);
  CHECK(refractive_index(loaded, 1.3, 60.0) == refractive_index(model(), 1.3, 60.0));
}

TEST_CASE("malformed coefficient files are rejected") {
  CHECK_THROWS_AS(parse_sellmeier("name = x\nform = jundt-temperature\ncoefficients = 1, 2\n"
                                  "wavelength_range_um = 0.4, 5\ntemperature_range_C = 20, 250\n"),
                  pairsim::ConfigError);
  CHECK_THROWS_AS(parse_sellmeier("name = x\nform = cauchy\ncoefficients = 1\n"
                                  "wavelength_range_um = 0.4, 5\ntemperature_range_C = 20, 250\n"),
                  pairsim::ConfigError);
  CHECK_THROWS_AS(parse_sellmeier("name = x\n"), pairsim::ConfigError);
}

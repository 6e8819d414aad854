#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace pairsim::dispersion {

/// Speed of light in vacuum [m/s], exact.
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Closed-form families understood by refractive_index().
enum class SellmeierForm {
  /// n^2 = a1 + b1 f + (a2 + b2 f)/(l^2 - (a3 + b3 f)^2) + (a4 + b4 f)/(l^2 - a5^2) - a6 l^2,
  /// f = (T - 24.5)(T + 570.82); coefficients ordered a1..a6, b1..b4; l in um, T in C.
  kJundtTemperature,
};

struct Range {
  double lower;
  double upper;

  bool contains(double x) const noexcept { return x >= lower && x <= upper; }
};

struct SellmeierModel {
  std::string name;
  SellmeierForm form = SellmeierForm::kJundtTemperature;
  std::vector<double> coefficients;
  Range wavelength_um{0.0, 0.0};
  Range temperature_C{0.0, 0.0};

  /// Throws ConfigError when the coefficient count or ranges are inconsistent.
  void validate() const;
};

/// Extraordinary index of congruent lithium niobate shipped with the project
/// (valid 0.4-5 um, 20-250 C).
SellmeierModel default_lithium_niobate();

/// Reads a key/value Sellmeier file (name, form, coefficients, wavelength_range_um,
/// temperature_range_C). See data/README.md for the schema.
SellmeierModel load_sellmeier(const std::filesystem::path& path);
SellmeierModel parse_sellmeier(const std::string& text);

/// n(wavelength, temperature). Throws RangeError naming the violated bound.
double refractive_index(const SellmeierModel& model, double wavelength_um, double temperature_C);

/// Relative step used by dn_dwavelength(): h = kDerivativeRelStep * wavelength.
inline constexpr double kDerivativeRelStep = 1e-4;

/// Central finite difference dn/dlambda [1/um]. The stencil must fit inside the
/// wavelength validity range.
double dn_dwavelength(const SellmeierModel& model, double wavelength_um, double temperature_C,
                      double relative_step = kDerivativeRelStep);

/// Group index n - lambda dn/dlambda.
double group_index(const SellmeierModel& model, double wavelength_um, double temperature_C);

struct DelayMedium {
  double group_index = 1.468;  ///< standard single-mode fiber near 1.55 um
  double length_m = 0.0;

  void validate() const;
};

/// Transit time length * group_index / c [s].
double group_delay(const DelayMedium& medium);

}  // namespace pairsim::dispersion

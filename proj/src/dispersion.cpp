#include "pairsim/dispersion.hpp"

#include <cmath>
#include <cstdio>

#include "ini_util.hpp"
#include "pairsim/errors.hpp"

namespace pairsim::dispersion {
namespace {

constexpr std::size_t kJundtCoefficientCount = 10;

std::string format_bound(const char* what, double value, const char* unit, const Range& r) {
  char buf[200];
  const char* side = value < r.lower ? "lower" : "upper";
  const double bound = value < r.lower ? r.lower : r.upper;
  std::snprintf(buf, sizeof buf, "%s %.9g %s violates %s bound %.9g %s", what, value, unit, side,
                bound, unit);
  return buf;
}

double jundt_index_squared(const std::vector<double>& c, double lambda_um, double temperature_C) {
  const double f = (temperature_C - 24.5) * (temperature_C + 570.82);
  const double l2 = lambda_um * lambda_um;
  const double uv_pole = c[2] + c[8] * f;
  return c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - uv_pole * uv_pole) +
         (c[3] + c[9] * f) / (l2 - c[4] * c[4]) - c[5] * l2;
}

SellmeierForm parse_form(const std::string& text) {
  if (text == "jundt-temperature") return SellmeierForm::kJundtTemperature;
  throw ConfigError("unknown Sellmeier form '" + text + "'");
}

}  // namespace

void SellmeierModel::validate() const {
  if (form == SellmeierForm::kJundtTemperature && coefficients.size() != kJundtCoefficientCount)
    throw ConfigError("Sellmeier model '" + name + "': expected 10 coefficients, got " +
                      std::to_string(coefficients.size()));
  if (!(wavelength_um.lower > 0.0 && wavelength_um.lower < wavelength_um.upper))
    throw ConfigError("Sellmeier model '" + name + "': invalid wavelength range");
  if (!(temperature_C.lower < temperature_C.upper))
    throw ConfigError("Sellmeier model '" + name + "': invalid temperature range");
}

SellmeierModel default_lithium_niobate() {
  // Jundt, congruent LiNbO3, extraordinary ray.
  return SellmeierModel{
      "congruent-LiNbO3-ne-jundt1997",
      SellmeierForm::kJundtTemperature,
      {5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2, 4.629e-7, 3.862e-8, -0.89e-8,
       2.657e-5},
      {0.4, 5.0},
      {20.0, 250.0},
  };
}

namespace {

SellmeierModel model_from_tree(const detail::Tree& tree, const std::string& origin) {
  SellmeierModel model;
  model.name = detail::require_string(tree, "name");
  model.form = parse_form(detail::require_string(tree, "form"));
  model.coefficients = detail::require_doubles(tree, "coefficients");
  const auto wl = detail::require_doubles(tree, "wavelength_range_um");
  const auto tc = detail::require_doubles(tree, "temperature_range_C");
  if (wl.size() != 2 || tc.size() != 2)
    throw ConfigError(origin + ": Sellmeier ranges must be 'lower, upper' pairs");
  model.wavelength_um = {wl[0], wl[1]};
  model.temperature_C = {tc[0], tc[1]};
  model.validate();
  return model;
}

}  // namespace

SellmeierModel parse_sellmeier(const std::string& text) {
  return model_from_tree(detail::parse_ini_text(text, "sellmeier"), "sellmeier");
}

SellmeierModel load_sellmeier(const std::filesystem::path& path) {
  return model_from_tree(detail::read_ini_file(path.string()), path.string());
}

double refractive_index(const SellmeierModel& model, double wavelength_um, double temperature_C) {
  if (!model.wavelength_um.contains(wavelength_um))
    throw RangeError(format_bound("wavelength", wavelength_um, "um", model.wavelength_um));
  if (!model.temperature_C.contains(temperature_C))
    throw RangeError(format_bound("temperature", temperature_C, "C", model.temperature_C));
  const double n2 = jundt_index_squared(model.coefficients, wavelength_um, temperature_C);
  return std::sqrt(n2);
}

double dn_dwavelength(const SellmeierModel& model, double wavelength_um, double temperature_C,
                      double relative_step) {
  const double h = relative_step * wavelength_um;
  const double lo = wavelength_um - h;
  const double hi = wavelength_um + h;
  if (!model.wavelength_um.contains(lo) || !model.wavelength_um.contains(hi))
    throw RangeError(format_bound("finite-difference stencil around wavelength", wavelength_um,
                                  "um", model.wavelength_um));
  return (refractive_index(model, hi, temperature_C) - refractive_index(model, lo, temperature_C)) /
         (hi - lo);
}

double group_index(const SellmeierModel& model, double wavelength_um, double temperature_C) {
  return refractive_index(model, wavelength_um, temperature_C) -
         wavelength_um * dn_dwavelength(model, wavelength_um, temperature_C);
}

void DelayMedium::validate() const {
  if (!(group_index >= 1.0)) throw ConfigError("delay medium: group_index must be >= 1");
  if (!(length_m >= 0.0)) throw ConfigError("delay medium: length must be >= 0");
}

double group_delay(const DelayMedium& medium) {
  medium.validate();
  return medium.length_m * medium.group_index / kSpeedOfLight;
}

}  // namespace pairsim::dispersion

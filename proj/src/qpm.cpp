#include "pairsim/qpm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pairsim/errors.hpp"
#include "pairsim/roots.hpp"

namespace pairsim::qpm {
namespace {

constexpr double kUmPerNm = 1e-3;
constexpr double kPerUmToPerM = 1e6;

/// n_p/l_p - n_s/l_s - n_i/l_i in 1/um.
double index_bracket(const dispersion::SellmeierModel& model, double pump_nm, double signal_nm,
                     double idler_nm, double temperature_C) {
  const double lp = pump_nm * kUmPerNm;
  const double ls = signal_nm * kUmPerNm;
  const double li = idler_nm * kUmPerNm;
  return dispersion::refractive_index(model, lp, temperature_C) / lp -
         dispersion::refractive_index(model, ls, temperature_C) / ls -
         dispersion::refractive_index(model, li, temperature_C) / li;
}

double mismatch_at_idler(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                         const PhaseMatchPoint& solution, double idler_nm) {
  const double signal_nm = idler_from_energy(solution.pump_nm, idler_nm);
  return phase_mismatch(crystal, model, solution.pump_nm, signal_nm, idler_nm,
                        solution.temperature_C);
}

double half_length_m(const CrystalSpec& crystal) { return 0.5 * crystal.length_mm * 1e-3; }

}  // namespace

void CrystalSpec::validate() const {
  if (!(length_mm > 0.0)) throw ConfigError("crystal: length must be > 0");
  if (!(poling_period_um > 0.0)) throw ConfigError("crystal: poling period must be > 0");
  if (qpm_order <= 0 || qpm_order % 2 == 0)
    throw ConfigError("crystal: QPM order must be a positive odd integer");
  if (!(duty_cycle > 0.0 && duty_cycle < 1.0))
    throw ConfigError("crystal: duty cycle must lie in (0, 1)");
  for (const auto& [band, r] : facet_reflectivity)
    if (!(r >= 0.0 && r <= 1.0))
      throw ConfigError("crystal: facet reflectivity for '" + band + "' outside [0, 1]");
}

double CrystalSpec::period_at(double temperature_C) const {
  if (!thermal_expansion_enabled) return poling_period_um;
  return poling_period_um *
         (1.0 + thermal_expansion_per_C * (temperature_C - reference_temperature_C));
}

CrystalSpec default_ppln() {
  CrystalSpec c;
  c.facet_reflectivity = {{"532nm", 0.08}, {"800nm", 0.0}, {"1600nm", 0.0}};
  return c;
}

double energy_residual(const PhaseMatchPoint& p) {
  const double inv_p = 1.0 / p.pump_nm;
  return std::abs(inv_p - 1.0 / p.signal_nm - 1.0 / p.idler_nm) / inv_p;
}

double idler_from_energy(double pump_nm, double signal_nm) {
  if (!(pump_nm > 0.0) || !(signal_nm > pump_nm)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "degenerate input: need 0 < pump (%.9g nm) < signal (%.9g nm)", pump_nm,
                  signal_nm);
    throw ConfigError(buf);
  }
  return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

double phase_mismatch(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                      double pump_nm, double signal_nm, double idler_nm, double temperature_C) {
  const double grating = crystal.qpm_order / crystal.period_at(temperature_C);
  return 2.0 * std::numbers::pi *
         (index_bracket(model, pump_nm, signal_nm, idler_nm, temperature_C) - grating) *
         kPerUmToPerM;
}

PhaseMatchPoint solve_signal(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                             double pump_nm, double temperature_C, Bracket bracket) {
  crystal.validate();
  if (!(bracket.lower_nm > pump_nm && bracket.lower_nm < bracket.upper_nm))
    throw ConfigError("signal bracket must satisfy pump < lower < upper");

  auto mismatch = [&](double signal_nm) {
    return phase_mismatch(crystal, model, pump_nm, signal_nm, idler_from_energy(pump_nm, signal_nm),
                          temperature_C);
  };
  roots::BrentResult root;
  try {
    root = roots::brent(mismatch, bracket.lower_nm, bracket.upper_nm,
                        {kWavelengthTolerance_nm, kMaxSolverIterations});
  } catch (const NoSolutionError& e) {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "no phase-matched signal in [%.6g, %.6g] nm at %.6g C: dk = (%.6g, %.6g) rad/m",
                  bracket.lower_nm, bracket.upper_nm, temperature_C, e.f_lower(), e.f_upper());
    throw NoSolutionError(buf, e.f_lower(), e.f_upper());
  }
  if (!root.converged)
    throw NumericalError("phase-matching solve did not converge in 200 iterations");

  PhaseMatchPoint point;
  point.pump_nm = pump_nm;
  point.signal_nm = root.x;
  point.idler_nm = idler_from_energy(pump_nm, root.x);
  point.temperature_C = temperature_C;
  point.mismatch_rad_per_m = root.fx;
  return point;
}

double calibrate_period(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                        double pump_nm, double target_signal_nm, double temperature_C) {
  const double idler_nm = idler_from_energy(pump_nm, target_signal_nm);
  const double bracket = index_bracket(model, pump_nm, target_signal_nm, idler_nm, temperature_C);
  if (!(bracket > 0.0))
    throw NumericalError("calibration point needs a positive grating vector");
  const double period_at_T = crystal.qpm_order / bracket;
  if (!crystal.thermal_expansion_enabled) return period_at_T;
  return period_at_T /
         (1.0 + crystal.thermal_expansion_per_C * (temperature_C - crystal.reference_temperature_C));
}

CrystalSpec calibrated(CrystalSpec crystal, const dispersion::SellmeierModel& model,
                       double pump_nm, double target_signal_nm, double temperature_C) {
  crystal.poling_period_um =
      calibrate_period(crystal, model, pump_nm, target_signal_nm, temperature_C);
  return crystal;
}

TuningCurve tuning_curve(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                         double pump_nm, double temperature_lo_C, double temperature_hi_C,
                         double step_C, Bracket bracket) {
  if (!(temperature_hi_C >= temperature_lo_C))
    throw ConfigError("tuning range is inverted");
  if (!(step_C > 0.0)) throw ConfigError("tuning step must be > 0");

  const auto n_steps =
      static_cast<long>(std::floor((temperature_hi_C - temperature_lo_C) / step_C + 1e-9));
  TuningCurve curve;
  for (long k = 0; k <= n_steps; ++k) {
    const double t = temperature_lo_C + static_cast<double>(k) * step_C;
    try {
      const auto p = solve_signal(crystal, model, pump_nm, t, bracket);
      curve.rows.push_back({t, p.signal_nm, p.idler_nm});
    } catch (const NumericalError& e) {
      curve.failures.push_back({t, e.what()});
    } catch (const RangeError& e) {
      curve.failures.push_back({t, e.what()});
    }
  }
  if (curve.rows.empty())
    throw NoSolutionError("no phase-matched solution anywhere in the tuning range", 0.0, 0.0);
  return curve;
}

TuningCoefficient tuning_coefficient(const CrystalSpec& crystal,
                                     const dispersion::SellmeierModel& model, double pump_nm,
                                     double temperature_C, double delta_C, Bracket bracket) {
  const auto below = solve_signal(crystal, model, pump_nm, temperature_C - delta_C, bracket);
  const auto above = solve_signal(crystal, model, pump_nm, temperature_C + delta_C, bracket);
  return {(above.signal_nm - below.signal_nm) / (2.0 * delta_C),
          (above.idler_nm - below.idler_nm) / (2.0 * delta_C)};
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double half_max_argument() {
  static const double x0 = [] {
    auto g = [](double x) { return sinc(x) * sinc(x) - 0.5; };
    return roots::brent(g, 1.0, 2.0, {1e-15, 200}).x;
  }();
  return x0;
}

std::vector<SpectrumSample> pm_spectrum(const CrystalSpec& crystal,
                                        const dispersion::SellmeierModel& model,
                                        const PhaseMatchPoint& solution, double idler_span_nm,
                                        int n_points) {
  if (!(idler_span_nm > 0.0)) throw ConfigError("spectrum span must be > 0");
  if (n_points < 3) throw ConfigError("spectrum needs at least 3 points");
  std::vector<SpectrumSample> out;
  out.reserve(static_cast<std::size_t>(n_points));
  const double start = solution.idler_nm - 0.5 * idler_span_nm;
  const double dl = idler_span_nm / (n_points - 1);
  for (int k = 0; k < n_points; ++k) {
    const double li = (2 * k == n_points - 1) ? solution.idler_nm : start + k * dl;
    const double x = mismatch_at_idler(crystal, model, solution, li) * half_length_m(crystal);
    const double s = sinc(x);
    out.push_back({li, s * s});
  }
  return out;
}

double wavelength_to_frequency_width_GHz(double width_nm, double center_nm) {
  const double center_m = center_nm * 1e-9;
  return dispersion::kSpeedOfLight * (width_nm * 1e-9) / (center_m * center_m) * 1e-9;
}

Bandwidth fwhm_bandwidth(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                         const PhaseMatchPoint& solution) {
  const double x0 = half_max_argument();
  const double half_l = half_length_m(crystal);
  auto excess = [&](double li) {
    const double s = sinc(mismatch_at_idler(crystal, model, solution, li) * half_l);
    return s * s - 0.5;
  };

  const double h = 1e-3;
  const double slope = (mismatch_at_idler(crystal, model, solution, solution.idler_nm + h) -
                        mismatch_at_idler(crystal, model, solution, solution.idler_nm - h)) /
                       (2.0 * h);
  if (!(std::abs(slope) > 0.0) || !std::isfinite(slope))
    throw SpectralAnomalyError("phase mismatch is stationary in the idler wavelength");
  const double expected_half_width = x0 / (half_l * std::abs(slope));

  auto find_edge = [&](double direction) {
    const double step = 0.25 * expected_half_width;
    double inner = solution.idler_nm;
    for (int k = 1; k <= 40; ++k) {
      const double outer = solution.idler_nm + direction * k * step;
      if (excess(outer) < 0.0) {
        const double lo = std::min(inner, outer);
        const double hi = std::max(inner, outer);
        return roots::brent(excess, lo, hi, {1e-9, kMaxSolverIterations}).x;
      }
      inner = outer;
    }
    throw SpectralAnomalyError("half maximum not bracketed within 10x the expected width");
  };

  Bandwidth bw;
  bw.lower_nm = find_edge(-1.0);
  bw.upper_nm = find_edge(+1.0);
  bw.width_nm = bw.upper_nm - bw.lower_nm;
  bw.width_GHz = wavelength_to_frequency_width_GHz(bw.width_nm, solution.idler_nm);
  return bw;
}

}  // namespace pairsim::qpm

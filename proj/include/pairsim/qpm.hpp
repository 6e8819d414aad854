#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pairsim/dispersion.hpp"

namespace pairsim::qpm {

/// Periodically poled crystal. All three waves see the extraordinary index.
struct CrystalSpec {
  double length_mm = 20.0;
  double thickness_mm = 0.5;
  double poling_period_um = 21.6;  ///< at reference_temperature_C
  double reference_temperature_C = 25.0;
  int qpm_order = 3;
  double duty_cycle = 0.5;
  double thermal_expansion_per_C = 1.5e-5;
  bool thermal_expansion_enabled = true;
  std::map<std::string, double> facet_reflectivity;  ///< band label -> fraction per surface

  void validate() const;
  /// Poling period at temperature, including linear thermal expansion when enabled [um].
  double period_at(double temperature_C) const;
};

/// Third-order PPLN crystal: 20 mm long, 21.6 um period, third order, 8% per facet at 532 nm.
CrystalSpec default_ppln();

struct PhaseMatchPoint {
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  double idler_nm = 0.0;
  double temperature_C = 0.0;
  double mismatch_rad_per_m = 0.0;
};

/// |1/lp - 1/ls - 1/li| relative to 1/lp.
double energy_residual(const PhaseMatchPoint& point);

/// The conjugate wavelength from 1/li = 1/lp - 1/ls. Throws ConfigError when
/// ls <= lp (no physical conjugate).
double idler_from_energy(double pump_nm, double signal_nm);

/// Delta k = 2 pi [n_p/l_p - n_s/l_s - n_i/l_i - m/Lambda(T)] in rad/m.
/// Symmetric in the signal/idler labels.
double phase_mismatch(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                      double pump_nm, double signal_nm, double idler_nm, double temperature_C);

struct Bracket {
  double lower_nm = 760.0;
  double upper_nm = 860.0;
};

inline constexpr double kWavelengthTolerance_nm = 1e-6;
inline constexpr int kMaxSolverIterations = 200;

/// Phase-matched signal at fixed pump and temperature (idler slaved by energy
/// conservation). Throws NoSolutionError carrying the endpoint mismatches when
/// Delta k does not change sign over the bracket.
PhaseMatchPoint solve_signal(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                             double pump_nm, double temperature_C, Bracket bracket = {});

/// Reference-temperature poling period that zeroes Delta k at (pump, target signal, T) [um].
double calibrate_period(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                        double pump_nm, double target_signal_nm, double temperature_C);

/// Copy of `crystal` with its period replaced by calibrate_period().
CrystalSpec calibrated(CrystalSpec crystal, const dispersion::SellmeierModel& model,
                       double pump_nm, double target_signal_nm, double temperature_C);

struct TuningRow {
  double temperature_C;
  double signal_nm;
  double idler_nm;
};

struct TuningFailure {
  double temperature_C;
  std::string reason;
};

struct TuningCurve {
  std::vector<TuningRow> rows;          ///< strictly increasing in temperature
  std::vector<TuningFailure> failures;  ///< temperatures where the solve failed
};

/// Solves at T = T_lo, T_lo + step, ... <= T_hi. Rows that fail to solve are
/// reported in `failures`; throws NoSolutionError if none succeed and
/// ConfigError for an inverted range or nonpositive step.
TuningCurve tuning_curve(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                         double pump_nm, double temperature_lo_C, double temperature_hi_C,
                         double step_C, Bracket bracket = {});

struct TuningCoefficient {
  double signal_nm_per_C;
  double idler_nm_per_C;
};

/// Central difference of solve_signal() over [T - dT, T + dT].
TuningCoefficient tuning_coefficient(const CrystalSpec& crystal,
                                     const dispersion::SellmeierModel& model, double pump_nm,
                                     double temperature_C, double delta_C = 1.0,
                                     Bracket bracket = {});

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// x0 > 0 with sinc^2(x0) = 1/2 (about 1.39156).
double half_max_argument();

struct SpectrumSample {
  double idler_nm;
  double relative_efficiency;
};

/// sinc^2(Delta k L / 2) over idler wavelengths centered on the solution,
/// signal slaved at fixed pump and temperature.
std::vector<SpectrumSample> pm_spectrum(const CrystalSpec& crystal,
                                        const dispersion::SellmeierModel& model,
                                        const PhaseMatchPoint& solution, double idler_span_nm,
                                        int n_points);

struct Bandwidth {
  double lower_nm;  ///< idler half-maximum below the solution
  double upper_nm;  ///< idler half-maximum above the solution
  double width_nm;
  double width_GHz;
};

/// Delta nu = c Delta lambda / lambda^2, in GHz for nm inputs.
double wavelength_to_frequency_width_GHz(double width_nm, double center_nm);

/// Idler-side FWHM of the phase-matching spectrum. Throws SpectralAnomalyError
/// if a half-maximum is not bracketed within 10x the locally expected width.
Bandwidth fwhm_bandwidth(const CrystalSpec& crystal, const dispersion::SellmeierModel& model,
                         const PhaseMatchPoint& solution);

}  // namespace pairsim::qpm

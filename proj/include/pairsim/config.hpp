#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pairsim/detector.hpp"
#include "pairsim/dispersion.hpp"
#include "pairsim/montecarlo.hpp"
#include "pairsim/qpm.hpp"
#include "pairsim/source.hpp"

namespace pairsim::config {

struct PhaseMatchingSettings {
  double pump_nm = 532.1;
  qpm::Bracket signal_bracket;
  double operating_temperature_C = 142.0;
  double tune_lo_C = 140.0;
  double tune_hi_C = 185.0;
  double tune_step_C = 5.0;
  double tuning_report_temperature_C = 160.0;
  double spectrum_span_nm = 6.0;
  int spectrum_points = 121;
  double pump_waist_um = 90.0;  ///< recorded only; rates are model inputs
};

struct CalibrationPoint {
  double pump_nm = 532.1;
  double signal_nm = 808.0;
  double temperature_C = 142.0;
};

struct SourceSettings {
  double multimode_pair_rate_per_s_mW = 1.4e7;
  double bandwidth_GHz = 150.0;
  double detected_singlemode_rate_per_s_mW = 3e4;
  source::LossChain signal_inference_chain;
  source::LossChain conditional_chain;
  std::optional<double> coupling_and_matching;
  std::optional<double> fiber_coupling;
  double d33_pm_per_V = source::kLithiumNiobateD33_pm_per_V;
  std::optional<double> measured_d_eff_pm_per_V;
};

struct SweepRange {
  double lo;
  double hi;
  double step;
};

struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path dispersion_path;
  dispersion::SellmeierModel dispersion;
  qpm::CrystalSpec crystal;          ///< period already calibrated when `calibrate` is set
  double raw_poling_period_um = 0.0;  ///< period as written in the file
  std::optional<CalibrationPoint> calibration;
  PhaseMatchingSettings phase_matching;
  SourceSettings source;
  montecarlo::ExperimentConfig experiment;
  dispersion::DelayMedium fiber;
  double overbias_V = 3.7;
  std::filesystem::path apd_path;
  detector::GatedApdModel apd;
  detector::SpcmModel spcm;
  SweepRange overbias_sweep{0.5, 4.0, 0.1};
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
};

/// `section.key` / value pairs applied on top of the file before decoding.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Loads a run config; model file paths resolve relative to the config's directory.
/// Throws ConfigError (or RangeError from calibration) on any problem.
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

detector::GatedApdModel load_apd_model(const std::filesystem::path& path);
detector::GatedApdModel parse_apd_model(const std::string& text);

/// "name:value, name:value" -> LossChain.
source::LossChain parse_chain(const std::string& text);

/// "A:B:STEP" or "A" (single value, step 1).
SweepRange parse_range(const std::string& text);

/// Directory holding the shipped data files (operating-point config and models).
std::filesystem::path shipped_data_dir();

}  // namespace pairsim::config

#include "pairsim/config.hpp"

#include <charconv>
#include <cmath>

#include "ini_util.hpp"
#include "pairsim/errors.hpp"

#ifndef PAIRSIM_DATA_DIR
#define PAIRSIM_DATA_DIR "data"
#endif

namespace pairsim::config {
namespace {

using detail::Tree;

const Tree& section(const Tree& root, const std::string& name) {
  static const Tree empty;
  if (auto child = root.get_child_optional(name)) return *child;
  return empty;
}

std::vector<std::pair<std::string, double>> parse_pairs(const std::string& text,
                                                        const std::string& key) {
  std::vector<std::pair<std::string, double>> out;
  if (detail::trim(text).empty()) return out;
  for (const auto& item : detail::split(text, ',')) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos)
      throw ConfigError("'" + key + "': expected name:value, got '" + item + "'");
    out.emplace_back(detail::trim(item.substr(0, colon)),
                     detail::parse_double(item.substr(colon + 1), key));
  }
  return out;
}

source::LossChain chain_or(const Tree& t, const std::string& key, source::LossChain fallback) {
  if (auto v = detail::get_string(t, key)) return parse_chain(*v);
  return fallback;
}

std::optional<double> optional_double(const Tree& t, const std::string& key) {
  if (auto v = detail::get_string(t, key)) return detail::parse_double(*v, key);
  return std::nullopt;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

detector::GatedApdModel apd_from_tree(const Tree& t) {
  detector::GatedApdModel m = detector::default_ingaas_apd();
  m.qe_curve.clear();
  for (const auto& [v, e] : parse_pairs(detail::require_string(t, "qe_knots"), "qe_knots"))
    m.qe_curve.push_back({detail::parse_double(v, "qe_knots"), e});
  m.temperature_C = detail::get_double(t, "temperature_C", m.temperature_C);
  m.dark_prob_per_gate = detail::get_double(t, "dark_prob_per_gate", m.dark_prob_per_gate);
  m.gate_length_ns = detail::get_double(t, "gate_length_ns", m.gate_length_ns);
  m.deadband_ns = detail::get_double(t, "deadband_ns", m.deadband_ns);
  m.jitter_sigma_ns = detail::get_double(t, "jitter_sigma_ns", m.jitter_sigma_ns);
  m.edge_mask_enabled = detail::get_bool(t, "edge_mask", m.edge_mask_enabled);
  m.rise_ns = detail::get_double(t, "rise_ns", m.rise_ns);
  m.fall_ns = detail::get_double(t, "fall_ns", m.fall_ns);
  const Tree& ap = section(t, "afterpulse");
  m.afterpulse.amplitude = detail::get_double(ap, "amplitude", m.afterpulse.amplitude);
  m.afterpulse.trap_lifetime_us =
      detail::get_double(ap, "trap_lifetime_us", m.afterpulse.trap_lifetime_us);
  m.afterpulse.temperature_scale =
      detail::get_double(ap, "temperature_scale", m.afterpulse.temperature_scale);
  m.afterpulse.reference_temperature_C =
      detail::get_double(ap, "reference_temperature_C", m.afterpulse.reference_temperature_C);
  m.validate();
  return m;
}

void apply_apd_overrides(detector::GatedApdModel& m, const Tree& t) {
  m.temperature_C = detail::get_double(t, "temperature_C", m.temperature_C);
  m.dark_prob_per_gate = detail::get_double(t, "dark_prob_per_gate", m.dark_prob_per_gate);
  m.gate_length_ns = detail::get_double(t, "gate_length_ns", m.gate_length_ns);
  m.deadband_ns = detail::get_double(t, "deadband_ns", m.deadband_ns);
  m.jitter_sigma_ns = detail::get_double(t, "jitter_sigma_ns", m.jitter_sigma_ns);
  m.edge_mask_enabled = detail::get_bool(t, "edge_mask", m.edge_mask_enabled);
  m.afterpulse.amplitude = detail::get_double(t, "afterpulse_amplitude", m.afterpulse.amplitude);
  m.afterpulse.trap_lifetime_us =
      detail::get_double(t, "afterpulse_trap_lifetime_us", m.afterpulse.trap_lifetime_us);
  m.validate();
}

}  // namespace

source::LossChain parse_chain(const std::string& text) {
  source::LossChain chain;
  for (auto& [name, eta] : parse_pairs(text, "chain")) chain.add(name, eta);
  return chain;
}

SweepRange parse_range(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() == 1) {
    const double v = detail::parse_double(parts[0], "range");
    return {v, v, 1.0};
  }
  if (parts.size() != 3) throw ConfigError("range must be A:B:STEP, got '" + text + "'");
  SweepRange r{detail::parse_double(parts[0], "range"), detail::parse_double(parts[1], "range"),
               detail::parse_double(parts[2], "range")};
  if (!(r.hi >= r.lo)) throw ConfigError("range '" + text + "' is inverted");
  if (!(r.step > 0.0)) throw ConfigError("range '" + text + "' needs a positive step");
  return r;
}

std::filesystem::path shipped_data_dir() { return PAIRSIM_DATA_DIR; }

detector::GatedApdModel parse_apd_model(const std::string& text) {
  return apd_from_tree(detail::parse_ini_text(text, "detector model"));
}

detector::GatedApdModel load_apd_model(const std::filesystem::path& path) {
  return apd_from_tree(detail::read_ini_file(path.string()));
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  Tree root = detail::read_ini_file(path.string());
  for (const auto& [key, value] : overrides) {
    if (key.find('.') == std::string::npos)
      throw ConfigError("override '" + key + "' must be section.key");
    root.put(key, value);
  }
  const auto base = path.parent_path();

  RunConfig rc;
  rc.config_path = path;

  const Tree& run = section(root, "run");
  if (auto seed = detail::get_string(run, "seed"); seed && !seed->empty()) {
    std::uint64_t value = 0;
    const auto* end = seed->data() + seed->size();
    const auto [ptr, ec] = std::from_chars(seed->data(), end, value);
    if (ec != std::errc() || ptr != end)
      throw ConfigError("run.seed: not an unsigned integer: '" + *seed + "'");
    rc.seed = value;
  }
  rc.output_dir = detail::get_string(run, "output_dir").value_or("pairsim-out");

  // Dispersion model.
  if (auto file = detail::get_string(run, "dispersion_model")) {
    rc.dispersion_path = resolve(base, *file);
    rc.dispersion = dispersion::load_sellmeier(rc.dispersion_path);
  } else {
    rc.dispersion = dispersion::default_lithium_niobate();
  }

  // Crystal.
  const Tree& cr = section(root, "crystal");
  rc.crystal = qpm::default_ppln();
  auto& c = rc.crystal;
  c.length_mm = detail::get_double(cr, "length_mm", c.length_mm);
  c.thickness_mm = detail::get_double(cr, "thickness_mm", c.thickness_mm);
  c.poling_period_um = detail::get_double(cr, "poling_period_um", c.poling_period_um);
  c.reference_temperature_C =
      detail::get_double(cr, "reference_temperature_C", c.reference_temperature_C);
  const double order = detail::get_double(cr, "qpm_order", c.qpm_order);
  if (order != static_cast<int>(order)) throw ConfigError("crystal.qpm_order must be an integer");
  c.qpm_order = static_cast<int>(order);
  c.duty_cycle = detail::get_double(cr, "duty_cycle", c.duty_cycle);
  c.thermal_expansion_per_C =
      detail::get_double(cr, "thermal_expansion_per_C", c.thermal_expansion_per_C);
  c.thermal_expansion_enabled = detail::get_bool(cr, "thermal_expansion", c.thermal_expansion_enabled);
  if (auto refl = detail::get_string(cr, "facet_reflectivity")) {
    c.facet_reflectivity.clear();
    for (auto& [band, r] : parse_pairs(*refl, "crystal.facet_reflectivity"))
      c.facet_reflectivity[band] = r;
  }
  c.validate();
  rc.raw_poling_period_um = c.poling_period_um;
  if (detail::get_bool(cr, "calibrate", false)) {
    CalibrationPoint cp;
    cp.pump_nm = detail::get_double(cr, "calibration_pump_nm", cp.pump_nm);
    cp.signal_nm = detail::get_double(cr, "calibration_signal_nm", cp.signal_nm);
    cp.temperature_C = detail::get_double(cr, "calibration_temperature_C", cp.temperature_C);
    rc.calibration = cp;
    c = qpm::calibrated(c, rc.dispersion, cp.pump_nm, cp.signal_nm, cp.temperature_C);
  }

  // Phase matching settings.
  const Tree& pm = section(root, "phase_matching");
  auto& p = rc.phase_matching;
  p.pump_nm = detail::get_double(pm, "pump_nm", p.pump_nm);
  if (auto b = detail::get_doubles(pm, "signal_bracket_nm")) {
    if (b->size() != 2) throw ConfigError("phase_matching.signal_bracket_nm needs two values");
    p.signal_bracket = {(*b)[0], (*b)[1]};
  }
  p.operating_temperature_C =
      detail::get_double(pm, "operating_temperature_C", p.operating_temperature_C);
  if (auto r = detail::get_string(pm, "tune_range_C")) {
    const auto range = parse_range(*r);
    p.tune_lo_C = range.lo;
    p.tune_hi_C = range.hi;
    p.tune_step_C = range.step;
  }
  p.tuning_report_temperature_C =
      detail::get_double(pm, "tuning_report_temperature_C", p.tuning_report_temperature_C);
  p.spectrum_span_nm = detail::get_double(pm, "spectrum_span_nm", p.spectrum_span_nm);
  p.spectrum_points =
      static_cast<int>(detail::get_double(pm, "spectrum_points", p.spectrum_points));
  p.pump_waist_um = detail::get_double(pm, "pump_waist_um", p.pump_waist_um);

  // Source / budget.
  const Tree& so = section(root, "source");
  auto& s = rc.source;
  s.multimode_pair_rate_per_s_mW =
      detail::get_double(so, "multimode_pair_rate_per_s_mW", s.multimode_pair_rate_per_s_mW);
  s.bandwidth_GHz = detail::get_double(so, "bandwidth_GHz", s.bandwidth_GHz);
  s.detected_singlemode_rate_per_s_mW = detail::get_double(
      so, "detected_singlemode_rate_per_s_mW", s.detected_singlemode_rate_per_s_mW);
  s.signal_inference_chain = chain_or(so, "signal_inference_chain", {});
  s.conditional_chain = chain_or(so, "conditional_chain", {});
  s.coupling_and_matching = optional_double(so, "coupling_and_matching");
  s.fiber_coupling = optional_double(so, "fiber_coupling");
  s.d33_pm_per_V = detail::get_double(so, "d33_pm_per_V", s.d33_pm_per_V);
  s.measured_d_eff_pm_per_V = optional_double(so, "measured_d_eff_pm_per_V");

  // Experiment.
  const Tree& ex = section(root, "experiment");
  auto e = montecarlo::default_experiment();
  e.pump_power_mW = detail::get_double(ex, "pump_power_mW", e.pump_power_mW);
  e.singlemode_pair_rate_per_s_mW =
      detail::get_double(ex, "singlemode_pair_rate_per_s_mW", e.singlemode_pair_rate_per_s_mW);
  e.signal_chain = chain_or(ex, "signal_chain", e.signal_chain);
  e.idler_chain = chain_or(ex, "idler_chain", e.idler_chain);
  e.pairs_enabled = detail::get_bool(ex, "pairs_enabled", e.pairs_enabled);
  rc.fiber.length_m = detail::get_double(ex, "fiber_length_m", 70.0);
  rc.fiber.group_index = detail::get_double(ex, "fiber_group_index", rc.fiber.group_index);
  e.fiber_delay_ns = dispersion::group_delay(rc.fiber) * 1e9;
  e.gate_open_lead_ns = detail::get_double(ex, "gate_open_lead_ns", e.gate_open_lead_ns);
  e.max_trigger_rate_per_s =
      detail::get_double(ex, "max_trigger_rate_per_s", e.max_trigger_rate_per_s);
  e.bin_width_ns = detail::get_double(ex, "bin_width_ns", e.bin_width_ns);
  e.window_ns = detail::get_double(ex, "window_ns", e.window_ns);
  e.coincidence_window_ns =
      detail::get_double(ex, "coincidence_window_ns", e.coincidence_window_ns);
  const double n = detail::get_double(ex, "n_triggers", static_cast<double>(e.n_triggers));
  if (!(n >= 1.0) || n != std::floor(n))
    throw ConfigError("experiment.n_triggers must be a positive integer");
  e.n_triggers = static_cast<std::uint64_t>(n);
  e.duration_s = optional_double(ex, "duration_s");
  rc.overbias_V = detail::get_double(ex, "overbias_V", rc.overbias_V);
  e.validate();
  rc.experiment = std::move(e);

  // Detectors.
  if (auto file = detail::get_string(run, "apd_model")) {
    rc.apd_path = resolve(base, *file);
    rc.apd = load_apd_model(rc.apd_path);
  } else {
    rc.apd = detector::default_ingaas_apd();
  }
  apply_apd_overrides(rc.apd, section(root, "apd"));
  const Tree& sp = section(root, "spcm");
  rc.spcm.efficiency = detail::get_double(sp, "efficiency", rc.spcm.efficiency);
  rc.spcm.dark_rate_per_s = detail::get_double(sp, "dark_rate_per_s", rc.spcm.dark_rate_per_s);
  rc.spcm.validate();

  if (auto sweep = detail::get_string(section(root, "detector_sweep"), "overbias_range_V"))
    rc.overbias_sweep = parse_range(*sweep);

  return rc;
}

}  // namespace pairsim::config

#include "pairsim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "pairsim/config.hpp"
#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"

namespace pairsim::cli {
namespace {

namespace fs = std::filesystem;
using csv::format_number;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  bool analytic = false;
  std::uint64_t triggers = 0;
  std::string temp_range;
  double temp = 0.0;
  double overbias = 0.0;
  std::string overbias_range;
  std::vector<std::string> sets;
  unsigned shards = 1;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* triggers_opt = nullptr;
  CLI::Option* temp_opt = nullptr;
  CLI::Option* overbias_opt = nullptr;
};

/// Routes CSV artifacts and the human-readable report.
class Output {
 public:
  Output(std::string dir, std::ostream& out, std::ostream& err)
      : dir_(std::move(dir)), out_(out), err_(err) {
    if (!dir_.empty()) {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw ConfigError("cannot create output directory '" + dir_ + "': " + ec.message());
    }
  }

  std::ostream& report() { return dir_.empty() ? err_ : out_; }
  bool writes_files() const { return !dir_.empty(); }

  void artifact(const std::string& name, const std::string& content) {
    if (dir_.empty()) {
      out_ << content;
      return;
    }
    const fs::path path = fs::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << content;
    report() << "wrote " << path.string() << '\n';
  }

 private:
  std::string dir_;
  std::ostream& out_;
  std::ostream& err_;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

config::RunConfig load(const Options& o) {
  config::Overrides overrides;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  const fs::path path =
      o.config.empty() ? config::shipped_data_dir() / "operating_point.ini" : fs::path(o.config);
  auto rc = config::load_run_config(path, overrides);
  if (o.seed_opt && o.seed_opt->count()) rc.seed = o.seed;
  if (o.triggers_opt && o.triggers_opt->count()) {
    if (o.triggers == 0) throw ConfigError("--triggers must be >= 1");
    rc.experiment.n_triggers = o.triggers;
    rc.experiment.duration_s.reset();
  }
  if (o.overbias_opt && o.overbias_opt->count()) rc.overbias_V = o.overbias;
  if (!o.overbias_range.empty()) rc.overbias_sweep = config::parse_range(o.overbias_range);
  if (!o.temp_range.empty()) {
    const auto r = config::parse_range(o.temp_range);
    rc.phase_matching.tune_lo_C = r.lo;
    rc.phase_matching.tune_hi_C = r.hi;
    rc.phase_matching.tune_step_C = r.step;
  }
  if (o.temp_opt && o.temp_opt->count()) rc.phase_matching.operating_temperature_C = o.temp;
  return rc;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the headline figures used by `repro`.

struct Figure {
  std::string name;
  double achieved;
  double target;
  double lower;
  double upper;
};

using Figures = std::vector<Figure>;

Figures cmd_tune(const config::RunConfig& rc, Output& io) {
  const auto& pm = rc.phase_matching;
  const auto curve = qpm::tuning_curve(rc.crystal, rc.dispersion, pm.pump_nm, pm.tune_lo_C,
                                       pm.tune_hi_C, pm.tune_step_C, pm.signal_bracket);
  std::ostringstream body;
  csv::Writer w(body);
  w.header({"T_C", "lambda_s_nm", "lambda_i_nm"});
  for (const auto& r : curve.rows) w.row(r.temperature_C, r.signal_nm, r.idler_nm);
  io.artifact("tuning_curve.csv", body.str());

  auto& rep = io.report();
  rep << "tuning curve: " << curve.rows.size() << " rows, " << curve.failures.size()
      << " failed solves\n";
  for (const auto& f : curve.failures)
    rep << "  failed at " << format_number(f.temperature_C) << " C: " << f.reason << '\n';
  rep << "poling period: " << fixed(rc.raw_poling_period_um, 4) << " um as written";
  if (rc.calibration)
    rep << ", " << fixed(rc.crystal.poling_period_um, 4) << " um calibrated at "
        << format_number(rc.calibration->signal_nm) << " nm / "
        << format_number(rc.calibration->temperature_C) << " C";
  rep << '\n';

  Figures figs;
  const auto op = qpm::solve_signal(rc.crystal, rc.dispersion, pm.pump_nm,
                                    pm.operating_temperature_C, pm.signal_bracket);
  rep << "operating point " << format_number(pm.operating_temperature_C) << " C: signal "
      << fixed(op.signal_nm, 3) << " nm, idler " << fixed(op.idler_nm, 3) << " nm\n";
  figs.push_back({"signal_nm", op.signal_nm, 808.0, 803.0, 813.0});
  figs.push_back({"idler_nm", op.idler_nm, 1559.0, 1544.0, 1574.0});

  const auto coef = qpm::tuning_coefficient(rc.crystal, rc.dispersion, pm.pump_nm,
                                            pm.tuning_report_temperature_C, 1.0, pm.signal_bracket);
  rep << "tuning coefficient at " << format_number(pm.tuning_report_temperature_C)
      << " C: idler " << fixed(coef.idler_nm_per_C, 4) << " nm/C, signal "
      << fixed(coef.signal_nm_per_C, 4) << " nm/C\n";
  if (curve.rows.size() >= 2) {
    const auto& a = curve.rows.front();
    const auto& b = curve.rows.back();
    rep << "mean idler slope over range: "
        << fixed((b.idler_nm - a.idler_nm) / (b.temperature_C - a.temperature_C), 4) << " nm/C\n";
  }
  figs.push_back({"tuning_idler_nm_per_C", std::abs(coef.idler_nm_per_C), 1.3, 0.65, 1.95});
  return figs;
}

Figures cmd_spectrum(const config::RunConfig& rc, Output& io) {
  const auto& pm = rc.phase_matching;
  const auto sol = qpm::solve_signal(rc.crystal, rc.dispersion, pm.pump_nm,
                                     pm.operating_temperature_C, pm.signal_bracket);
  const auto spectrum = qpm::pm_spectrum(rc.crystal, rc.dispersion, sol, pm.spectrum_span_nm,
                                         pm.spectrum_points);
  std::ostringstream body;
  csv::Writer w(body);
  w.header({"lambda_i_nm", "rel_eff"});
  for (const auto& s : spectrum) w.row(s.idler_nm, s.relative_efficiency);
  io.artifact("pm_spectrum.csv", body.str());

  const auto bw = qpm::fwhm_bandwidth(rc.crystal, rc.dispersion, sol);
  io.report() << "solution at " << format_number(pm.operating_temperature_C) << " C: signal "
              << fixed(sol.signal_nm, 3) << " nm, idler " << fixed(sol.idler_nm, 3) << " nm\n"
              << "FWHM (idler): " << fixed(bw.width_nm, 4) << " nm = " << fixed(bw.width_GHz, 2)
              << " GHz  [" << fixed(bw.lower_nm, 4) << ", " << fixed(bw.upper_nm, 4) << "] nm\n";
  return {{"fwhm_nm", bw.width_nm, 1.26, 1.008, 1.512},
          {"fwhm_GHz", bw.width_GHz, 150.0, 120.0, 180.0}};
}

Figures cmd_budget(const config::RunConfig& rc, Output& io) {
  const auto& s = rc.source;
  std::ostringstream body;
  source::write_budget_csv(body, s.conditional_chain);
  io.artifact("budget.csv", body.str());

  auto& rep = io.report();
  rep << "conditional detection budget\n";
  source::write_budget_text(rep, s.conditional_chain);
  Figures figs;
  const double eta = source::chain_efficiency(s.conditional_chain);
  figs.push_back({"budget_eta_c", eta, 0.0306, 0.0306 - 1e-12, 0.0306 + 1e-12});

  if (s.coupling_and_matching && s.fiber_coupling) {
    const auto mm = source::mode_matching_ratio(*s.coupling_and_matching, *s.fiber_coupling);
    rep << "mode matching: " << fixed(100.0 * mm.ratio, 1) << "%"
        << (mm.inconsistent ? "  WARNING: exceeds 100%, inputs inconsistent" : "") << '\n';
    figs.push_back({"mode_matching", mm.ratio, 0.36, 0.36 - 1e-12, 0.36 + 1e-12});
  }
  if (!s.signal_inference_chain.empty()) {
    rep << "single-mode signal inference\n";
    source::write_budget_text(rep, s.signal_inference_chain);
    const double inferred =
        source::infer_generation_rate(s.detected_singlemode_rate_per_s_mW, s.signal_inference_chain);
    rep << "inferred single-mode generation rate: " << format_number(inferred) << " /s/mW\n"
        << "multimode / single-mode rate ratio: "
        << format_number(s.multimode_pair_rate_per_s_mW / inferred) << '\n';
    figs.push_back({"inferred_singlemode_rate", inferred, 1.31e5, 1.30e5, 1.32e5});
  }
  const auto rates = source::rate_figures(s.multimode_pair_rate_per_s_mW, s.bandwidth_GHz);
  rep << "spectral brightness: " << format_number(rates.spectral_brightness)
      << " pairs/s/GHz/mW (" << format_number(rates.pair_rate_per_mW) << " /s/mW over "
      << format_number(rates.bandwidth_GHz) << " GHz)\n";
  figs.push_back({"spectral_brightness", rates.spectral_brightness, 9.33e4, 9.32e4, 9.34e4});

  const double d_eff =
      source::d_eff_qpm(rc.crystal.qpm_order, rc.crystal.duty_cycle, s.d33_pm_per_V);
  rep << "ideal d_eff (order " << rc.crystal.qpm_order << ", D = " << format_number(rc.crystal.duty_cycle)
      << "): " << fixed(d_eff, 3) << " pm/V";
  if (s.measured_d_eff_pm_per_V)
    rep << ", measured " << format_number(*s.measured_d_eff_pm_per_V) << " pm/V";
  rep << '\n';
  return figs;
}

Figures cmd_detector(const config::RunConfig& rc, Output& io) {
  const auto& sw = rc.overbias_sweep;
  const auto n = static_cast<long>(std::floor((sw.hi - sw.lo) / sw.step + 1e-9));
  std::ostringstream body;
  csv::Writer w(body);
  w.header({"overbias_V", "qe", "dark_prob_per_gate", "dark_count_rate_per_s", "clamped"});
  const double per_gate = detector::dark_prob(rc.apd, rc.apd.gate_length_ns);
  const double rate = per_gate / (rc.apd.gate_length_ns * 1e-9);
  std::size_t clamped = 0;
  for (long k = 0; k <= n; ++k) {
    const double v = sw.lo + static_cast<double>(k) * sw.step;
    const auto qe = detector::qe_at_overbias(rc.apd, v);
    clamped += qe.clamped;
    w.row(v, qe.efficiency, per_gate, rate, qe.clamped);
  }
  io.artifact("detector_curve.csv", body.str());
  const double at_op = detector::qe_at_overbias(rc.apd, rc.overbias_V).efficiency;
  io.report() << "APD at " << format_number(rc.apd.temperature_C) << " C, "
              << format_number(rc.apd.gate_length_ns) << " ns gate: QE "
              << fixed(100.0 * at_op, 2) << "% at " << format_number(rc.overbias_V)
              << " V overbias, dark " << format_number(per_gate) << " per gate ("
              << format_number(rate) << " /s gated)\n";
  if (clamped) io.report() << "warning: " << clamped << " sweep points clamped to the curve ends\n";
  return {{"apd_qe_at_operating_overbias", at_op, 0.20, 0.195, 0.205}};
}

Figures cmd_simulate(const config::RunConfig& rc, const Options& o, Output& io) {
  if (!o.analytic && !rc.seed)
    throw ConfigError("simulate needs an explicit seed (--seed N or run.seed)");
  const auto& e = rc.experiment;
  const auto expected = montecarlo::analytic_expectation(e, rc.apd, rc.spcm, rc.overbias_V);
  const auto observed = o.analytic ? expected
                                   : montecarlo::simulate(e, rc.apd, rc.spcm, rc.overbias_V,
                                                          *rc.seed, o.shards);
  const auto budget = montecarlo::trigger_budget(e, rc.apd, rc.spcm);
  const auto window = montecarlo::best_window(observed, e.coincidence_window_ns);
  const auto window_expected = montecarlo::best_window(expected, e.coincidence_window_ns);

  std::ostringstream body;
  montecarlo::write_histogram_csv(body, observed, expected);
  io.artifact("histogram.csv", body.str());

  std::ostringstream summary;
  summary << "mode = " << (o.analytic ? "analytic" : "monte-carlo") << '\n';
  if (!o.analytic) summary << "seed = " << *rc.seed << "\nshards = " << o.shards << '\n';
  summary << "n_triggers = " << observed.n_triggers << '\n'
          << "eta_c_total = " << format_number(observed.eta_c_total) << '\n'
          << "expected_eta_c_total = " << format_number(expected.eta_c_total) << '\n'
          << "gross_total = " << format_number(observed.gross_total) << '\n'
          << "accidental_total = " << format_number(observed.accidental_total) << '\n'
          << "window_ns = " << format_number(e.coincidence_window_ns) << '\n'
          << "window_start_ns = " << format_number(observed.bin_edges_ns[window.first_bin]) << '\n'
          << "window_sum = " << format_number(window.gross) << '\n'
          << "window_net = " << format_number(window.net) << '\n'
          << "expected_window_fraction = "
          << format_number(window_expected.net / expected.eta_c_total) << '\n'
          << "p_pair_given_trigger = " << format_number(montecarlo::pair_probability(e)) << '\n'
          << "raw_trigger_rate_per_s = " << format_number(budget.raw_trigger_rate_per_s) << '\n'
          << "accepted_trigger_rate_per_s = " << format_number(budget.accepted_trigger_rate_per_s)
          << '\n'
          << "discard_fraction = " << format_number(budget.discard_fraction) << '\n'
          << "afterpulse_prob_per_gate = " << format_number(budget.afterpulse_prob) << '\n'
          << "fiber_delay_ns = " << format_number(e.fiber_delay_ns) << '\n';
  io.report() << summary.str();
  if (io.writes_files()) io.artifact("simulate_summary.txt", summary.str());
  return {{"eta_c_total", observed.eta_c_total, 0.0306, 0.0290, 0.0322},
          {"expected_window_fraction", window_expected.net / expected.eta_c_total, 0.95, 0.95, 1.0}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-pair source, detector and coincidence simulator", "pairsim"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration file (default: shipped operating point)");
    sub->add_option("--out", o.out, "Output directory (default: CSV to stdout, report to stderr)");
    sub->add_option("--set", o.sets, "Override a config entry: section.key=value (repeatable)");
  };

  auto* tune = app.add_subcommand("tune", "Temperature tuning curve and tuning coefficient");
  common(tune);
  tune->add_option("--temp-range", o.temp_range, "A:B:STEP in C");

  auto* spectrum = app.add_subcommand("spectrum", "sinc^2 phase-matching spectrum and FWHM");
  common(spectrum);
  o.temp_opt = spectrum->add_option("--temp", o.temp, "Crystal temperature in C");

  auto* budget = app.add_subcommand("budget", "Efficiency budget, rates and brightness");
  common(budget);

  auto* det = app.add_subcommand("detector-curve", "QE and dark probability versus overbias");
  det->alias("detector");
  common(det);
  det->add_option("--overbias-range", o.overbias_range, "A:B:STEP in V");
  auto* det_overbias = det->add_option("--overbias", o.overbias, "Operating overbias in V");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo coincidence histogram");
  common(sim);
  o.seed_opt = sim->add_option("--seed", o.seed, "Random seed (required unless --analytic)");
  sim->add_flag("--analytic", o.analytic, "Emit the exact expectation instead of sampling");
  o.triggers_opt = sim->add_option("--triggers", o.triggers, "Number of triggers");
  o.overbias_opt = sim->add_option("--overbias", o.overbias, "APD overbias in V");
  sim->add_option("--shards", o.shards, "Independent seeded shards run in parallel")
      ->check(CLI::PositiveNumber);

  auto* repro = app.add_subcommand("repro", "Run every subcommand and write a manifest");
  common(repro);
  auto* repro_seed = repro->add_option("--seed", o.seed, "Random seed (required)");
  repro->add_option("--triggers", o.triggers, "Number of triggers");

  std::vector<std::string> argv_tail(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_tail);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  if (det_overbias->count()) o.overbias_opt = det_overbias;
  if (repro->parsed()) {
    o.seed_opt = repro_seed;
    o.triggers_opt = repro->get_option("--triggers");
  }

  try {
    auto rc = load(o);
    if (tune->parsed()) {
      Output io(o.out, out, err);
      cmd_tune(rc, io);
    } else if (spectrum->parsed()) {
      Output io(o.out, out, err);
      cmd_spectrum(rc, io);
    } else if (budget->parsed()) {
      Output io(o.out, out, err);
      cmd_budget(rc, io);
    } else if (det->parsed()) {
      Output io(o.out, out, err);
      cmd_detector(rc, io);
    } else if (sim->parsed()) {
      Output io(o.out, out, err);
      cmd_simulate(rc, o, io);
    } else if (repro->parsed()) {
      if (!rc.seed) throw ConfigError("repro needs an explicit seed (--seed N or run.seed)");
      Output io(o.out.empty() ? rc.output_dir.string() : o.out, out, err);
      Figures all;
      const auto append = [&](Figures f) { all.insert(all.end(), f.begin(), f.end()); };
      append(cmd_tune(rc, io));
      all.push_back({"raw_calibrated_period_um",
                     qpm::calibrate_period(rc.crystal, rc.dispersion, rc.phase_matching.pump_nm,
                                           808.0, 142.0),
                     21.6, 21.1, 22.1});
      append(cmd_spectrum(rc, io));
      append(cmd_budget(rc, io));
      append(cmd_detector(rc, io));
      append(cmd_simulate(rc, o, io));

      std::ostringstream manifest;
      csv::Writer w(manifest);
      w.header({"figure", "achieved", "target", "lower", "upper", "pass"});
      bool all_pass = true;
      for (const auto& f : all) {
        const bool pass = f.achieved >= f.lower && f.achieved <= f.upper;
        all_pass = all_pass && pass;
        w.row(f.name, f.achieved, f.target, f.lower, f.upper, pass);
      }
      io.artifact("manifest.csv", manifest.str());
      io.report() << "repro: " << (all_pass ? "all figures within tolerance" : "SOME FIGURES OUT OF TOLERANCE")
                  << '\n';
    }
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kSuccess;
}

}  // namespace pairsim::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "pairsim/detector.hpp"
#include "pairsim/source.hpp"

namespace pairsim::montecarlo {

/// Triggered coincidence measurement. Times are relative to the moment the
/// APD gate opens; the histogram spans [0, window_ns) in bins of bin_width_ns.
struct ExperimentConfig {
  double pump_power_mW = 1.5;
  double singlemode_pair_rate_per_s_mW = 1.31e5;
  source::LossChain signal_chain;  ///< pair source to SPCM, excluding the SPCM efficiency
  source::LossChain idler_chain;   ///< pair source to APD, excluding the APD QE
  bool pairs_enabled = true;
  double fiber_delay_ns = 342.77;
  double gate_open_lead_ns = 8.0;  ///< idler arrival after gate opening
  double max_trigger_rate_per_s = 1e4;
  double bin_width_ns = 2.0;
  double window_ns = 20.0;
  double coincidence_window_ns = 4.0;
  std::uint64_t n_triggers = 1'000'000;
  std::optional<double> duration_s;  ///< when set, n_triggers = accepted rate * duration

  /// Throws ConfigError on a violated invariant.
  void validate() const;
  std::size_t n_bins() const;
};

/// Configuration of the 808/1559 nm measurement: idler chain 0.85 x 0.18.
ExperimentConfig default_experiment();

struct TriggerBudget {
  double pair_trigger_rate_per_s;  ///< SPCM clicks from signal photons
  double dark_trigger_rate_per_s;
  double raw_trigger_rate_per_s;
  double accepted_trigger_rate_per_s;  ///< min(raw, max_trigger_rate)
  double discard_fraction;
  double trigger_spacing_us;  ///< mean spacing of accepted triggers
  double afterpulse_prob;     ///< per gate following a click
  bool gate_blind_after_click;  ///< spacing shorter than the APD deadband
  std::uint64_t n_triggers;
};

/// Probability that the conjugate idler of a trigger reaches the APD.
double pair_probability(const ExperimentConfig& config);

TriggerBudget trigger_budget(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                             const detector::SpcmModel& spcm);

struct CoincidenceHistogram {
  std::vector<double> bin_edges_ns;
  std::vector<double> conditional_prob;  ///< clicks per trigger in each bin
  std::vector<double> accidental_level;  ///< expected pairs-free level in each bin
  std::vector<std::uint64_t> counts;     ///< raw click counts; empty for expectations
  std::uint64_t n_triggers = 0;
  /// Accidental-subtracted conditional detection probability over the window.
  double eta_c_total = 0.0;
  double gross_total = 0.0;
  double accidental_total = 0.0;

  std::size_t n_bins() const noexcept { return conditional_prob.size(); }
};

/// Runs `shards` independently seeded shards (stream = (seed, shard index)),
/// in parallel, and merges them in shard order. The result depends on the
/// shard count, never on thread scheduling.
CoincidenceHistogram simulate(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                              const detector::SpcmModel& spcm, double overbias_V,
                              std::uint64_t seed, unsigned shards = 1);

/// One shard with its own stream; afterpulse state starts cleared.
CoincidenceHistogram simulate_shard(const ExperimentConfig& config,
                                    const detector::GatedApdModel& apd,
                                    const detector::SpcmModel& spcm, double overbias_V,
                                    std::uint64_t seed, std::uint64_t shard,
                                    std::uint64_t n_triggers);

/// Sums counts; both must carry counts and share bin edges.
CoincidenceHistogram merge(const CoincidenceHistogram& a, const CoincidenceHistogram& b);

/// Exact per-bin expectation of simulate() in the stationary regime.
CoincidenceHistogram analytic_expectation(const ExperimentConfig& config,
                                          const detector::GatedApdModel& apd,
                                          const detector::SpcmModel& spcm, double overbias_V);

struct WindowSum {
  std::size_t first_bin;
  std::size_t n_bins;
  double gross;  ///< sum of conditional_prob
  double net;    ///< with accidental_level subtracted
};

/// Contiguous window of the given width with the largest conditional_prob sum.
/// Throws RangeError if the width is not a whole number of bins or exceeds the histogram.
WindowSum best_window(const CoincidenceHistogram& hist, double window_ns);

/// best_window(hist, window).gross
double coincidence_window_sum(const CoincidenceHistogram& hist, double window_ns);

/// Histogram CSV: bin_start_ns,bin_end_ns,conditional_prob,expected_prob,accidental_level.
void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& observed,
                         const CoincidenceHistogram& expected);

}  // namespace pairsim::montecarlo

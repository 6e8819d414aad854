#include "pairsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>

#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/random.hpp"

namespace pairsim::montecarlo {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double overlap(double lo, double hi, double a, double b) {
  return std::max(0.0, std::min(hi, b) - std::max(lo, a));
}

std::vector<double> make_edges(const ExperimentConfig& config) {
  std::vector<double> edges(config.n_bins() + 1);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = static_cast<double>(i) * config.bin_width_ns;
  return edges;
}

/// Two-state chain on "previous gate clicked".
struct GateChain {
  double pair_qe;       ///< p_pair * effective QE
  double background0;   ///< background probability after a quiet gate
  double background1;   ///< ... after a click
  bool blind_after_click;
  double stationary_click;  ///< stationary P(previous gate clicked)
};

GateChain gate_chain(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                     const TriggerBudget& budget, double overbias_V, bool with_pairs) {
  GateChain c{};
  c.pair_qe = with_pairs ? pair_probability(config) *
                               detector::effective_qe(apd, overbias_V, config.gate_open_lead_ns)
                         : 0.0;
  c.background0 = detector::background_prob(apd, 0.0);
  c.background1 = detector::background_prob(apd, budget.afterpulse_prob);
  c.blind_after_click = budget.gate_blind_after_click;
  const double click0 = 1.0 - (1.0 - c.pair_qe) * (1.0 - c.background0);
  const double click1 =
      c.blind_after_click ? 0.0 : 1.0 - (1.0 - c.pair_qe) * (1.0 - c.background1);
  c.stationary_click = click0 / (1.0 - click1 + click0);
  return c;
}

/// Expected clicks per trigger in [lo, hi) for a given background probability.
double bin_expectation(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                       double pair_qe, double background, double lo, double hi) {
  const double gate = apd.gate_length_ns;
  const double arrival = config.gate_open_lead_ns;
  const double sigma = apd.jitter_sigma_ns;
  double jitter_mass;
  if (sigma > 0.0)
    jitter_mass = normal_cdf((hi - arrival) / sigma) - normal_cdf((lo - arrival) / sigma);
  else
    jitter_mass = (arrival >= lo && arrival < hi) ? 1.0 : 0.0;
  // A background avalanche before the photon preempts it, and vice versa.
  const double photon = pair_qe * (1.0 - background * arrival / gate) * jitter_mass;
  const double dark = background / gate *
                      (overlap(lo, hi, 0.0, gate) - pair_qe * overlap(lo, hi, arrival, gate));
  return photon + dark;
}

std::vector<double> expected_bins(const ExperimentConfig& config,
                                  const detector::GatedApdModel& apd, const GateChain& chain,
                                  const std::vector<double>& edges) {
  std::vector<double> out(edges.size() - 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double quiet = bin_expectation(config, apd, chain.pair_qe, chain.background0, edges[i],
                                         edges[i + 1]);
    const double after_click =
        chain.blind_after_click ? 0.0
                                : bin_expectation(config, apd, chain.pair_qe, chain.background1,
                                                  edges[i], edges[i + 1]);
    out[i] = (1.0 - chain.stationary_click) * quiet + chain.stationary_click * after_click;
  }
  return out;
}

void finalize_totals(CoincidenceHistogram& h) {
  h.gross_total = 0.0;
  h.accidental_total = 0.0;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    h.gross_total += h.conditional_prob[i];
    h.accidental_total += h.accidental_level[i];
  }
  h.eta_c_total = h.gross_total - h.accidental_total;
}

void fill_from_counts(CoincidenceHistogram& h) {
  h.conditional_prob.assign(h.counts.size(), 0.0);
  if (h.n_triggers > 0)
    for (std::size_t i = 0; i < h.counts.size(); ++i)
      h.conditional_prob[i] =
          static_cast<double>(h.counts[i]) / static_cast<double>(h.n_triggers);
  finalize_totals(h);
}

std::vector<double> accidental_levels(const ExperimentConfig& config,
                                      const detector::GatedApdModel& apd,
                                      const TriggerBudget& budget, double overbias_V,
                                      const std::vector<double>& edges) {
  return expected_bins(config, apd, gate_chain(config, apd, budget, overbias_V, false), edges);
}

void validate_inputs(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                     const detector::SpcmModel& spcm) {
  config.validate();
  apd.validate();
  spcm.validate();
  if (!(config.gate_open_lead_ns >= 0.0 && config.gate_open_lead_ns < apd.gate_length_ns))
    throw ConfigError("experiment: idler arrival (gate_open_lead) must fall inside the gate");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(pump_power_mW >= 0.0)) throw ConfigError("experiment: pump power must be >= 0");
  if (!(singlemode_pair_rate_per_s_mW >= 0.0))
    throw ConfigError("experiment: pair rate must be >= 0");
  if (!(fiber_delay_ns >= 0.0)) throw ConfigError("experiment: fiber delay must be >= 0");
  if (!(max_trigger_rate_per_s > 0.0))
    throw ConfigError("experiment: max trigger rate must be > 0");
  if (!(bin_width_ns > 0.0 && window_ns > 0.0))
    throw ConfigError("experiment: bin width and window must be > 0");
  const double ratio = window_ns / bin_width_ns;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw ConfigError("experiment: bin width must divide the window exactly");
  if (!(coincidence_window_ns > 0.0 && coincidence_window_ns <= window_ns))
    throw ConfigError("experiment: coincidence window must lie in (0, window]");
  if (duration_s ? !(*duration_s > 0.0) : n_triggers < 1)
    throw ConfigError("experiment: need at least one trigger");
}

std::size_t ExperimentConfig::n_bins() const {
  return static_cast<std::size_t>(std::llround(window_ns / bin_width_ns));
}

ExperimentConfig default_experiment() {
  ExperimentConfig c;
  c.signal_chain.add("propagation", 0.85).add("fiber_coupling", 0.50);
  c.idler_chain.add("propagation", 0.85).add("coupling_and_matching", 0.18);
  return c;
}

double pair_probability(const ExperimentConfig& config) {
  if (!config.pairs_enabled || config.pump_power_mW == 0.0) return 0.0;
  return source::chain_efficiency(config.idler_chain);
}

TriggerBudget trigger_budget(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                             const detector::SpcmModel& spcm) {
  TriggerBudget b{};
  b.pair_trigger_rate_per_s = config.pump_power_mW * config.singlemode_pair_rate_per_s_mW *
                              source::chain_efficiency(config.signal_chain) * spcm.efficiency;
  b.dark_trigger_rate_per_s = spcm.dark_rate_per_s;
  b.raw_trigger_rate_per_s = b.pair_trigger_rate_per_s + b.dark_trigger_rate_per_s;
  b.accepted_trigger_rate_per_s = std::min(b.raw_trigger_rate_per_s, config.max_trigger_rate_per_s);
  b.discard_fraction = b.raw_trigger_rate_per_s > 0.0
                           ? 1.0 - b.accepted_trigger_rate_per_s / b.raw_trigger_rate_per_s
                           : 0.0;
  // With no trigger source at all, gates are still spaced at the cap.
  const double rate = b.accepted_trigger_rate_per_s > 0.0 ? b.accepted_trigger_rate_per_s
                                                          : config.max_trigger_rate_per_s;
  b.trigger_spacing_us = 1e6 / rate;
  b.afterpulse_prob = detector::afterpulse_prob(apd.afterpulse, b.trigger_spacing_us, apd.temperature_C);
  b.gate_blind_after_click = b.trigger_spacing_us * 1e3 < apd.deadband_ns;
  if (config.duration_s)
    b.n_triggers = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::llround(rate * *config.duration_s)));
  else
    b.n_triggers = config.n_triggers;
  return b;
}

CoincidenceHistogram simulate_shard(const ExperimentConfig& config,
                                    const detector::GatedApdModel& apd,
                                    const detector::SpcmModel& spcm, double overbias_V,
                                    std::uint64_t seed, std::uint64_t shard,
                                    std::uint64_t n_triggers) {
  validate_inputs(config, apd, spcm);
  const auto budget = trigger_budget(config, apd, spcm);
  const double p_pair = pair_probability(config);

  CoincidenceHistogram h;
  h.bin_edges_ns = make_edges(config);
  h.accidental_level = accidental_levels(config, apd, budget, overbias_V, h.bin_edges_ns);
  h.counts.assign(config.n_bins(), 0);
  h.n_triggers = n_triggers;

  // Draw order per trigger: pair survival, photon avalanche, background
  // avalanche, background time, two jitter uniforms.
  RandomStream rng(seed, shard);
  bool previous_clicked = false;
  for (std::uint64_t t = 0; t < n_triggers; ++t) {
    const double u_pair = rng.uniform();
    detector::GateDraws draws;
    draws.photon = rng.uniform();
    draws.background = rng.uniform();
    draws.background_time = rng.uniform();
    draws.jitter_u1 = rng.uniform();
    draws.jitter_u2 = rng.uniform();

    if (previous_clicked && budget.gate_blind_after_click) {
      previous_clicked = false;
      continue;
    }
    std::optional<double> arrival;
    if (u_pair < p_pair) arrival = config.gate_open_lead_ns;
    const auto outcome = detector::detect_in_gate(
        apd, arrival, overbias_V, draws, previous_clicked ? budget.afterpulse_prob : 0.0);
    previous_clicked = outcome.clicked;
    if (!outcome.clicked) continue;
    const double time = *outcome.click_time_ns;
    if (time < 0.0 || time >= config.window_ns) continue;
    const auto bin = std::min(static_cast<std::size_t>(time / config.bin_width_ns),
                              h.counts.size() - 1);
    ++h.counts[bin];
  }
  fill_from_counts(h);
  return h;
}

CoincidenceHistogram simulate(const ExperimentConfig& config, const detector::GatedApdModel& apd,
                              const detector::SpcmModel& spcm, double overbias_V,
                              std::uint64_t seed, unsigned shards) {
  validate_inputs(config, apd, spcm);
  if (shards == 0) throw ConfigError("simulate: need at least one shard");
  const std::uint64_t total = trigger_budget(config, apd, spcm).n_triggers;
  if (shards == 1) return simulate_shard(config, apd, spcm, overbias_V, seed, 0, total);

  std::vector<std::future<CoincidenceHistogram>> parts;
  for (unsigned s = 0; s < shards; ++s) {
    const std::uint64_t n = total / shards + (s < total % shards ? 1 : 0);
    parts.push_back(std::async(std::launch::async, [&, s, n] {
      return simulate_shard(config, apd, spcm, overbias_V, seed, s, n);
    }));
  }
  CoincidenceHistogram merged = parts.front().get();
  for (std::size_t s = 1; s < parts.size(); ++s) merged = merge(merged, parts[s].get());
  return merged;
}

CoincidenceHistogram merge(const CoincidenceHistogram& a, const CoincidenceHistogram& b) {
  if (a.counts.size() != a.n_bins() || b.counts.size() != b.n_bins())
    throw ConfigError("merge: histograms must carry raw counts");
  if (a.bin_edges_ns != b.bin_edges_ns) throw ConfigError("merge: bin edges differ");
  CoincidenceHistogram out;
  out.bin_edges_ns = a.bin_edges_ns;
  out.accidental_level = a.accidental_level;
  out.n_triggers = a.n_triggers + b.n_triggers;
  out.counts.resize(a.counts.size());
  for (std::size_t i = 0; i < out.counts.size(); ++i) out.counts[i] = a.counts[i] + b.counts[i];
  fill_from_counts(out);
  return out;
}

CoincidenceHistogram analytic_expectation(const ExperimentConfig& config,
                                          const detector::GatedApdModel& apd,
                                          const detector::SpcmModel& spcm, double overbias_V) {
  validate_inputs(config, apd, spcm);
  const auto budget = trigger_budget(config, apd, spcm);
  CoincidenceHistogram h;
  h.bin_edges_ns = make_edges(config);
  h.n_triggers = budget.n_triggers;
  h.conditional_prob = expected_bins(config, apd, gate_chain(config, apd, budget, overbias_V, true),
                                     h.bin_edges_ns);
  h.accidental_level = accidental_levels(config, apd, budget, overbias_V, h.bin_edges_ns);
  finalize_totals(h);
  return h;
}

WindowSum best_window(const CoincidenceHistogram& hist, double window_ns) {
  if (hist.n_bins() == 0) throw RangeError("empty histogram");
  const double bin = hist.bin_edges_ns[1] - hist.bin_edges_ns[0];
  const double ratio = window_ns / bin;
  const auto k = static_cast<long long>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(k)) > 1e-9 || k < 1)
    throw RangeError("coincidence window is not aligned to the bin edges");
  if (static_cast<std::size_t>(k) > hist.n_bins())
    throw RangeError("coincidence window is wider than the histogram");

  const auto width = static_cast<std::size_t>(k);
  WindowSum best{0, width, -1.0, 0.0};
  for (std::size_t start = 0; start + width <= hist.n_bins(); ++start) {
    double gross = 0.0, accidental = 0.0;
    for (std::size_t i = start; i < start + width; ++i) {
      gross += hist.conditional_prob[i];
      accidental += hist.accidental_level[i];
    }
    if (gross > best.gross) best = {start, width, gross, gross - accidental};
  }
  return best;
}

double coincidence_window_sum(const CoincidenceHistogram& hist, double window_ns) {
  return best_window(hist, window_ns).gross;
}

void write_histogram_csv(std::ostream& out, const CoincidenceHistogram& observed,
                         const CoincidenceHistogram& expected) {
  if (observed.n_bins() != expected.n_bins())
    throw ConfigError("histogram CSV: observed and expected bin counts differ");
  csv::Writer w(out);
  w.header({"bin_start_ns", "bin_end_ns", "conditional_prob", "expected_prob", "accidental_level"});
  for (std::size_t i = 0; i < observed.n_bins(); ++i)
    w.row(observed.bin_edges_ns[i], observed.bin_edges_ns[i + 1], observed.conditional_prob[i],
          expected.conditional_prob[i], expected.accidental_level[i]);
}

}  // namespace pairsim::montecarlo

#pragma once

#include <optional>
#include <vector>

namespace pairsim::detector {

struct QeKnot {
  double overbias_V;
  double efficiency;
};

/// Trapped-carrier afterpulsing: p0 * scale^(T_ref - T) * exp(-t / tau), capped at 1.
struct AfterpulseParams {
  double amplitude = 0.05;
  double trap_lifetime_us = 1.5;
  double temperature_scale = 1.0;  ///< multiplicative factor per degree C below reference
  double reference_temperature_C = -50.0;

  void validate() const;
};

/// Gated InGaAs APD operated in Geiger mode.
struct GatedApdModel {
  double temperature_C = -50.0;
  std::vector<QeKnot> qe_curve;
  double dark_prob_per_gate = 1.1e-3;
  double gate_length_ns = 20.0;
  AfterpulseParams afterpulse;
  double deadband_ns = 1000.0;  ///< hold-off after an avalanche; gates starting inside it are blind
  double jitter_sigma_ns = 1.0;  ///< Gaussian spread of photon click times
  bool edge_mask_enabled = false;
  double rise_ns = 3.0;
  double fall_ns = 3.0;

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

/// Knots rising smoothly from 0.5 V to 4.0 V with 20% at 3.7 V overbias, -50 C.
GatedApdModel default_ingaas_apd();

struct SpcmModel {
  double efficiency = 0.54;
  double dark_rate_per_s = 100.0;

  void validate() const;
};

struct QeLookup {
  double efficiency;
  bool clamped;  ///< overbias fell outside the tabulated span
};

/// Piecewise-linear interpolation of the QE curve, clamped at its ends.
QeLookup qe_at_overbias(const GatedApdModel& model, double overbias_V);

/// QE for a photon arriving `arrival_ns` after the gate opens, including the
/// optional linear ramps over the rise and fall edges.
double effective_qe(const GatedApdModel& model, double overbias_V, double arrival_ns);

/// Probability of a dark count within `window_ns` of the gate:
/// 1 - (1 - p_gate)^(window / gate_length). Throws RangeError unless 0 <= window <= gate.
double dark_prob(const GatedApdModel& model, double window_ns);

double afterpulse_prob(const AfterpulseParams& params, double time_since_avalanche_us,
                       double temperature_C);
double afterpulse_prob(const AfterpulseParams& params, double time_since_avalanche_us);

/// Uniform variates on [0, 1) consumed by one gate, in this order.
struct GateDraws {
  double photon = 0.0;
  double background = 0.0;
  double background_time = 0.0;
  double jitter_u1 = 0.0;
  double jitter_u2 = 0.0;
};

enum class ClickSource { kNone, kPhoton, kBackground };

struct GateOutcome {
  bool clicked = false;
  std::optional<double> click_time_ns;
  ClickSource source = ClickSource::kNone;
};

/// One armed gate. A photon (if any) avalanches with effective_qe(); a
/// background avalanche (dark count, or afterpulse with the given extra
/// probability) occurs uniformly over the gate. The earlier avalanche wins;
/// photon clicks are then jittered by N(0, jitter_sigma_ns). Throws RangeError
/// for an arrival outside [0, gate_length).
GateOutcome detect_in_gate(const GatedApdModel& model, std::optional<double> arrival_ns,
                           double overbias_V, const GateDraws& draws,
                           double afterpulse_probability = 0.0);

/// Background avalanche probability over the full gate with an extra afterpulse term.
double background_prob(const GatedApdModel& model, double afterpulse_probability);

}  // namespace pairsim::detector

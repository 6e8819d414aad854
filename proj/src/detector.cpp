#include "pairsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pairsim/errors.hpp"
#include "pairsim/random.hpp"

namespace pairsim::detector {

void AfterpulseParams::validate() const {
  if (!(amplitude >= 0.0 && amplitude < 1.0))
    throw ConfigError("afterpulse amplitude must lie in [0, 1)");
  if (!(trap_lifetime_us > 0.0)) throw ConfigError("afterpulse trap lifetime must be > 0");
  if (!(temperature_scale > 0.0)) throw ConfigError("afterpulse temperature scale must be > 0");
}

void GatedApdModel::validate() const {
  if (qe_curve.empty()) throw ConfigError("APD model: empty QE curve");
  for (std::size_t i = 0; i < qe_curve.size(); ++i) {
    const auto& k = qe_curve[i];
    if (!(k.efficiency >= 0.0 && k.efficiency <= 1.0))
      throw ConfigError("APD model: QE knot efficiency outside [0, 1]");
    if (i > 0) {
      if (!(k.overbias_V > qe_curve[i - 1].overbias_V))
        throw ConfigError("APD model: QE knot overbias must be strictly increasing");
      if (k.efficiency < qe_curve[i - 1].efficiency)
        throw ConfigError("APD model: QE knots must be nondecreasing");
    }
  }
  if (!(dark_prob_per_gate >= 0.0 && dark_prob_per_gate < 1.0))
    throw ConfigError("APD model: dark probability per gate must lie in [0, 1)");
  if (!(gate_length_ns > 0.0)) throw ConfigError("APD model: gate length must be > 0");
  if (!(deadband_ns >= 0.0)) throw ConfigError("APD model: deadband must be >= 0");
  if (!(jitter_sigma_ns >= 0.0)) throw ConfigError("APD model: jitter sigma must be >= 0");
  if (edge_mask_enabled && !(rise_ns >= 0.0 && fall_ns >= 0.0 && rise_ns + fall_ns <= gate_length_ns))
    throw ConfigError("APD model: rise and fall edges must fit inside the gate");
  afterpulse.validate();
}

GatedApdModel default_ingaas_apd() {
  GatedApdModel m;
  m.qe_curve = {{0.5, 0.0556}, {1.0, 0.0978}, {1.5, 0.1297}, {2.0, 0.1539}, {2.5, 0.1722},
                {3.0, 0.1860}, {3.5, 0.1965}, {3.7, 0.2000}, {4.0, 0.2045}};
  return m;
}

void SpcmModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw ConfigError("SPCM model: efficiency outside [0, 1]");
  if (!(dark_rate_per_s >= 0.0)) throw ConfigError("SPCM model: dark rate must be >= 0");
}

QeLookup qe_at_overbias(const GatedApdModel& model, double overbias_V) {
  const auto& curve = model.qe_curve;
  if (curve.empty()) throw ConfigError("APD model: empty QE curve");
  if (overbias_V <= curve.front().overbias_V)
    return {curve.front().efficiency, overbias_V < curve.front().overbias_V};
  if (overbias_V >= curve.back().overbias_V)
    return {curve.back().efficiency, overbias_V > curve.back().overbias_V};
  const auto hi = std::upper_bound(
      curve.begin(), curve.end(), overbias_V,
      [](double v, const QeKnot& k) { return v < k.overbias_V; });
  const auto lo = hi - 1;
  const double t = (overbias_V - lo->overbias_V) / (hi->overbias_V - lo->overbias_V);
  return {lo->efficiency + t * (hi->efficiency - lo->efficiency), false};
}

double effective_qe(const GatedApdModel& model, double overbias_V, double arrival_ns) {
  const double qe = qe_at_overbias(model, overbias_V).efficiency;
  if (!model.edge_mask_enabled) return qe;
  if (model.rise_ns > 0.0 && arrival_ns < model.rise_ns) return qe * arrival_ns / model.rise_ns;
  const double fall_start = model.gate_length_ns - model.fall_ns;
  if (model.fall_ns > 0.0 && arrival_ns > fall_start)
    return qe * (model.gate_length_ns - arrival_ns) / model.fall_ns;
  return qe;
}

double dark_prob(const GatedApdModel& model, double window_ns) {
  if (!(window_ns >= 0.0) || window_ns > model.gate_length_ns) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "dark window %.6g ns outside [0, %.6g] ns", window_ns,
                  model.gate_length_ns);
    throw RangeError(buf);
  }
  return -std::expm1(window_ns / model.gate_length_ns * std::log1p(-model.dark_prob_per_gate));
}

double afterpulse_prob(const AfterpulseParams& params, double time_since_avalanche_us,
                       double temperature_C) {
  if (!(time_since_avalanche_us >= 0.0)) throw RangeError("afterpulse time must be >= 0");
  const double cold = params.reference_temperature_C - temperature_C;
  const double p = params.amplitude * std::pow(params.temperature_scale, cold) *
                   std::exp(-time_since_avalanche_us / params.trap_lifetime_us);
  return std::min(p, 1.0);
}

double afterpulse_prob(const AfterpulseParams& params, double time_since_avalanche_us) {
  return afterpulse_prob(params, time_since_avalanche_us, params.reference_temperature_C);
}

double background_prob(const GatedApdModel& model, double afterpulse_probability) {
  return 1.0 - (1.0 - model.dark_prob_per_gate) * (1.0 - afterpulse_probability);
}

GateOutcome detect_in_gate(const GatedApdModel& model, std::optional<double> arrival_ns,
                           double overbias_V, const GateDraws& draws,
                           double afterpulse_probability) {
  if (arrival_ns && !(*arrival_ns >= 0.0 && *arrival_ns < model.gate_length_ns))
    throw RangeError("photon arrival outside the gate");

  const bool photon_avalanche =
      arrival_ns && draws.photon < effective_qe(model, overbias_V, *arrival_ns);
  const bool background_avalanche =
      draws.background < background_prob(model, afterpulse_probability);
  const double background_time = draws.background_time * model.gate_length_ns;

  GateOutcome out;
  if (photon_avalanche && (!background_avalanche || *arrival_ns <= background_time)) {
    out.clicked = true;
    out.source = ClickSource::kPhoton;
    out.click_time_ns =
        *arrival_ns + model.jitter_sigma_ns * standard_normal(draws.jitter_u1, draws.jitter_u2);
  } else if (background_avalanche) {
    out.clicked = true;
    out.source = ClickSource::kBackground;
    out.click_time_ns = background_time;
  }
  return out;
}

}  // namespace pairsim::detector

#include "pairsim/source.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"

namespace pairsim::source {

LossChain::LossChain(std::vector<LossStage> stages) {
  for (auto& s : stages) add(std::move(s.name), s.efficiency);
}

LossChain& LossChain::add(std::string name, double efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw ConfigError("loss stage '" + name + "': efficiency outside [0, 1]");
  const bool duplicate = std::any_of(stages_.begin(), stages_.end(),
                                     [&](const LossStage& s) { return s.name == name; });
  if (duplicate) throw ConfigError("loss stage '" + name + "' appears twice");
  stages_.push_back({std::move(name), efficiency});
  return *this;
}

LossChain LossChain::concatenated(const LossChain& other) const {
  LossChain out = *this;
  for (const auto& s : other.stages_) out.add(s.name, s.efficiency);
  return out;
}

double chain_efficiency(const LossChain& chain) {
  double product = 1.0;
  for (const auto& s : chain.stages()) product *= s.efficiency;
  return product;
}

double infer_generation_rate(double detected_rate_per_s_mW, const LossChain& chain) {
  const double eta = chain_efficiency(chain);
  if (eta == 0.0) throw RangeError("cannot infer a generation rate through a zero-efficiency chain");
  return detected_rate_per_s_mW / eta;
}

double spectral_brightness(double pair_rate_per_s_mW, double bandwidth_GHz) {
  if (!(bandwidth_GHz > 0.0)) throw RangeError("bandwidth must be > 0 GHz");
  return pair_rate_per_s_mW / bandwidth_GHz;
}

RateFigures rate_figures(double pair_rate_per_s_mW, double bandwidth_GHz) {
  if (!(pair_rate_per_s_mW >= 0.0)) throw RangeError("pair rate must be >= 0");
  return {pair_rate_per_s_mW, bandwidth_GHz,
          spectral_brightness(pair_rate_per_s_mW, bandwidth_GHz)};
}

ModeMatching mode_matching_ratio(double coupling_and_matching, double fiber_coupling) {
  if (!(fiber_coupling > 0.0)) throw RangeError("fiber coupling must be > 0");
  const double ratio = coupling_and_matching / fiber_coupling;
  return {ratio, ratio > 1.0};
}

double d_eff_qpm(int order, double duty_cycle, double d33_pm_per_V) {
  if (order <= 0 || order % 2 == 0)
    throw ConfigError("QPM order " + std::to_string(order) + " unsupported: must be odd and positive");
  if (!(duty_cycle > 0.0 && duty_cycle < 1.0)) throw ConfigError("duty cycle must lie in (0, 1)");
  const double m_pi = order * std::numbers::pi;
  return std::abs(2.0 / m_pi * std::sin(m_pi * duty_cycle)) * d33_pm_per_V;
}

void write_budget_text(std::ostream& out, const LossChain& chain) {
  char line[160];
  std::snprintf(line, sizeof line, "%-28s %12s %12s\n", "stage", "efficiency", "cumulative");
  out << line;
  double cumulative = 1.0;
  for (const auto& s : chain.stages()) {
    cumulative *= s.efficiency;
    std::snprintf(line, sizeof line, "%-28s %11.2f%% %11.2f%%\n", s.name.c_str(),
                  100.0 * s.efficiency, 100.0 * cumulative);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-28s %12s %11.2f%%\n", "total", "", 100.0 * cumulative);
  out << line;
}

void write_budget_csv(std::ostream& out, const LossChain& chain) {
  csv::Writer w(out);
  w.header({"stage", "efficiency", "cumulative"});
  double cumulative = 1.0;
  for (const auto& s : chain.stages()) {
    cumulative *= s.efficiency;
    w.row(s.name, s.efficiency, cumulative);
  }
}

}  // namespace pairsim::source

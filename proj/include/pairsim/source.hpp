#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pairsim::source {

struct LossStage {
  std::string name;
  double efficiency;  ///< fraction in [0, 1]
};

/// Ordered, uniquely named efficiency stages.
class LossChain {
 public:
  LossChain() = default;
  explicit LossChain(std::vector<LossStage> stages);

  /// Appends a stage; throws ConfigError on a duplicate name or efficiency outside [0, 1].
  LossChain& add(std::string name, double efficiency);

  const std::vector<LossStage>& stages() const noexcept { return stages_; }
  bool empty() const noexcept { return stages_.empty(); }

  /// Stages of `*this` followed by those of `other`.
  LossChain concatenated(const LossChain& other) const;

 private:
  std::vector<LossStage> stages_;
};

/// Product of stage efficiencies (1 for an empty chain).
double chain_efficiency(const LossChain& chain);

/// detected / chain_efficiency. Throws RangeError if the chain efficiency is zero.
double infer_generation_rate(double detected_rate_per_s_mW, const LossChain& chain);

/// pair_rate / bandwidth [pairs/(s GHz mW)]. Throws RangeError for bandwidth <= 0.
double spectral_brightness(double pair_rate_per_s_mW, double bandwidth_GHz);

struct RateFigures {
  double pair_rate_per_mW = 0.0;
  double bandwidth_GHz = 0.0;
  double spectral_brightness = 0.0;
};

RateFigures rate_figures(double pair_rate_per_s_mW, double bandwidth_GHz);

struct ModeMatching {
  double ratio;
  bool inconsistent;  ///< ratio > 1: the combined figure exceeds fiber coupling alone
};

/// Signal-idler mode matching inferred by dividing out the single-mode fiber coupling.
ModeMatching mode_matching_ratio(double coupling_and_matching, double fiber_coupling);

/// Magnitude of the m-th Fourier coefficient of a rectangular poling pattern:
/// |2/(m pi) sin(m pi D)| d33. Throws ConfigError for even or nonpositive m.
double d_eff_qpm(int order, double duty_cycle, double d33_pm_per_V);

inline constexpr double kLithiumNiobateD33_pm_per_V = 25.2;

/// Plain-text table: stage, efficiency %, cumulative %.
void write_budget_text(std::ostream& out, const LossChain& chain);
/// CSV with columns stage,efficiency,cumulative (fractions).
void write_budget_csv(std::ostream& out, const LossChain& chain);

}  // namespace pairsim::source

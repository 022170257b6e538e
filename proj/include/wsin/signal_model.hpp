#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wsin {

/// Real-valued sample buffer. Sample index n runs from 0 to N-1.
using Signal = std::vector<double>;

struct SinusoidComponent {
  double amplitude = 1.0;  ///< alpha_k > 0
  double frequency = 0.0;  ///< omega_k in (0, pi), radians/sample
  double phase = 0.0;      ///< phi_k, radians
};

/// Ground truth for a synthetic target: x_n = v_n + sum_k a_k cos(w_k n + p_k).
struct TargetSpec {
  std::vector<SinusoidComponent> components;
  double noise_sigma = 0.0;
  std::size_t length = 0;
};

/// Throws ValidationError when a field is non-finite or out of range.
void validate(const TargetSpec& spec);

/// Deterministic geometric part of the target (no noise).
Signal render_clean(const TargetSpec& spec);

/// Clean render plus i.i.d. N(0, sigma^2) noise drawn from a generator seeded with `noise_seed`.
Signal synthesize(const TargetSpec& spec, std::uint64_t noise_seed);

/// Noise standard deviation giving `snr_db` against a sum of sinusoids of the given
/// amplitudes, with signal power sum_k a_k^2 / 2.
double snr_to_sigma(double snr_db, std::span<const double> amplitudes);

/// Mean power of a sinusoid bank with distinct frequencies.
double sinusoid_power(std::span<const double> amplitudes);

/// Directly parameterized bank of zero-phase cosines: s_n = sum_k a_k cos(w_k n).
struct RealBaselineModel {
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
  std::size_t length = 0;

  std::size_t size() const noexcept { return frequencies.size(); }
};

struct BaselineGradient {
  std::vector<double> frequencies;
  std::vector<double> amplitudes;
};

void validate(const RealBaselineModel& model);

Signal baseline_forward(const RealBaselineModel& model);

/// Chain rule through the cosine bank for an upstream dL/ds_n.
BaselineGradient baseline_backward(const RealBaselineModel& model,
                                   std::span<const double> upstream);

}  // namespace wsin

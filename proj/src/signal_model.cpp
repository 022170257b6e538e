#include "wsin/signal_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "wsin/error.hpp"

namespace wsin {

void validate(const TargetSpec& spec) {
  if (spec.length < 2) {
    throw ValidationError("target length must be at least 2, got " + std::to_string(spec.length));
  }
  if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) {
    throw ValidationError("noise sigma must be finite and nonnegative");
  }
  for (std::size_t k = 0; k < spec.components.size(); ++k) {
    const auto& c = spec.components[k];
    if (!std::isfinite(c.amplitude) || c.amplitude <= 0.0) {
      throw ValidationError("component " + std::to_string(k) + ": amplitude must be finite and positive");
    }
    if (!std::isfinite(c.frequency) || c.frequency <= 0.0 || c.frequency >= std::numbers::pi) {
      throw ValidationError("component " + std::to_string(k) + ": frequency must lie in (0, pi)");
    }
    if (!std::isfinite(c.phase)) {
      throw ValidationError("component " + std::to_string(k) + ": phase must be finite");
    }
  }
}

Signal render_clean(const TargetSpec& spec) {
  validate(spec);
  Signal out(spec.length, 0.0);
  for (const auto& c : spec.components) {
    for (std::size_t n = 0; n < spec.length; ++n) {
      out[n] += c.amplitude * std::cos(c.frequency * static_cast<double>(n) + c.phase);
    }
  }
  return out;
}

Signal synthesize(const TargetSpec& spec, std::uint64_t noise_seed) {
  Signal out = render_clean(spec);
  if (spec.noise_sigma > 0.0) {
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& x : out) x += noise(rng);
  }
  return out;
}

double sinusoid_power(std::span<const double> amplitudes) {
  double p = 0.0;
  for (double a : amplitudes) p += 0.5 * a * a;
  return p;
}

double snr_to_sigma(double snr_db, std::span<const double> amplitudes) {
  if (amplitudes.empty()) throw ValidationError("snr_to_sigma: empty component list");
  if (!std::isfinite(snr_db)) throw ValidationError("snr_to_sigma: SNR must be finite");
  const double power = sinusoid_power(amplitudes);
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

void validate(const RealBaselineModel& model) {
  if (model.frequencies.size() != model.amplitudes.size()) {
    throw ValidationError("baseline model: frequency and amplitude lists differ in length");
  }
  if (model.length < 1) throw ValidationError("baseline model: length must be positive");
  for (std::size_t k = 0; k < model.size(); ++k) {
    if (!std::isfinite(model.frequencies[k]) || !std::isfinite(model.amplitudes[k])) {
      throw ValidationError("baseline model: component " + std::to_string(k) + " is not finite");
    }
  }
}

Signal baseline_forward(const RealBaselineModel& model) {
  validate(model);
  Signal out(model.length, 0.0);
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double a = model.amplitudes[k];
    const std::complex<double> step = std::polar(1.0, model.frequencies[k]);
    std::complex<double> phasor{1.0, 0.0};
    for (std::size_t n = 0; n < model.length; ++n) {
      out[n] += a * phasor.real();
      phasor *= step;
    }
  }
  return out;
}

BaselineGradient baseline_backward(const RealBaselineModel& model,
                                   std::span<const double> upstream) {
  validate(model);
  if (upstream.size() != model.length) {
    throw ValidationError("baseline_backward: upstream length " + std::to_string(upstream.size()) +
                          " != model length " + std::to_string(model.length));
  }
  BaselineGradient g{std::vector<double>(model.size(), 0.0),
                     std::vector<double>(model.size(), 0.0)};
  for (std::size_t k = 0; k < model.size(); ++k) {
    const double a = model.amplitudes[k];
    const std::complex<double> step = std::polar(1.0, model.frequencies[k]);
    std::complex<double> phasor{1.0, 0.0};
    double ga = 0.0;
    double gw = 0.0;
    for (std::size_t n = 0; n < model.length; ++n) {
      ga += upstream[n] * phasor.real();
      gw -= upstream[n] * a * static_cast<double>(n) * phasor.imag();
      phasor *= step;
    }
    g.amplitudes[k] = ga;
    g.frequencies[k] = gw;
  }
  return g;
}

}  // namespace wsin

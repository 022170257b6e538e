#include "wsin/surrogate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "wsin/error.hpp"

namespace wsin {

double default_magnitude_cap(std::size_t length) {
  return 1.0 + 16.0 / static_cast<double>(length == 0 ? 1 : length);
}

void validate(const SurrogateModel& model) {
  if (model.params.empty()) throw ValidationError("surrogate model needs at least one component");
  if (model.params.size() != model.amplitudes.size()) {
    throw ValidationError("surrogate model: parameter and amplitude lists differ in length");
  }
  if (model.length < 1) throw ValidationError("surrogate model: length must be positive");
  const double cap = model.cap();
  for (std::size_t k = 0; k < model.size(); ++k) {
    const Complex z = model.params[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        !std::isfinite(model.amplitudes[k])) {
      throw ValidationError("surrogate model: component " + std::to_string(k) + " is not finite");
    }
    // small slack for the rounding left by project()
    if (std::abs(z) > cap * (1.0 + 1e-12)) {
      throw ValidationError("surrogate model: |z_" + std::to_string(k) + "| = " +
                            std::to_string(std::abs(z)) + " exceeds magnitude cap " +
                            std::to_string(cap));
    }
  }
}

Signal surrogate_forward(const SurrogateModel& model) {
  validate(model);
  Signal out(model.length, 0.0);
  for (std::size_t k = 0; k < model.size(); ++k) {
    const Complex z = model.params[k];
    const double a = model.amplitudes[k];
    Complex power{1.0, 0.0};
    for (std::size_t n = 0; n < model.length; ++n) {
      out[n] += a * power.real();
      power *= z;
    }
  }
  return out;
}

SurrogateGradient surrogate_backward(const SurrogateModel& model,
                                     std::span<const double> upstream) {
  validate(model);
  if (upstream.size() != model.length) {
    throw ValidationError("surrogate_backward: upstream length " +
                          std::to_string(upstream.size()) + " != model length " +
                          std::to_string(model.length));
  }
  SurrogateGradient g{std::vector<Complex>(model.size()), std::vector<double>(model.size(), 0.0)};
  for (std::size_t k = 0; k < model.size(); ++k) {
    const Complex z = model.params[k];
    // previous holds z^(n-1); its conjugate is conj(z)^(n-1)
    Complex previous{1.0, 0.0};
    Complex wirtinger{0.0, 0.0};
    double amp = upstream[0];
    for (std::size_t n = 1; n < model.length; ++n) {
      const double u = upstream[n];
      wirtinger += (u * static_cast<double>(n)) * std::conj(previous);
      previous *= z;
      amp += u * previous.real();
    }
    g.conj_wirtinger[k] = 0.5 * model.amplitudes[k] * wirtinger;
    g.amplitudes[k] = amp;
  }
  return g;
}

std::vector<FrequencyEstimate> extract_frequencies(const SurrogateModel& model) {
  validate(model);
  std::vector<FrequencyEstimate> out;
  out.reserve(model.size());
  for (std::size_t k = 0; k < model.size(); ++k) {
    const Complex z = model.params[k];
    if (z == Complex{0.0, 0.0}) {
      throw DegenerateParameterError(k, "surrogate parameter " + std::to_string(k) +
                                            " is zero; frequency undefined");
    }
    out.push_back({std::abs(std::arg(z)), std::abs(z), model.amplitudes[k]});
  }
  return out;
}

SurrogateModel init_params(std::size_t count, InitMode mode, std::uint64_t seed,
                           std::size_t length) {
  if (count < 1) throw ValidationError("init_params: component count must be at least 1");
  if (length < 1) throw ValidationError("init_params: length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SurrogateModel model;
  model.length = length;
  model.params.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    // angle in (-pi, pi]
    const double angle = std::numbers::pi * (1.0 - 2.0 * unit(rng));
    double radius = 1.0;
    if (mode == InitMode::InDisk) {
      double u = unit(rng);
      while (u == 0.0) u = unit(rng);
      radius = std::sqrt(u);
      if (radius >= 1.0) radius = std::nextafter(1.0, 0.0);
    }
    model.params.push_back(std::polar(radius, angle));
  }
  model.amplitudes.assign(count, 1.0 / static_cast<double>(count));
  return model;
}

}  // namespace wsin

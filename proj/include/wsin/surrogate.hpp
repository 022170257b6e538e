#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wsin/signal_model.hpp"

namespace wsin {

using Complex = std::complex<double>;

/// Largest |z| the optimizer lets a surrogate parameter reach for a length-N render.
/// Keeps |z|^N below e^16.
double default_magnitude_cap(std::size_t length);

/// Bank of damped cosines s_n = sum_k a_k Re(z_k^n), n = 0..N-1.
struct SurrogateModel {
  std::vector<Complex> params;
  std::vector<double> amplitudes;
  std::size_t length = 0;
  double magnitude_cap = 0.0;  ///< <= 0 selects default_magnitude_cap(length)

  std::size_t size() const noexcept { return params.size(); }
  double cap() const noexcept {
    return magnitude_cap > 0.0 ? magnitude_cap : default_magnitude_cap(length);
  }
};

/// Gradient of a real loss with respect to the surrogate parameters.
///
/// `conj_wirtinger[k]` holds dL/d(conj z_k). For z = x + j y the real partials are
/// dL/dx = 2 Re(dL/d conj z) and dL/dy = 2 Im(dL/d conj z).
struct SurrogateGradient {
  std::vector<Complex> conj_wirtinger;
  std::vector<double> amplitudes;

  double d_real(std::size_t k) const { return 2.0 * conj_wirtinger[k].real(); }
  double d_imag(std::size_t k) const { return 2.0 * conj_wirtinger[k].imag(); }
};

void validate(const SurrogateModel& model);

Signal surrogate_forward(const SurrogateModel& model);

/// Backpropagates an upstream dL/ds_n. Uses d Re(z^n) / d conj(z) = (n/2) conj(z)^(n-1).
SurrogateGradient surrogate_backward(const SurrogateModel& model,
                                     std::span<const double> upstream);

struct FrequencyEstimate {
  double frequency;  ///< |arg z| in [0, pi]
  double decay;      ///< |z|
  double amplitude;  ///< learned linear amplitude
};

/// Throws DegenerateParameterError for z_k == 0.
std::vector<FrequencyEstimate> extract_frequencies(const SurrogateModel& model);

enum class InitMode {
  InDisk,    ///< area-uniform over the open unit disk
  OnCircle,  ///< |z| = 1, uniform angle
};

/// Random surrogate with `count` components; amplitudes start at 1/count.
SurrogateModel init_params(std::size_t count, InitMode mode, std::uint64_t seed,
                           std::size_t length);

}  // namespace wsin

#pragma once

#include <cstddef>
#include <span>

namespace wsin {

struct CrlbQuery {
  std::size_t length = 0;
  double amplitude = 1.0;
  double noise_sigma = 0.0;

  /// eta = a^2 / (2 sigma^2)
  double snr_linear() const noexcept;
  double snr_db() const noexcept;
};

/// Builds a query whose sigma realizes `snr_db` for a single sinusoid of `amplitude`.
CrlbQuery crlb_query_from_snr(double snr_db, std::size_t length, double amplitude = 1.0);

/// Cramer-Rao bound on the variance of an unbiased frequency estimate for one real sinusoid
/// with unknown amplitude, frequency and phase in white Gaussian noise:
/// 12 / (eta N (N^2 - 1)). Throws ValidationError for sigma == 0 or N < 3.
double crlb_frequency(const CrlbQuery& query);

double freq_sq_error(double estimated, double truth);

inline constexpr double kSpectralFloorDb = -300.0;

struct DecibelValue {
  double db;
  bool at_floor;  ///< the linear value was zero and `db` holds the floor
};

/// 10 log10 of the DFT-magnitude MSE between the two signals.
DecibelValue spectral_mse_db(std::span<const double> predicted, std::span<const double> target,
                             std::size_t dft_size = 0);

/// 10 log10(x); nonpositive inputs map to the floor.
DecibelValue to_db(double linear);

double mean(std::span<const double> values);
/// Median of a copy of the values; NaN for an empty span.
double median(std::span<const double> values);

}  // namespace wsin

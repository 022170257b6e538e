#include "wsin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wsin/error.hpp"
#include "wsin/losses.hpp"

namespace wsin {

double CrlbQuery::snr_linear() const noexcept {
  return amplitude * amplitude / (2.0 * noise_sigma * noise_sigma);
}

double CrlbQuery::snr_db() const noexcept { return 10.0 * std::log10(snr_linear()); }

CrlbQuery crlb_query_from_snr(double snr_db, std::size_t length, double amplitude) {
  const double eta = std::pow(10.0, snr_db / 10.0);
  return {length, amplitude, amplitude / std::sqrt(2.0 * eta)};
}

double crlb_frequency(const CrlbQuery& q) {
  if (q.length < 3) throw ValidationError("crlb: length must be at least 3");
  if (!(q.noise_sigma > 0.0)) throw ValidationError("crlb: bound undefined for zero noise");
  if (!(q.amplitude > 0.0)) throw ValidationError("crlb: amplitude must be positive");
  const double n = static_cast<double>(q.length);
  return 12.0 / (q.snr_linear() * n * (n * n - 1.0));
}

double freq_sq_error(double estimated, double truth) {
  const double d = estimated - truth;
  return d * d;
}

DecibelValue to_db(double linear) {
  if (!(linear > 0.0)) return {kSpectralFloorDb, true};
  return {10.0 * std::log10(linear), false};
}

DecibelValue spectral_mse_db(std::span<const double> predicted, std::span<const double> target,
                             std::size_t dft_size) {
  const double mse = loss_forward({LossTag::DftMagMse, dft_size}, predicted, target);
  return to_db(mse);
}

double mean(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace wsin

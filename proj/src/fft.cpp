#include "wsin/fft.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "wsin/error.hpp"

namespace wsin {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(std::size_t size) : size_(size), fast_(is_power_of_two(size)) {
  if (size == 0) throw ValidationError("FFT size must be positive");
  const std::size_t table = fast_ ? size / 2 : size;
  twiddles_.resize(table == 0 ? 1 : table);
  for (std::size_t i = 0; i < twiddles_.size(); ++i) {
    twiddles_[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(size));
  }
  if (fast_) {
    bit_reverse_.resize(size);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size) ++bits;
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bit_reverse_[i] = r;
    }
  }
}

void FftPlan::forward(std::span<std::complex<double>> data) const { transform(data, false); }

void FftPlan::inverse_unnormalized(std::span<std::complex<double>> data) const {
  transform(data, true);
}

void FftPlan::transform(std::span<std::complex<double>> data, bool inverse) const {
  if (data.size() != size_) throw ValidationError("FFT buffer size does not match plan");
  auto twiddle = [&](std::size_t i) {
    return inverse ? std::conj(twiddles_[i]) : twiddles_[i];
  };
  if (!fast_) {
    std::vector<std::complex<double>> out(size_);
    for (std::size_t m = 0; m < size_; ++m) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t n = 0; n < size_; ++n) acc += data[n] * twiddle((m * n) % size_);
      out[m] = acc;
    }
    std::copy(out.begin(), out.end(), data.begin());
    return;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t half = 1; half < size_; half *= 2) {
    const std::size_t stride = size_ / (2 * half);
    for (std::size_t start = 0; start < size_; start += 2 * half) {
      for (std::size_t j = 0; j < half; ++j) {
        const std::complex<double> t = twiddle(j * stride) * data[start + j + half];
        const std::complex<double> u = data[start + j];
        data[start + j] = u + t;
        data[start + j + half] = u - t;
      }
    }
  }
}

std::vector<std::complex<double>> naive_dft(std::span<const double> signal, std::size_t size) {
  if (size < signal.size()) throw ValidationError("DFT size smaller than signal length");
  std::vector<std::complex<double>> out(size);
  for (std::size_t m = 0; m < size; ++m) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t n = 0; n < signal.size(); ++n) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((m * n) % size) /
                           static_cast<double>(size);
      acc += signal[n] * std::polar(1.0, angle);
    }
    out[m] = acc;
  }
  return out;
}

}  // namespace wsin

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wsin {

/// Forward DFT X_m = sum_n x_n exp(-j 2 pi m n / M) of a fixed size M.
/// Radix-2 for power-of-two sizes, direct O(M^2) evaluation otherwise.
class FftPlan {
public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  bool fast() const noexcept { return fast_; }

  /// In-place forward transform; `data.size()` must equal size().
  void forward(std::span<std::complex<double>> data) const;
  /// In-place unnormalized inverse (exp(+j...)), no 1/M factor.
  void inverse_unnormalized(std::span<std::complex<double>> data) const;

private:
  void transform(std::span<std::complex<double>> data, bool inverse) const;

  std::size_t size_;
  bool fast_;
  std::vector<std::complex<double>> twiddles_;  // exp(-j 2 pi i / M), i < M/2 (fast) or < M
  std::vector<std::size_t> bit_reverse_;
};

bool is_power_of_two(std::size_t n) noexcept;

/// O(M^2) reference transform, zero-padded to `size`.
std::vector<std::complex<double>> naive_dft(std::span<const double> signal, std::size_t size);

}  // namespace wsin

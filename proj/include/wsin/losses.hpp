#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wsin/fft.hpp"
#include "wsin/signal_model.hpp"

namespace wsin {

enum class LossTag { TimeMse, DftMagMse };

struct LossKind {
  LossTag tag = LossTag::TimeMse;
  std::size_t dft_size = 0;  ///< DftMagMse only; 0 means the signal length

  std::size_t resolved_dft_size(std::size_t length) const noexcept {
    return dft_size == 0 ? length : dft_size;
  }
};

struct Spectrum {
  std::vector<std::complex<double>> bins;

  std::vector<double> magnitudes() const;
};

/// Zero-padded DFT of `signal` to `size` bins. Throws ValidationError if size < signal length.
Spectrum dft(std::span<const double> signal, std::size_t size);

/// TimeMse: (1/N) sum (p_n - t_n)^2. DftMagMse: (1/M) sum_m (|P_m| - |T_m|)^2 over all M bins.
double loss_forward(const LossKind& kind, std::span<const double> predicted,
                    std::span<const double> target);

/// dL/dp_n. The modulus subgradient is zero at bins where |P_m| == 0.
std::vector<double> loss_backward(const LossKind& kind, std::span<const double> predicted,
                                  std::span<const double> target);

/// Loss against a fixed target with the FFT plan and target magnitudes cached.
/// Not thread-safe: holds scratch buffers.
class LossEvaluator {
public:
  LossEvaluator(LossKind kind, std::span<const double> target);

  std::size_t length() const noexcept { return target_.size(); }
  const LossKind& kind() const noexcept { return kind_; }

  double value(std::span<const double> predicted);
  /// Writes dL/dp into `gradient` (length N) and returns the loss value.
  double value_and_gradient(std::span<const double> predicted, std::span<double> gradient);

private:
  void check(std::span<const double> predicted) const;
  void spectrum_of(std::span<const double> predicted);

  LossKind kind_;
  std::vector<double> target_;
  std::size_t dft_size_ = 0;
  FftPlan plan_;
  std::vector<double> target_magnitudes_;
  std::vector<std::complex<double>> scratch_;
};

}  // namespace wsin

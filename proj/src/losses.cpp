#include "wsin/losses.hpp"

#include <string>

#include "wsin/error.hpp"

namespace wsin {

std::vector<double> Spectrum::magnitudes() const {
  std::vector<double> out(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) out[i] = std::abs(bins[i]);
  return out;
}

Spectrum dft(std::span<const double> signal, std::size_t size) {
  if (size < signal.size()) {
    throw ValidationError("dft: size " + std::to_string(size) + " is smaller than signal length " +
                          std::to_string(signal.size()));
  }
  FftPlan plan(size);
  Spectrum s;
  s.bins.assign(size, {0.0, 0.0});
  for (std::size_t n = 0; n < signal.size(); ++n) s.bins[n] = signal[n];
  plan.forward(s.bins);
  return s;
}

namespace {

std::size_t checked_dft_size(const LossKind& kind, std::size_t length) {
  const std::size_t m = kind.resolved_dft_size(length);
  if (kind.tag == LossTag::DftMagMse && m < length) {
    throw ValidationError("loss: dft_size " + std::to_string(m) + " is smaller than signal length " +
                          std::to_string(length));
  }
  return m;
}

}  // namespace

LossEvaluator::LossEvaluator(LossKind kind, std::span<const double> target)
    : kind_(kind),
      target_(target.begin(), target.end()),
      dft_size_(checked_dft_size(kind, target.size())),
      plan_(kind.tag == LossTag::DftMagMse ? dft_size_ : 1) {
  if (target.empty()) throw ValidationError("loss: empty target");
  if (kind_.tag == LossTag::DftMagMse) {
    target_magnitudes_ = dft(target_, dft_size_).magnitudes();
    scratch_.resize(dft_size_);
  }
}

void LossEvaluator::check(std::span<const double> predicted) const {
  if (predicted.size() != target_.size()) {
    throw ValidationError("loss: predicted length " + std::to_string(predicted.size()) +
                          " != target length " + std::to_string(target_.size()));
  }
}

void LossEvaluator::spectrum_of(std::span<const double> predicted) {
  std::fill(scratch_.begin(), scratch_.end(), std::complex<double>{0.0, 0.0});
  for (std::size_t n = 0; n < predicted.size(); ++n) scratch_[n] = predicted[n];
  plan_.forward(scratch_);
}

double LossEvaluator::value(std::span<const double> predicted) {
  check(predicted);
  if (kind_.tag == LossTag::TimeMse) {
    double acc = 0.0;
    for (std::size_t n = 0; n < predicted.size(); ++n) {
      const double r = predicted[n] - target_[n];
      acc += r * r;
    }
    return acc / static_cast<double>(predicted.size());
  }
  spectrum_of(predicted);
  double acc = 0.0;
  for (std::size_t m = 0; m < dft_size_; ++m) {
    const double r = std::abs(scratch_[m]) - target_magnitudes_[m];
    acc += r * r;
  }
  return acc / static_cast<double>(dft_size_);
}

double LossEvaluator::value_and_gradient(std::span<const double> predicted,
                                         std::span<double> gradient) {
  check(predicted);
  if (gradient.size() != predicted.size()) {
    throw ValidationError("loss: gradient buffer length mismatch");
  }
  const std::size_t n_samples = predicted.size();
  if (kind_.tag == LossTag::TimeMse) {
    const double scale = 2.0 / static_cast<double>(n_samples);
    double acc = 0.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
      const double r = predicted[n] - target_[n];
      acc += r * r;
      gradient[n] = scale * r;
    }
    return acc / static_cast<double>(n_samples);
  }

  spectrum_of(predicted);
  double acc = 0.0;
  // G_m = (|P_m| - |T_m|) P_m / |P_m|, then dL/dp_n = (2/M) Re(sum_m G_m e^{+j2pi mn/M})
  for (std::size_t m = 0; m < dft_size_; ++m) {
    const double mag = std::abs(scratch_[m]);
    const double r = mag - target_magnitudes_[m];
    acc += r * r;
    scratch_[m] = mag > 0.0 ? scratch_[m] * (r / mag) : std::complex<double>{0.0, 0.0};
  }
  plan_.inverse_unnormalized(scratch_);
  const double scale = 2.0 / static_cast<double>(dft_size_);
  for (std::size_t n = 0; n < n_samples; ++n) gradient[n] = scale * scratch_[n].real();
  return acc / static_cast<double>(dft_size_);
}

double loss_forward(const LossKind& kind, std::span<const double> predicted,
                    std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw ValidationError("loss: predicted length " + std::to_string(predicted.size()) +
                          " != target length " + std::to_string(target.size()));
  }
  LossEvaluator eval(kind, target);
  return eval.value(predicted);
}

std::vector<double> loss_backward(const LossKind& kind, std::span<const double> predicted,
                                  std::span<const double> target) {
  if (predicted.size() != target.size()) {
    throw ValidationError("loss: predicted length " + std::to_string(predicted.size()) +
                          " != target length " + std::to_string(target.size()));
  }
  LossEvaluator eval(kind, target);
  std::vector<double> g(predicted.size());
  eval.value_and_gradient(predicted, g);
  return g;
}

}  // namespace wsin

#include "wsin/optim.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wsin/error.hpp"

namespace wsin {

void validate(const AdamConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ValidationError("adam: learning rate must be positive");
  }
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) throw ValidationError("adam: beta1 must lie in [0, 1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) throw ValidationError("adam: beta2 must lie in [0, 1)");
  if (!(c.epsilon > 0.0)) throw ValidationError("adam: epsilon must be positive");
}

AdamState::AdamState(std::size_t parameter_count)
    : first_(parameter_count, 0.0), second_(parameter_count, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads,
                     const AdamConfig& config) {
  if (params.size() != first_.size() || grads.size() != first_.size()) {
    throw ValidationError("adam: parameter/gradient/state sizes disagree");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw DivergenceError(step_ + 1, "adam: non-finite gradient at step " +
                                           std::to_string(step_ + 1) +
                                       ", coordinate " + std::to_string(i));
    }
  }
  ++step_;
  beta1_power_ *= config.beta1;
  beta2_power_ *= config.beta2;
  const double correction1 = 1.0 - beta1_power_;
  const double correction2 = 1.0 - beta2_power_;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    first_[i] = config.beta1 * first_[i] + (1.0 - config.beta1) * g;
    second_[i] = config.beta2 * second_[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = first_[i] / correction1;
    const double v_hat = second_[i] / correction2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

FlatParameters flatten_params(const SurrogateModel& model) {
  const std::size_t k = model.size();
  FlatParameters flat{std::vector<double>(3 * k), {ModelFamily::Surrogate, k}};
  for (std::size_t i = 0; i < k; ++i) {
    flat.values[2 * i] = model.params[i].real();
    flat.values[2 * i + 1] = model.params[i].imag();
    flat.values[2 * k + i] = model.amplitudes[i];
  }
  return flat;
}

FlatParameters flatten_params(const RealBaselineModel& model) {
  const std::size_t k = model.size();
  FlatParameters flat{std::vector<double>(2 * k), {ModelFamily::Baseline, k}};
  for (std::size_t i = 0; i < k; ++i) {
    flat.values[i] = model.frequencies[i];
    flat.values[k + i] = model.amplitudes[i];
  }
  return flat;
}

std::vector<double> flatten_gradient(const SurrogateGradient& grad) {
  const std::size_t k = grad.conj_wirtinger.size();
  std::vector<double> out(3 * k);
  for (std::size_t i = 0; i < k; ++i) {
    out[2 * i] = grad.d_real(i);
    out[2 * i + 1] = grad.d_imag(i);
    out[2 * k + i] = grad.amplitudes[i];
  }
  return out;
}

std::vector<double> flatten_gradient(const BaselineGradient& grad) {
  const std::size_t k = grad.frequencies.size();
  std::vector<double> out(2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = grad.frequencies[i];
    out[k + i] = grad.amplitudes[i];
  }
  return out;
}

namespace {

void check_layout(const FlatParameters& flat, ModelFamily family, std::size_t components) {
  if (flat.layout.family != family || flat.layout.components != components ||
      flat.values.size() != flat.layout.scalar_count()) {
    throw ValidationError("unflatten: layout does not match model");
  }
}

}  // namespace

void unflatten_params(const FlatParameters& flat, SurrogateModel& model) {
  const std::size_t k = model.size();
  check_layout(flat, ModelFamily::Surrogate, k);
  for (std::size_t i = 0; i < k; ++i) {
    model.params[i] = {flat.values[2 * i], flat.values[2 * i + 1]};
    model.amplitudes[i] = flat.values[2 * k + i];
  }
}

void unflatten_params(const FlatParameters& flat, RealBaselineModel& model) {
  const std::size_t k = model.size();
  check_layout(flat, ModelFamily::Baseline, k);
  for (std::size_t i = 0; i < k; ++i) {
    model.frequencies[i] = flat.values[i];
    model.amplitudes[i] = flat.values[k + i];
  }
}

std::size_t project(SurrogateModel& model, double cap) {
  std::size_t touched = 0;
  for (auto& z : model.params) {
    const double r = std::abs(z);
    if (r > cap) {
      z *= cap / r;
      ++touched;
    }
  }
  return touched;
}

namespace {

Signal render(const SurrogateModel& m) { return surrogate_forward(m); }
Signal render(const RealBaselineModel& m) { return baseline_forward(m); }

std::vector<double> gradient_of(const SurrogateModel& m, std::span<const double> upstream) {
  return flatten_gradient(surrogate_backward(m, upstream));
}
std::vector<double> gradient_of(const RealBaselineModel& m, std::span<const double> upstream) {
  return flatten_gradient(baseline_backward(m, upstream));
}

std::size_t constrain(SurrogateModel& m) { return project(m, m.cap()); }
std::size_t constrain(RealBaselineModel&) { return 0; }

template <typename Model>
FitResult<Model> fit_impl(Model model, std::span<const double> target,
                          const FitOptions<Model>& options) {
  validate(options.adam);
  validate(model);
  if (model.length != target.size()) {
    throw ValidationError("fit: model length " + std::to_string(model.length) +
                          " != target length " + std::to_string(target.size()));
  }
  LossEvaluator loss(options.loss, target);
  FitResult<Model> result;
  FlatParameters flat = flatten_params(model);
  AdamState adam(flat.values.size());
  std::vector<double> upstream(target.size());
  const std::size_t steps = options.adam.steps;
  const std::size_t every = options.trace_every;

  for (std::size_t t = 0;; ++t) {
    const Signal rendered = render(model);
    const bool traced = (every == 0) ? (t == 0 || t == steps) : (t % every == 0);
    const double value = (t == steps)
                             ? loss.value(rendered)
                             : loss.value_and_gradient(rendered, upstream);
    if (t == 0) result.initial_loss = value;
    if (!std::isfinite(value)) {
      throw DivergenceError(t, "fit diverged: non-finite loss after " + std::to_string(t) +
                                   " updates");
    }
    if (traced) {
      const double metric = options.metric ? options.metric(model, rendered)
                                           : std::numeric_limits<double>::quiet_NaN();
      result.trace.push_back({t, value, metric});
    }
    if (t == steps) {
      result.final_loss = value;
      break;
    }
    const std::vector<double> grads = gradient_of(model, upstream);
    try {
      adam.step(flat.values, grads, options.adam);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.step(), std::string("fit diverged: ") + e.what());
    }
    unflatten_params(flat, model);
    if (constrain(model) > 0) {
      ++result.cap_activations;
      flat = flatten_params(model);
    }
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

FitResult<SurrogateModel> fit(SurrogateModel model, std::span<const double> target,
                              const FitOptions<SurrogateModel>& options) {
  return fit_impl(std::move(model), target, options);
}

FitResult<RealBaselineModel> fit(RealBaselineModel model, std::span<const double> target,
                                 const FitOptions<RealBaselineModel>& options) {
  return fit_impl(std::move(model), target, options);
}

}  // namespace wsin

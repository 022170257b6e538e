#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wsin/losses.hpp"
#include "wsin/signal_model.hpp"
#include "wsin/surrogate.hpp"

namespace wsin {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t steps = 50000;
};

void validate(const AdamConfig& config);

/// Bias-corrected Adam over a flat real parameter vector.
class AdamState {
public:
  explicit AdamState(std::size_t parameter_count = 0);

  std::size_t size() const noexcept { return first_.size(); }
  std::size_t step_count() const noexcept { return step_; }
  std::span<const double> first_moment() const noexcept { return first_; }
  std::span<const double> second_moment() const noexcept { return second_; }

  /// Updates `params` in place. Throws DivergenceError (carrying the 1-based step about to be
  /// taken) on non-finite gradients, leaving params and state untouched.
  void step(std::span<double> params, std::span<const double> grads, const AdamConfig& config);

private:
  std::vector<double> first_;
  std::vector<double> second_;
  std::size_t step_ = 0;
  double beta1_power_ = 1.0;
  double beta2_power_ = 1.0;
};

enum class ModelFamily { Surrogate, Baseline };

/// Surrogate: [x_1, y_1, ..., x_K, y_K, a_1, ..., a_K] with z_k = x_k + j y_k.
/// Baseline: [w_1, ..., w_K, a_1, ..., a_K].
struct ParameterLayout {
  ModelFamily family = ModelFamily::Surrogate;
  std::size_t components = 0;

  std::size_t scalar_count() const noexcept {
    return family == ModelFamily::Surrogate ? 3 * components : 2 * components;
  }
};

struct FlatParameters {
  std::vector<double> values;
  ParameterLayout layout;
};

FlatParameters flatten_params(const SurrogateModel& model);
FlatParameters flatten_params(const RealBaselineModel& model);
/// Real partials in surrogate layout: (2 Re g, 2 Im g) per z_k, then amplitude partials.
std::vector<double> flatten_gradient(const SurrogateGradient& grad);
std::vector<double> flatten_gradient(const BaselineGradient& grad);

/// Writes flat values back into `model`; layout must match the model's family and size.
void unflatten_params(const FlatParameters& flat, SurrogateModel& model);
void unflatten_params(const FlatParameters& flat, RealBaselineModel& model);

/// Rescales any |z_k| above `cap` onto the cap, keeping the angle.
/// Returns the number of parameters that were rescaled.
std::size_t project(SurrogateModel& model, double cap);

struct TracePoint {
  std::size_t step;
  double loss;
  double metric;  ///< NaN when no metric callback is installed
};

template <typename Model>
struct FitOptions {
  LossKind loss;
  AdamConfig adam;
  std::size_t trace_every = 100;  ///< 0 disables tracing except the final point
  /// Evaluated on traced steps with the current model and its render.
  std::function<double(const Model&, std::span<const double>)> metric;
};

template <typename Model>
struct FitResult {
  Model model;
  std::vector<TracePoint> trace;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  /// Steps after which the magnitude projection rescaled at least one parameter.
  std::size_t cap_activations = 0;
};

/// Runs forward -> loss -> backward -> Adam -> projection for `adam.steps` updates.
/// Points are traced at steps 0, trace_every, 2 trace_every, ... <= steps.
/// A non-finite loss after t updates raises DivergenceError(t).
FitResult<SurrogateModel> fit(SurrogateModel model, std::span<const double> target,
                              const FitOptions<SurrogateModel>& options);
FitResult<RealBaselineModel> fit(RealBaselineModel model, std::span<const double> target,
                                 const FitOptions<RealBaselineModel>& options);

}  // namespace wsin

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wsin/config.hpp"
#include "wsin/optim.hpp"

namespace wsin {

// ---------------------------------------------------------------------------
// Loss landscapes

struct LandscapeCurve {
  std::size_t length = 0;
  std::string loss;  ///< "mse", "mae" or "dft-mag-mse"
  std::vector<double> frequencies;
  std::vector<double> values;
};

/// Loss between cos(w n) and cos(w_hat n) for every w_hat on the grid, per length and loss.
std::vector<LandscapeCurve> compute_landscape(const LandscapeSettings& settings);

/// Strict interior local minima (v[i-1] > v[i] < v[i+1]), skipping index `exclude`.
std::size_t count_local_minima(const std::vector<double>& values, std::size_t exclude);

/// Peak-to-peak loss over grid points farther than `half_width` from the target and from
/// the band edges 0 and pi.
double off_lobe_ripple(const LandscapeCurve& curve, double target, double half_width);

/// Exclusion half-width: two main-lobe widths (2 * 2 pi / N) of the shortest length.
double landscape_exclusion_width(const LandscapeSettings& settings);

struct LandscapeSummary {
  std::size_t length = 0;
  std::string loss;
  std::size_t argmin_index = 0;
  double argmin_frequency = 0.0;
  std::size_t target_index = 0;  ///< grid point nearest the target
  std::size_t off_target_minima = 0;
  double ripple = 0.0;
};

struct LandscapeResult {
  std::vector<LandscapeCurve> curves;
  std::vector<LandscapeSummary> summaries;
};

// ---------------------------------------------------------------------------
// Run records

enum class RunStatus { Ok, Diverged };

struct SingleRunRecord {
  std::string run_id;
  std::size_t frequency_index = 0;
  std::size_t snr_index = 0;
  std::size_t seed_index = 0;
  double frequency = 0.0;
  double snr_db = 0.0;  ///< +inf for the noiseless cell
  double noise_sigma = 0.0;
  std::uint64_t init_seed = 0;
  std::uint64_t noise_seed = 0;
  Complex init_param;
  double init_amplitude = 1.0;
  Complex final_param;
  double final_amplitude = 0.0;
  double estimated_frequency = 0.0;
  double sq_error = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t cap_activations = 0;
  RunStatus status = RunStatus::Ok;
  std::size_t diverged_step = 0;
  double wall_seconds = 0.0;
};

struct SnrAggregate {
  double snr_db = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_sq_error = 0.0;
  double median_sq_error = 0.0;
  double mean_db = 0.0;
  double median_db = 0.0;
  double crlb_db = 0.0;  ///< NaN for the noiseless cell
};

struct SingleResult {
  std::vector<SingleRunRecord> runs;
  std::vector<SnrAggregate> aggregates;
};

enum class MultiModel { Surrogate, Baseline, Random };
std::string to_string(MultiModel model);

struct MultiRunRecord {
  std::string run_id;
  MultiModel model = MultiModel::Surrogate;
  std::size_t components = 0;
  std::size_t draw = 0;
  std::uint64_t target_seed = 0;
  std::uint64_t init_seed = 0;
  std::vector<double> target_frequencies;
  std::vector<double> target_amplitudes;
  std::vector<double> init_values;   ///< flattened parameters at step 0
  std::vector<double> final_values;  ///< flattened parameters at the end
  double init_spectral_db = 0.0;
  double spectral_db = 0.0;
  bool at_floor = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t cap_activations = 0;
  RunStatus status = RunStatus::Ok;
  std::size_t diverged_step = 0;
  double wall_seconds = 0.0;
};

struct MultiAggregate {
  std::size_t components = 0;
  MultiModel model = MultiModel::Surrogate;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_db = 0.0;
  double median_db = 0.0;
  double median_init_db = 0.0;
};

/// Target draw for (|K|, draw index): w ~ U(fmin, fmax), a ~ U(amin, amax) times the
/// amplitude scale, zero phase.
TargetSpec draw_multi_target(const MultiSettings& settings, std::size_t components,
                             std::uint64_t seed);

struct MultiResult {
  std::vector<MultiRunRecord> runs;
  std::vector<MultiAggregate> aggregates;
};

struct FitRunRecord {
  std::string run_id;
  ModelFamily model = ModelFamily::Surrogate;
  std::size_t components = 0;
  std::size_t length = 0;
  std::uint64_t init_seed = 0;
  std::vector<double> init_values;
  std::vector<double> final_values;
  double init_spectral_db = 0.0;
  double spectral_db = 0.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::size_t cap_activations = 0;
  std::size_t plateau_drops = 0;
  RunStatus status = RunStatus::Ok;
  std::size_t diverged_step = 0;
  std::vector<TracePoint> trace;
  double wall_seconds = 0.0;
};

struct ComponentEstimate {
  ModelFamily model;
  std::size_t index;
  double frequency;
  double decay;
  double amplitude;
  double alpha_star;  ///< NaN for the baseline or when the solve is ill-conditioned
  double combined;
};

struct FitExperimentResult {
  std::vector<FitRunRecord> runs;
  std::vector<ComponentEstimate> estimates;
  std::string estimate_status;  ///< "ok" or the amplitude-recovery error message
};

// ---------------------------------------------------------------------------
// Drivers. Each writes summary.csv (+ aggregate.csv, traces, manifest.json, timing.csv)
// under config.output_dir when `write_outputs` is set.

LandscapeResult run_landscape(const ExperimentConfig& config, bool write_outputs = true);
SingleResult run_single(const ExperimentConfig& config, bool write_outputs = true);
MultiResult run_multi(const ExperimentConfig& config, bool write_outputs = true);
/// `target_override`, when given, replaces both the synthetic spec and config.fit.input.
FitExperimentResult run_fit(const ExperimentConfig& config, bool write_outputs = true,
                            const std::optional<Signal>& target_override = std::nullopt);

/// Counts plateau-then-drop transitions in a dB-valued trace: the metric stays within 1 dB
/// for at least 10% of the run, then falls by more than 3 dB within the next 5%.
std::size_t count_plateau_drops(const std::vector<TracePoint>& trace, std::size_t total_steps);

/// Runs `count` independent jobs on up to `jobs` threads; job i writes only its own slot.
void parallel_for(std::size_t jobs, std::size_t count, const std::function<void(std::size_t)>& fn);

std::string code_version();

}  // namespace wsin

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "wsin/losses.hpp"
#include "wsin/optim.hpp"
#include "wsin/signal_model.hpp"
#include "wsin/surrogate.hpp"

namespace wsin {

enum class ExperimentKind { Landscape, Single, Multi, Fit };
enum class Scale { Desk, Paper };

/// Target amplitude draws for multi-sinusoid targets are U(min, max) times this factor.
enum class AmplitudeScale {
  InverseCount,  ///< 1 / |K|
  None,
};

enum class FitModelChoice { Surrogate, Baseline, Both };

struct LandscapeSettings {
  std::vector<std::size_t> lengths{32, 2048};
  std::size_t grid_points = 1001;
  double grid_min = 0.0;        ///< radians/sample
  double grid_max = 3.141592653589793;
  double target_frequency = 0.4 * 3.141592653589793;
};

struct SingleSettings {
  std::size_t length = 4096;
  std::size_t frequency_steps = 100;
  double frequency_min = 0.1 * 3.141592653589793;
  double frequency_max = 0.9 * 3.141592653589793;
  std::size_t snr_steps = 20;
  double snr_min_db = 0.0;
  double snr_max_db = 40.0;
  std::size_t seed_count = 10;
  bool noiseless_cell = false;  ///< adds a sigma = 0 column to the SNR grid
};

struct MultiSettings {
  std::size_t length = 4096;
  std::vector<std::size_t> component_counts{2, 8, 32};
  std::size_t draws = 2000;
  double frequency_min = 0.1 * 3.141592653589793;
  double frequency_max = 0.9 * 3.141592653589793;
  double amplitude_min = 0.1;
  double amplitude_max = 1.0;
  AmplitudeScale amplitude_scale = AmplitudeScale::InverseCount;
  std::optional<double> snr_db;  ///< noiseless when empty
  InitMode init = InitMode::OnCircle;
  bool surrogate = true;
  bool baseline = true;
  bool random_control = true;
};

struct FitSettings {
  std::size_t length = 4096;
  FitModelChoice model = FitModelChoice::Surrogate;
  std::size_t component_count = 1;
  std::vector<SinusoidComponent> components{{1.0, 0.4 * 3.141592653589793, 0.0}};
  std::optional<double> snr_db;
  double noise_sigma = 0.0;
  InitMode init = InitMode::InDisk;
  std::string input;  ///< sample file; overrides `components` when set
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Fit;
  Scale scale = Scale::Paper;
  LossKind loss;
  AdamConfig optimizer;
  std::size_t trace_every = 100;
  bool write_traces = true;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string output_dir = "out";

  LandscapeSettings landscape;
  SingleSettings single;
  MultiSettings multi;
  FitSettings fit;
};

/// Defaults for an experiment at a scale. Paper scale mirrors the published setup:
/// N = 4096, lr 1e-4, 50k steps (single) / 100k steps (multi).
ExperimentConfig default_config(ExperimentKind experiment, Scale scale);

/// Overlays a JSON document onto `base`. Unknown keys and type mismatches raise
/// ValidationError naming the JSON pointer of the offending value.
void apply_json(ExperimentConfig& base, const nlohmann::json& doc);

/// Parses config text. Malformed JSON raises ParseError with line and byte offset.
nlohmann::json parse_config_text(const std::string& text);

/// Loads a config file: reads `experiment`/`scale` (unless overridden), starts from
/// default_config and overlays the file.
ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> experiment,
                             std::optional<Scale> scale);

ExperimentConfig config_from_json(const nlohmann::json& doc,
                                  std::optional<ExperimentKind> experiment = std::nullopt,
                                  std::optional<Scale> scale = std::nullopt);

/// Full canonical config (every field); keys sorted, so dumps are stable.
nlohmann::json to_json(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

/// FNV-1a of the canonical JSON dump, as 16 hex digits. Excludes jobs and output_dir.
std::string config_hash(const ExperimentConfig& config);

std::string to_string(ExperimentKind kind);
std::string to_string(Scale scale);
std::string to_string(LossTag tag);
ExperimentKind parse_experiment(const std::string& s);
Scale parse_scale(const std::string& s);
LossTag parse_loss(const std::string& s);

}  // namespace wsin

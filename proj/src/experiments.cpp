#include "wsin/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "wsin/amplitude.hpp"
#include "wsin/error.hpp"
#include "wsin/io.hpp"
#include "wsin/metrics.hpp"

#ifndef WSIN_VERSION
#define WSIN_VERSION "0.0.0"
#endif

namespace wsin {

namespace fs = std::filesystem;

std::string code_version() { return WSIN_VERSION; }

std::string to_string(MultiModel model) {
  switch (model) {
    case MultiModel::Surrogate: return "surrogate";
    case MultiModel::Baseline: return "baseline";
    case MultiModel::Random: return "random";
  }
  return "?";
}

void parallel_for(std::size_t jobs, std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo
                        : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::string status_name(RunStatus s) { return s == RunStatus::Ok ? "ok" : "diverged"; }

std::string u64(std::uint64_t v) { return std::to_string(v); }

void write_manifest(const ExperimentConfig& config, const fs::path& dir) {
  nlohmann::json cfg = to_json(config);
  cfg.erase("jobs");
  cfg.erase("output_dir");
  nlohmann::json m;
  m["config_hash"] = config_hash(config);
  m["code_version"] = code_version();
#if defined(__linux__)
  m["platform"] = "linux";
#elif defined(__APPLE__)
  m["platform"] = "darwin";
#elif defined(_WIN32)
  m["platform"] = "windows";
#else
  m["platform"] = "unknown";
#endif
#if defined(__clang__)
  m["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  m["compiler"] = std::string("gcc ") + __VERSION__;
#else
  m["compiler"] = "unknown";
#endif
  m["config"] = cfg;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

void write_trace(const fs::path& path, const std::vector<TracePoint>& trace) {
  CsvWriter w(path, {"step", "loss", "metric"});
  for (const auto& p : trace) {
    w.row({std::to_string(p.step), format_double(p.loss), format_double(p.metric)});
  }
}

double db_or_nan(double linear) {
  return linear > 0.0 ? 10.0 * std::log10(linear) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

// ---------------------------------------------------------------------------
// Landscape

std::vector<LandscapeCurve> compute_landscape(const LandscapeSettings& s) {
  const std::vector<double> grid = linspace(s.grid_min, s.grid_max, s.grid_points);
  std::vector<LandscapeCurve> curves;
  for (std::size_t n : s.lengths) {
    TargetSpec spec{{{1.0, s.target_frequency, 0.0}}, 0.0, n};
    const Signal target = render_clean(spec);
    LossEvaluator spectral({LossTag::DftMagMse, 0}, target);
    LandscapeCurve mse{n, "mse", grid, {}};
    LandscapeCurve mae{n, "mae", grid, {}};
    LandscapeCurve dmse{n, "dft-mag-mse", grid, {}};
    for (double w : grid) {
      RealBaselineModel candidate{{w}, {1.0}, n};
      const Signal pred = baseline_forward(candidate);
      double se = 0.0;
      double ae = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = pred[i] - target[i];
        se += r * r;
        ae += std::abs(r);
      }
      mse.values.push_back(se / static_cast<double>(n));
      mae.values.push_back(ae / static_cast<double>(n));
      dmse.values.push_back(spectral.value(pred));
    }
    curves.push_back(std::move(mse));
    curves.push_back(std::move(mae));
    curves.push_back(std::move(dmse));
  }
  return curves;
}

std::size_t count_local_minima(const std::vector<double>& v, std::size_t exclude) {
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (i == exclude) continue;
    if (v[i] < v[i - 1] && v[i] < v[i + 1]) ++count;
  }
  return count;
}

double off_lobe_ripple(const LandscapeCurve& c, double target, double half_width) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.frequencies.size(); ++i) {
    const double w = c.frequencies[i];
    if (std::abs(w - target) <= half_width) continue;
    if (w <= half_width || w >= std::numbers::pi - half_width) continue;
    lo = std::min(lo, c.values[i]);
    hi = std::max(hi, c.values[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

double landscape_exclusion_width(const LandscapeSettings& s) {
  const std::size_t n_min = *std::min_element(s.lengths.begin(), s.lengths.end());
  return 2.0 * 2.0 * std::numbers::pi / static_cast<double>(n_min);
}

LandscapeResult run_landscape(const ExperimentConfig& config, bool write_outputs) {
  validate(config);
  const auto& s = config.landscape;
  LandscapeResult result;
  result.curves = compute_landscape(s);
  const double width = landscape_exclusion_width(s);
  for (const auto& c : result.curves) {
    LandscapeSummary sum;
    sum.length = c.length;
    sum.loss = c.loss;
    sum.argmin_index = static_cast<std::size_t>(
        std::min_element(c.values.begin(), c.values.end()) - c.values.begin());
    sum.argmin_frequency = c.frequencies[sum.argmin_index];
    std::size_t nearest = 0;
    for (std::size_t i = 0; i < c.frequencies.size(); ++i) {
      if (std::abs(c.frequencies[i] - s.target_frequency) <
          std::abs(c.frequencies[nearest] - s.target_frequency)) {
        nearest = i;
      }
    }
    sum.target_index = nearest;
    sum.off_target_minima = count_local_minima(c.values, nearest);
    sum.ripple = off_lobe_ripple(c, s.target_frequency, width);
    result.summaries.push_back(sum);
  }

  if (write_outputs) {
    const fs::path dir = config.output_dir;
    ensure_directory(dir);
    {
      CsvWriter w(dir / "landscape.csv", {"length", "loss", "index", "frequency", "value"});
      for (const auto& c : result.curves) {
        for (std::size_t i = 0; i < c.values.size(); ++i) {
          w.row({std::to_string(c.length), c.loss, std::to_string(i),
                 format_double(c.frequencies[i]), format_double(c.values[i])});
        }
      }
    }
    CsvWriter w(dir / "summary.csv",
                {"experiment", "scale", "config_hash", "length", "loss", "grid_points",
                 "target_frequency", "target_index", "argmin_index", "argmin_frequency",
                 "off_target_local_minima", "exclusion_half_width", "off_lobe_ripple"});
    const std::string hash = config_hash(config);
    for (const auto& sum : result.summaries) {
      w.row({"landscape", to_string(config.scale), hash, std::to_string(sum.length), sum.loss,
             std::to_string(s.grid_points), format_double(s.target_frequency),
             std::to_string(sum.target_index), std::to_string(sum.argmin_index),
             format_double(sum.argmin_frequency), std::to_string(sum.off_target_minima),
             format_double(width), format_double(sum.ripple)});
    }
    write_manifest(config, dir);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Single sinusoid grid

SingleResult run_single(const ExperimentConfig& config, bool write_outputs) {
  validate(config);
  const auto& s = config.single;
  const std::size_t n = s.length;
  const std::vector<double> freqs = linspace(s.frequency_min, s.frequency_max, s.frequency_steps);
  std::vector<double> snrs = linspace(s.snr_min_db, s.snr_max_db, s.snr_steps);
  if (s.noiseless_cell) snrs.push_back(std::numeric_limits<double>::infinity());

  std::vector<SurrogateModel> inits;
  std::vector<std::uint64_t> init_seeds;
  for (std::size_t k = 0; k < s.seed_count; ++k) {
    init_seeds.push_back(derive_seed(config.seed, {1, k}));
    SurrogateModel m = init_params(1, InitMode::InDisk, init_seeds.back(), n);
    inits.push_back(std::move(m));
  }

  const fs::path dir = config.output_dir;
  const fs::path trace_dir = dir / "traces";
  if (write_outputs) {
    ensure_directory(dir);
    if (config.write_traces) ensure_directory(trace_dir);
  }

  const std::size_t cells = freqs.size() * snrs.size() * s.seed_count;
  std::vector<SingleRunRecord> runs(cells);
  const double one[1] = {1.0};

  parallel_for(config.jobs, cells, [&](std::size_t job) {
    const auto start = Clock::now();
    const std::size_t seed_index = job % s.seed_count;
    const std::size_t snr_index = (job / s.seed_count) % snrs.size();
    const std::size_t freq_index = job / (s.seed_count * snrs.size());
    SingleRunRecord rec;
    rec.run_id = "single_f" + std::to_string(freq_index) + "_s" + std::to_string(snr_index) +
                 "_r" + std::to_string(seed_index);
    rec.frequency_index = freq_index;
    rec.snr_index = snr_index;
    rec.seed_index = seed_index;
    rec.frequency = freqs[freq_index];
    rec.snr_db = snrs[snr_index];
    rec.noise_sigma = std::isfinite(rec.snr_db) ? snr_to_sigma(rec.snr_db, one) : 0.0;
    rec.init_seed = init_seeds[seed_index];
    rec.noise_seed = derive_seed(config.seed, {2, freq_index, snr_index, seed_index});

    const SurrogateModel& init = inits[seed_index];
    rec.init_param = init.params[0];
    rec.init_amplitude = init.amplitudes[0];

    TargetSpec spec{{{1.0, rec.frequency, 0.0}}, rec.noise_sigma, n};
    const Signal target = synthesize(spec, rec.noise_seed);

    FitOptions<SurrogateModel> opts;
    opts.loss = config.loss;
    opts.adam = config.optimizer;
    opts.trace_every = config.trace_every;
    const double truth = rec.frequency;
    opts.metric = [truth](const SurrogateModel& m, std::span<const double>) {
      const Complex z = m.params[0];
      if (z == Complex{0.0, 0.0}) return std::numeric_limits<double>::quiet_NaN();
      return freq_sq_error(std::abs(std::arg(z)), truth);
    };
    try {
      auto fitted = fit(init, target, opts);
      rec.final_param = fitted.model.params[0];
      rec.final_amplitude = fitted.model.amplitudes[0];
      rec.estimated_frequency = extract_frequencies(fitted.model)[0].frequency;
      rec.sq_error = freq_sq_error(rec.estimated_frequency, truth);
      rec.initial_loss = fitted.initial_loss;
      rec.final_loss = fitted.final_loss;
      rec.cap_activations = fitted.cap_activations;
      if (write_outputs && config.write_traces) {
        write_trace(trace_dir / ("trace_" + rec.run_id + ".csv"), fitted.trace);
      }
    } catch (const DivergenceError& e) {
      rec.status = RunStatus::Diverged;
      rec.diverged_step = e.step();
      rec.sq_error = std::numeric_limits<double>::quiet_NaN();
      rec.estimated_frequency = std::numeric_limits<double>::quiet_NaN();
    } catch (const DegenerateParameterError&) {
      rec.status = RunStatus::Diverged;
      rec.diverged_step = config.optimizer.steps;
      rec.sq_error = std::numeric_limits<double>::quiet_NaN();
      rec.estimated_frequency = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_seconds = seconds_since(start);
    runs[job] = std::move(rec);
  });

  SingleResult result;
  for (std::size_t si = 0; si < snrs.size(); ++si) {
    SnrAggregate agg;
    agg.snr_db = snrs[si];
    std::vector<double> errs;
    for (const auto& r : runs) {
      if (r.snr_index != si) continue;
      ++agg.runs;
      if (r.status != RunStatus::Ok) {
        ++agg.failures;
        continue;
      }
      errs.push_back(r.sq_error);
    }
    agg.mean_sq_error = mean(errs);
    agg.median_sq_error = median(errs);
    agg.mean_db = db_or_nan(agg.mean_sq_error);
    agg.median_db = db_or_nan(agg.median_sq_error);
    agg.crlb_db = std::isfinite(agg.snr_db)
                      ? 10.0 * std::log10(crlb_frequency(crlb_query_from_snr(agg.snr_db, n)))
                      : std::numeric_limits<double>::quiet_NaN();
    result.aggregates.push_back(agg);
  }
  result.runs = std::move(runs);

  if (write_outputs) {
    const std::string hash = config_hash(config);
    const std::string scale = to_string(config.scale);
    const std::string loss = to_string(config.loss.tag);
    {
      CsvWriter w(dir / "summary.csv",
                  {"run_id", "experiment", "scale", "config_hash", "loss", "base_seed", "length",
                   "frequency_index", "snr_index", "seed_index", "target_frequency", "snr_db",
                   "noise_sigma", "noise_seed", "init_seed", "init_re", "init_im",
                   "init_amplitude", "final_re", "final_im", "final_amplitude",
                   "estimated_frequency", "freq_sq_error", "initial_loss", "final_loss",
                   "cap_activations", "status", "diverged_step", "trace_file"});
      for (const auto& r : result.runs) {
        const bool traced = config.write_traces && r.status == RunStatus::Ok;
        w.row({r.run_id, "single", scale, hash, loss, u64(config.seed), std::to_string(n),
               std::to_string(r.frequency_index), std::to_string(r.snr_index),
               std::to_string(r.seed_index), format_double(r.frequency), format_double(r.snr_db),
               format_double(r.noise_sigma), u64(r.noise_seed), u64(r.init_seed),
               format_double(r.init_param.real()), format_double(r.init_param.imag()),
               format_double(r.init_amplitude), format_double(r.final_param.real()),
               format_double(r.final_param.imag()), format_double(r.final_amplitude),
               format_double(r.estimated_frequency), format_double(r.sq_error),
               format_double(r.initial_loss), format_double(r.final_loss),
               std::to_string(r.cap_activations), status_name(r.status),
               std::to_string(r.diverged_step),
               traced ? "traces/trace_" + r.run_id + ".csv" : ""});
      }
    }
    {
      CsvWriter w(dir / "aggregate.csv",
                  {"snr_db", "runs", "failures", "mean_sq_error", "median_sq_error", "mean_db",
                   "median_db", "crlb_db"});
      for (const auto& a : result.aggregates) {
        w.row({format_double(a.snr_db), std::to_string(a.runs), std::to_string(a.failures),
               format_double(a.mean_sq_error), format_double(a.median_sq_error),
               format_double(a.mean_db), format_double(a.median_db), format_double(a.crlb_db)});
      }
    }
    {
      CsvWriter w(dir / "timing.csv", {"run_id", "wall_seconds"});
      for (const auto& r : result.runs) w.row({r.run_id, format_double(r.wall_seconds)});
    }
    write_manifest(config, dir);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Multi sinusoid sweep

TargetSpec draw_multi_target(const MultiSettings& s, std::size_t components, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> freq(s.frequency_min, s.frequency_max);
  std::uniform_real_distribution<double> amp(s.amplitude_min, s.amplitude_max);
  const double scale =
      s.amplitude_scale == AmplitudeScale::InverseCount ? 1.0 / static_cast<double>(components)
                                                        : 1.0;
  TargetSpec spec;
  spec.length = s.length;
  for (std::size_t k = 0; k < components; ++k) {
    const double w = freq(rng);
    const double a = amp(rng) * scale;
    spec.components.push_back({a, w, 0.0});
  }
  return spec;
}

namespace {

RealBaselineModel baseline_from(const SurrogateModel& init) {
  RealBaselineModel b;
  b.length = init.length;
  for (std::size_t k = 0; k < init.size(); ++k) {
    b.frequencies.push_back(std::abs(std::arg(init.params[k])));
    b.amplitudes.push_back(init.amplitudes[k]);
  }
  return b;
}

template <typename Model>
void fill_fit(MultiRunRecord& rec, const Model& init, std::span<const double> target,
              const ExperimentConfig& config, std::size_t dft_size, const fs::path* trace_path) {
  FitOptions<Model> opts;
  opts.loss = config.loss;
  opts.adam = config.optimizer;
  opts.trace_every = config.trace_every;
  opts.metric = [&](const Model&, std::span<const double> rendered) {
    return spectral_mse_db(rendered, target, dft_size).db;
  };
  rec.init_values = flatten_params(init).values;
  try {
    auto fitted = fit(init, target, opts);
    rec.final_values = flatten_params(fitted.model).values;
    const Signal rendered = [&] {
      if constexpr (std::is_same_v<Model, SurrogateModel>) {
        return surrogate_forward(fitted.model);
      } else {
        return baseline_forward(fitted.model);
      }
    }();
    const auto db = spectral_mse_db(rendered, target, dft_size);
    rec.spectral_db = db.db;
    rec.at_floor = db.at_floor;
    rec.initial_loss = fitted.initial_loss;
    rec.final_loss = fitted.final_loss;
    rec.cap_activations = fitted.cap_activations;
    if (trace_path) write_trace(*trace_path, fitted.trace);
  } catch (const DivergenceError& e) {
    rec.status = RunStatus::Diverged;
    rec.diverged_step = e.step();
    rec.spectral_db = std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

MultiResult run_multi(const ExperimentConfig& config, bool write_outputs) {
  validate(config);
  const auto& s = config.multi;
  const std::size_t n = s.length;
  const std::size_t dft_size = config.loss.resolved_dft_size(n);
  std::vector<MultiModel> models;
  if (s.surrogate) models.push_back(MultiModel::Surrogate);
  if (s.baseline) models.push_back(MultiModel::Baseline);
  if (s.random_control) models.push_back(MultiModel::Random);

  const fs::path dir = config.output_dir;
  const fs::path trace_dir = dir / "traces";
  if (write_outputs) {
    ensure_directory(dir);
    if (config.write_traces) ensure_directory(trace_dir);
  }

  const std::size_t jobs = s.component_counts.size() * s.draws;
  std::vector<std::vector<MultiRunRecord>> per_job(jobs);

  parallel_for(config.jobs, jobs, [&](std::size_t job) {
    const std::size_t count_index = job / s.draws;
    const std::size_t draw = job % s.draws;
    const std::size_t k = s.component_counts[count_index];
    const std::uint64_t target_seed = derive_seed(config.seed, {3, k, draw});
    const std::uint64_t init_seed = derive_seed(config.seed, {5, k, draw});
    TargetSpec spec = draw_multi_target(s, k, target_seed);
    if (s.snr_db) {
      std::vector<double> amps;
      for (const auto& c : spec.components) amps.push_back(c.amplitude);
      spec.noise_sigma = snr_to_sigma(*s.snr_db, amps);
    }
    const Signal target = synthesize(spec, derive_seed(config.seed, {4, k, draw}));
    const SurrogateModel init = init_params(k, s.init, init_seed, n);

    for (MultiModel model : models) {
      const auto start = Clock::now();
      MultiRunRecord rec;
      rec.model = model;
      rec.components = k;
      rec.draw = draw;
      rec.target_seed = target_seed;
      rec.init_seed = init_seed;
      rec.run_id = "multi_k" + std::to_string(k) + "_d" + std::to_string(draw) + "_" +
                   to_string(model);
      for (const auto& c : spec.components) {
        rec.target_frequencies.push_back(c.frequency);
        rec.target_amplitudes.push_back(c.amplitude);
      }
      const fs::path trace_path = trace_dir / ("trace_" + rec.run_id + ".csv");
      const fs::path* trace = (write_outputs && config.write_traces) ? &trace_path : nullptr;
      switch (model) {
        case MultiModel::Surrogate:
          rec.init_spectral_db = spectral_mse_db(surrogate_forward(init), target, dft_size).db;
          fill_fit(rec, init, target, config, dft_size, trace);
          break;
        case MultiModel::Baseline: {
          const RealBaselineModel b = baseline_from(init);
          rec.init_spectral_db = spectral_mse_db(baseline_forward(b), target, dft_size).db;
          fill_fit(rec, b, target, config, dft_size, trace);
          break;
        }
        case MultiModel::Random: {
          rec.init_seed = derive_seed(config.seed, {6, k, draw});
          const TargetSpec draw_spec = draw_multi_target(s, k, rec.init_seed);
          RealBaselineModel b;
          b.length = n;
          for (const auto& c : draw_spec.components) {
            b.frequencies.push_back(c.frequency);
            b.amplitudes.push_back(c.amplitude);
          }
          rec.init_values = flatten_params(b).values;
          rec.final_values = rec.init_values;
          const auto db = spectral_mse_db(baseline_forward(b), target, dft_size);
          rec.init_spectral_db = db.db;
          rec.spectral_db = db.db;
          rec.at_floor = db.at_floor;
          break;
        }
      }
      rec.wall_seconds = seconds_since(start);
      per_job[job].push_back(std::move(rec));
    }
  });

  MultiResult result;
  for (auto& v : per_job) {
    for (auto& r : v) result.runs.push_back(std::move(r));
  }
  for (std::size_t k : s.component_counts) {
    for (MultiModel model : models) {
      MultiAggregate agg;
      agg.components = k;
      agg.model = model;
      std::vector<double> vals;
      std::vector<double> inits;
      for (const auto& r : result.runs) {
        if (r.components != k || r.model != model) continue;
        ++agg.runs;
        if (r.status != RunStatus::Ok) {
          ++agg.failures;
          continue;
        }
        vals.push_back(r.spectral_db);
        inits.push_back(r.init_spectral_db);
      }
      agg.mean_db = mean(vals);
      agg.median_db = median(vals);
      agg.median_init_db = median(inits);
      result.aggregates.push_back(agg);
    }
  }

  if (write_outputs) {
    const std::string hash = config_hash(config);
    const std::string scale = to_string(config.scale);
    const std::string loss = to_string(config.loss.tag);
    {
      CsvWriter w(dir / "summary.csv",
                  {"run_id", "experiment", "scale", "config_hash", "loss", "base_seed", "length",
                   "model", "components", "draw", "target_seed", "init_seed",
                   "target_frequencies", "target_amplitudes", "init_parameters",
                   "final_parameters", "init_spectral_mse_db", "spectral_mse_db", "at_floor",
                   "initial_loss", "final_loss", "cap_activations", "status", "diverged_step",
                   "trace_file"});
      for (const auto& r : result.runs) {
        const bool traced = config.write_traces && r.status == RunStatus::Ok &&
                            r.model != MultiModel::Random;
        w.row({r.run_id, "multi", scale, hash, loss, u64(config.seed), std::to_string(n),
               to_string(r.model), std::to_string(r.components), std::to_string(r.draw),
               u64(r.target_seed), u64(r.init_seed), join_doubles(r.target_frequencies),
               join_doubles(r.target_amplitudes), join_doubles(r.init_values),
               join_doubles(r.final_values), format_double(r.init_spectral_db),
               format_double(r.spectral_db), r.at_floor ? "1" : "0",
               format_double(r.initial_loss), format_double(r.final_loss),
               std::to_string(r.cap_activations), status_name(r.status),
               std::to_string(r.diverged_step),
               traced ? "traces/trace_" + r.run_id + ".csv" : ""});
      }
    }
    {
      CsvWriter w(dir / "aggregate.csv",
                  {"components", "model", "runs", "failures", "mean_db", "median_db",
                   "median_init_db"});
      for (const auto& a : result.aggregates) {
        w.row({std::to_string(a.components), to_string(a.model), std::to_string(a.runs),
               std::to_string(a.failures), format_double(a.mean_db), format_double(a.median_db),
               format_double(a.median_init_db)});
      }
    }
    {
      CsvWriter w(dir / "timing.csv", {"run_id", "wall_seconds"});
      for (const auto& r : result.runs) w.row({r.run_id, format_double(r.wall_seconds)});
    }
    write_manifest(config, dir);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Single fit

std::size_t count_plateau_drops(const std::vector<TracePoint>& trace, std::size_t total_steps) {
  if (trace.size() < 3 || total_steps == 0) return 0;
  const double flat_span = 0.10 * static_cast<double>(total_steps);
  const double drop_span = 0.05 * static_cast<double>(total_steps);
  std::size_t drops = 0;
  std::size_t i = 0;
  while (i < trace.size()) {
    // find the longest flat window ending at i
    const double here = trace[i].metric;
    std::size_t j = i;
    while (j > 0 && std::abs(trace[j - 1].metric - here) <= 1.0) --j;
    const bool flat = static_cast<double>(trace[i].step - trace[j].step) >= flat_span;
    bool dropped = false;
    if (flat) {
      for (std::size_t k = i + 1; k < trace.size(); ++k) {
        if (static_cast<double>(trace[k].step - trace[i].step) > drop_span) break;
        if (trace[k].metric < here - 3.0) {
          ++drops;
          i = k;
          dropped = true;
          break;
        }
      }
    }
    if (!dropped) ++i;
  }
  return drops;
}

FitExperimentResult run_fit(const ExperimentConfig& config, bool write_outputs,
                            const std::optional<Signal>& target_override) {
  validate(config);
  const auto& s = config.fit;
  Signal target;
  if (target_override) {
    target = *target_override;
  } else if (!s.input.empty()) {
    target = read_samples(s.input);
  } else {
    TargetSpec spec{s.components, s.noise_sigma, s.length};
    if (s.snr_db) {
      std::vector<double> amps;
      for (const auto& c : s.components) amps.push_back(c.amplitude);
      spec.noise_sigma = snr_to_sigma(*s.snr_db, amps);
    }
    target = synthesize(spec, derive_seed(config.seed, {7}));
  }
  if (target.size() < 2) throw ValidationError("fit: target needs at least 2 samples");
  const std::size_t n = target.size();
  const std::size_t dft_size = config.loss.resolved_dft_size(n);
  const std::size_t k = s.component_count;
  const std::uint64_t init_seed = derive_seed(config.seed, {8});
  const SurrogateModel init = init_params(k, s.init, init_seed, n);

  std::vector<ModelFamily> families;
  if (s.model != FitModelChoice::Baseline) families.push_back(ModelFamily::Surrogate);
  if (s.model != FitModelChoice::Surrogate) families.push_back(ModelFamily::Baseline);

  FitExperimentResult result;
  result.estimate_status = "ok";
  auto metric_of = [&](std::span<const double> rendered) {
    return spectral_mse_db(rendered, target, dft_size).db;
  };

  for (ModelFamily family : families) {
    const auto start = Clock::now();
    FitRunRecord rec;
    rec.model = family;
    rec.components = k;
    rec.length = n;
    rec.init_seed = init_seed;
    rec.run_id = std::string("fit_") + (family == ModelFamily::Surrogate ? "surrogate" : "baseline");
    try {
      if (family == ModelFamily::Surrogate) {
        FitOptions<SurrogateModel> opts{config.loss, config.optimizer, config.trace_every,
                                        [&](const SurrogateModel&, std::span<const double> r) {
                                          return metric_of(r);
                                        }};
        rec.init_values = flatten_params(init).values;
        rec.init_spectral_db = metric_of(surrogate_forward(init));
        auto fitted = fit(init, target, opts);
        rec.final_values = flatten_params(fitted.model).values;
        rec.spectral_db = metric_of(surrogate_forward(fitted.model));
        rec.initial_loss = fitted.initial_loss;
        rec.final_loss = fitted.final_loss;
        rec.cap_activations = fitted.cap_activations;
        rec.trace = std::move(fitted.trace);
        const auto freqs = extract_frequencies(fitted.model);
        std::vector<double> alpha(k, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> combined(k, std::numeric_limits<double>::quiet_NaN());
        try {
          const auto est = recover_amplitudes(fitted.model, {RepresentationTag::Identity, 0});
          alpha = est.least_squares;
          combined = est.combined;
        } catch (const ConditioningError& e) {
          result.estimate_status = e.what();
        }
        for (std::size_t i = 0; i < k; ++i) {
          result.estimates.push_back({family, i, freqs[i].frequency, freqs[i].decay,
                                      freqs[i].amplitude, alpha[i], combined[i]});
        }
      } else {
        const RealBaselineModel b = baseline_from(init);
        FitOptions<RealBaselineModel> opts{config.loss, config.optimizer, config.trace_every,
                                           [&](const RealBaselineModel&,
                                               std::span<const double> r) { return metric_of(r); }};
        rec.init_values = flatten_params(b).values;
        rec.init_spectral_db = metric_of(baseline_forward(b));
        auto fitted = fit(b, target, opts);
        rec.final_values = flatten_params(fitted.model).values;
        rec.spectral_db = metric_of(baseline_forward(fitted.model));
        rec.initial_loss = fitted.initial_loss;
        rec.final_loss = fitted.final_loss;
        rec.trace = std::move(fitted.trace);
        for (std::size_t i = 0; i < k; ++i) {
          // fold onto [0, pi]
          double w = std::fmod(std::abs(fitted.model.frequencies[i]), 2.0 * std::numbers::pi);
          if (w > std::numbers::pi) w = 2.0 * std::numbers::pi - w;
          const double nan = std::numeric_limits<double>::quiet_NaN();
          result.estimates.push_back(
              {family, i, w, 1.0, fitted.model.amplitudes[i], nan, nan});
        }
      }
      rec.plateau_drops = count_plateau_drops(rec.trace, config.optimizer.steps);
    } catch (const DivergenceError& e) {
      rec.status = RunStatus::Diverged;
      rec.diverged_step = e.step();
      rec.spectral_db = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_seconds = seconds_since(start);
    result.runs.push_back(std::move(rec));
  }

  if (write_outputs) {
    const fs::path dir = config.output_dir;
    ensure_directory(dir);
    const std::string hash = config_hash(config);
    const std::string scale = to_string(config.scale);
    {
      CsvWriter w(dir / "summary.csv",
                  {"run_id", "experiment", "scale", "config_hash", "loss", "base_seed", "length",
                   "model", "components", "init_seed", "init_parameters", "final_parameters",
                   "init_spectral_mse_db", "spectral_mse_db", "initial_loss", "final_loss",
                   "cap_activations", "plateau_drops", "trace_rows", "status", "diverged_step",
                   "trace_file"});
      for (const auto& r : result.runs) {
        const std::string trace_file = "trace_" + r.run_id + ".csv";
        w.row({r.run_id, "fit", scale, hash, to_string(config.loss.tag), u64(config.seed),
               std::to_string(r.length),
               r.model == ModelFamily::Surrogate ? "surrogate" : "baseline",
               std::to_string(r.components), u64(r.init_seed), join_doubles(r.init_values),
               join_doubles(r.final_values), format_double(r.init_spectral_db),
               format_double(r.spectral_db), format_double(r.initial_loss),
               format_double(r.final_loss), std::to_string(r.cap_activations),
               std::to_string(r.plateau_drops), std::to_string(r.trace.size()),
               status_name(r.status), std::to_string(r.diverged_step),
               r.status == RunStatus::Ok ? trace_file : ""});
        if (r.status == RunStatus::Ok) write_trace(dir / trace_file, r.trace);
      }
    }
    {
      CsvWriter w(dir / "estimates.csv", {"model", "component", "frequency", "decay",
                                          "learned_amplitude", "alpha_star",
                                          "combined_amplitude"});
      for (const auto& e : result.estimates) {
        w.row({e.model == ModelFamily::Surrogate ? "surrogate" : "baseline",
               std::to_string(e.index), format_double(e.frequency), format_double(e.decay),
               format_double(e.amplitude), format_double(e.alpha_star),
               format_double(e.combined)});
      }
    }
    {
      CsvWriter w(dir / "timing.csv", {"run_id", "wall_seconds"});
      for (const auto& r : result.runs) w.row({r.run_id, format_double(r.wall_seconds)});
    }
    write_manifest(config, dir);
  }
  return result;
}

}  // namespace wsin

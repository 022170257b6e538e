#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wsin/error.hpp"
#include "wsin/experiments.hpp"
#include "wsin/io.hpp"

using namespace wsin;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "wsin_test_exp" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t line_count(const fs::path& p) {
  const std::string s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const LandscapeSummary& find(const LandscapeResult& r, std::size_t n, const std::string& loss) {
  for (const auto& s : r.summaries) {
    if (s.length == n && s.loss == loss) return s;
  }
  throw std::runtime_error("missing curve");
}

}  // namespace

TEST(Landscape, MinimaAndRipple) {
  auto cfg = default_config(ExperimentKind::Landscape, Scale::Paper);
  const auto r = run_landscape(cfg, false);
  ASSERT_EQ(r.curves.size(), 6u);
  for (const auto& s : r.summaries) EXPECT_EQ(s.argmin_index, s.target_index) << s.loss;
  EXPECT_GE(find(r, 32, "mse").off_target_minima, 5u);
  EXPECT_LT(find(r, 2048, "mse").ripple, 0.1 * find(r, 32, "mse").ripple);
}

TEST(Landscape, LocalMinimumCounter) {
  EXPECT_EQ(count_local_minima({3, 1, 2, 0, 5, 4, 6}, 99), 3u);
  EXPECT_EQ(count_local_minima({3, 1, 2, 0, 5, 4, 6}, 3), 2u);
  EXPECT_EQ(count_local_minima({1, 1, 1}, 99), 0u);
}

TEST(Landscape, WritesCsv) {
  auto cfg = default_config(ExperimentKind::Landscape, Scale::Desk);
  cfg.landscape.grid_points = 1001;
  cfg.output_dir = scratch("land").string();
  run_landscape(cfg);
  EXPECT_EQ(line_count(fs::path(cfg.output_dir) / "landscape.csv"), 1 + 6 * 1001u);
  EXPECT_EQ(line_count(fs::path(cfg.output_dir) / "summary.csv"), 7u);
  EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "manifest.json"));
}

TEST(Single, GridIsExhaustiveAndReproducible) {
  auto cfg = default_config(ExperimentKind::Single, Scale::Desk);
  cfg.single.frequency_steps = 2;
  cfg.single.snr_steps = 2;
  cfg.single.seed_count = 2;
  cfg.optimizer.steps = 300;
  cfg.trace_every = 100;
  cfg.output_dir = scratch("single_a").string();
  const auto a = run_single(cfg);
  EXPECT_EQ(a.runs.size(), 2u * 3u * 2u);
  EXPECT_EQ(a.aggregates.size(), 3u);
  EXPECT_TRUE(std::isinf(a.aggregates.back().snr_db));
  const fs::path da = cfg.output_dir;
  EXPECT_EQ(line_count(da / "summary.csv"), 13u);
  EXPECT_EQ(line_count(da / "traces" / ("trace_" + a.runs[0].run_id + ".csv")), 1u + 4u);

  cfg.output_dir = scratch("single_b").string();
  cfg.jobs = 3;
  run_single(cfg);
  const fs::path db = cfg.output_dir;
  for (const char* f : {"summary.csv", "aggregate.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(da / f), slurp(db / f)) << f;
  }
  EXPECT_EQ(slurp(da / "traces" / ("trace_" + a.runs[5].run_id + ".csv")),
            slurp(db / "traces" / ("trace_" + a.runs[5].run_id + ".csv")));
}

TEST(Single, SharedInitAcrossCells) {
  auto cfg = default_config(ExperimentKind::Single, Scale::Desk);
  cfg.single.frequency_steps = 2;
  cfg.single.snr_steps = 1;
  cfg.single.seed_count = 2;
  cfg.optimizer.steps = 1;
  const auto r = run_single(cfg, false);
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.init_param, r.runs[run.seed_index].init_param);
    EXPECT_LT(std::abs(run.init_param), 1.0);
  }
}

TEST(Multi, RowsPerModelAndSharedStarts) {
  auto cfg = default_config(ExperimentKind::Multi, Scale::Desk);
  cfg.multi.draws = 3;
  cfg.optimizer.steps = 50;
  const auto r = run_multi(cfg, false);
  EXPECT_EQ(r.runs.size(), 2u * 3u * 3u);
  EXPECT_EQ(r.aggregates.size(), 6u);
  for (std::size_t i = 0; i + 2 < r.runs.size(); i += 3) {
    const auto& s = r.runs[i];
    const auto& b = r.runs[i + 1];
    ASSERT_EQ(s.model, MultiModel::Surrogate);
    ASSERT_EQ(b.model, MultiModel::Baseline);
    EXPECT_EQ(r.runs[i + 2].model, MultiModel::Random);
    EXPECT_EQ(s.target_frequencies, b.target_frequencies);
    for (std::size_t k = 0; k < s.components; ++k) {
      const double w = std::abs(std::atan2(s.init_values[2 * k + 1], s.init_values[2 * k]));
      EXPECT_NEAR(b.init_values[k], w, 1e-15);
      EXPECT_NEAR(std::hypot(s.init_values[2 * k], s.init_values[2 * k + 1]), 1.0, 1e-12);
      EXPECT_EQ(b.init_values[s.components + k], 1.0 / static_cast<double>(s.components));
    }
    // equal starting renders: on-circle zero-phase surrogate equals the cosine bank
    EXPECT_NEAR(s.init_spectral_db, b.init_spectral_db, 1e-6);
  }
}

TEST(Multi, TargetDraws) {
  MultiSettings s;
  const auto t = draw_multi_target(s, 8, 5);
  ASSERT_EQ(t.components.size(), 8u);
  for (const auto& c : t.components) {
    EXPECT_GE(c.frequency, 0.1 * kPi);
    EXPECT_LE(c.frequency, 0.9 * kPi);
    EXPECT_GE(c.amplitude, 0.1 / 8);
    EXPECT_LE(c.amplitude, 1.0 / 8);
    EXPECT_EQ(c.phase, 0.0);
  }
  s.amplitude_scale = AmplitudeScale::None;
  for (const auto& c : draw_multi_target(s, 8, 5).components) EXPECT_GE(c.amplitude, 0.1);
  EXPECT_EQ(t.noise_sigma, 0.0);
}

TEST(Fit, TraceRowsAndEstimates) {
  auto cfg = default_config(ExperimentKind::Fit, Scale::Desk);
  cfg.optimizer.steps = 1050;
  cfg.trace_every = 100;
  cfg.fit.model = FitModelChoice::Both;
  cfg.output_dir = scratch("fit").string();
  const auto r = run_fit(cfg);
  ASSERT_EQ(r.runs.size(), 2u);
  for (const auto& run : r.runs) EXPECT_EQ(run.trace.size(), 1050u / 100u + 1u);
  EXPECT_EQ(r.estimates.size(), 2u);
  EXPECT_TRUE(std::isfinite(r.estimates[0].alpha_star));
  EXPECT_TRUE(std::isnan(r.estimates[1].alpha_star));
  const fs::path dir = cfg.output_dir;
  EXPECT_EQ(line_count(dir / "trace_fit_surrogate.csv"), 12u);
  EXPECT_EQ(line_count(dir / "estimates.csv"), 3u);
}

TEST(Fit, FromSampleFile) {
  const fs::path dir = scratch("fit_file");
  fs::create_directories(dir);
  const Signal target = synthesize({{{0.8, 0.3 * kPi, 0.0}}, 0.0, 256}, 0);
  write_samples_binary(dir / "x.f64", target);
  auto cfg = default_config(ExperimentKind::Fit, Scale::Desk);
  cfg.fit.input = (dir / "x.f64").string();
  cfg.optimizer.steps = 100;
  const auto r = run_fit(cfg, false);
  EXPECT_EQ(r.runs[0].length, 256u);

  std::ofstream(dir / "bad.txt") << "0.1\n0.2\noops\n";
  cfg.fit.input = (dir / "bad.txt").string();
  try {
    run_fit(cfg, false);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Fit, DivergenceIsRecordedNotDropped) {
  auto cfg = default_config(ExperimentKind::Fit, Scale::Desk);
  cfg.optimizer.steps = 10;
  const Signal huge(64, 1e300);
  const auto r = run_fit(cfg, false, huge);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].status, RunStatus::Diverged);
  EXPECT_EQ(r.runs[0].diverged_step, 0u);
}

TEST(PlateauDrops, DetectsStaircase) {
  std::vector<TracePoint> trace;
  for (std::size_t step = 0; step <= 10000; step += 100) {
    const double metric = step < 3000 ? 0.0 : (step < 6000 ? -10.0 : -20.0);
    trace.push_back({step, 0.0, metric});
  }
  EXPECT_EQ(count_plateau_drops(trace, 10000), 2u);

  std::vector<TracePoint> smooth;
  for (std::size_t step = 0; step <= 10000; step += 100) {
    smooth.push_back({step, 0.0, -static_cast<double>(step) / 100.0});
  }
  EXPECT_EQ(count_plateau_drops(smooth, 10000), 0u);
}

TEST(ParallelFor, CoversEveryIndexAndPropagates) {
  std::vector<int> hit(100, 0);
  parallel_for(4, hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(3, 10,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

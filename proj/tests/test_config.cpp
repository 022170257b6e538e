#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wsin/config.hpp"
#include "wsin/error.hpp"

using namespace wsin;
using nlohmann::json;
constexpr double kPi = std::numbers::pi;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, PaperScaleDefaults) {
  const auto single = default_config(ExperimentKind::Single, Scale::Paper);
  EXPECT_EQ(single.single.length, 4096u);
  EXPECT_EQ(single.single.frequency_steps, 100u);
  EXPECT_NEAR(single.single.frequency_min, 0.1 * kPi, 1e-15);
  EXPECT_NEAR(single.single.frequency_max, 0.9 * kPi, 1e-15);
  EXPECT_EQ(single.single.snr_steps, 20u);
  EXPECT_EQ(single.single.snr_min_db, 0.0);
  EXPECT_EQ(single.single.snr_max_db, 40.0);
  EXPECT_EQ(single.single.seed_count, 10u);
  EXPECT_EQ(single.optimizer.steps, 50000u);
  EXPECT_EQ(single.optimizer.learning_rate, 1e-4);

  const auto multi = default_config(ExperimentKind::Multi, Scale::Paper);
  EXPECT_EQ(multi.multi.length, 4096u);
  EXPECT_EQ(multi.multi.component_counts, (std::vector<std::size_t>{2, 8, 32}));
  EXPECT_EQ(multi.multi.draws, 2000u);
  EXPECT_EQ(multi.optimizer.steps, 100000u);
  EXPECT_EQ(multi.multi.init, InitMode::OnCircle);

  const auto land = default_config(ExperimentKind::Landscape, Scale::Paper);
  EXPECT_EQ(land.landscape.lengths, (std::vector<std::size_t>{32, 2048}));
  EXPECT_GE(land.landscape.grid_points, 1000u);
}

TEST(Config, DeskScaleIsReduction) {
  const auto single = default_config(ExperimentKind::Single, Scale::Desk);
  EXPECT_EQ(single.single.length, 512u);
  EXPECT_EQ(single.single.frequency_steps, 10u);
  EXPECT_EQ(single.single.snr_steps, 5u);
  EXPECT_EQ(single.single.snr_min_db, 10.0);
  EXPECT_EQ(single.single.seed_count, 3u);
  EXPECT_EQ(single.optimizer.steps, 10000u);
  EXPECT_EQ(single.optimizer.learning_rate, 1e-3);
  const auto multi = default_config(ExperimentKind::Multi, Scale::Desk);
  EXPECT_EQ(multi.multi.component_counts, (std::vector<std::size_t>{2, 8}));
  EXPECT_EQ(multi.multi.draws, 50u);
  EXPECT_EQ(multi.optimizer.steps, 20000u);
}

TEST(Config, OverlayAndRoundTrip) {
  const json doc = json::parse(R"({
    "experiment": "single", "scale": "desk", "seed": 9,
    "loss": {"kind": "dft-mag-mse", "dft_size": 1024},
    "optimizer": {"steps": 123},
    "single": {"frequency_min": "0.2pi", "seed_count": 2}
  })");
  const auto c = config_from_json(doc);
  EXPECT_EQ(c.scale, Scale::Desk);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.loss.tag, LossTag::DftMagMse);
  EXPECT_EQ(c.loss.dft_size, 1024u);
  EXPECT_EQ(c.optimizer.steps, 123u);
  EXPECT_NEAR(c.single.frequency_min, 0.2 * kPi, 1e-15);
  EXPECT_EQ(c.single.seed_count, 2u);
  EXPECT_EQ(c.single.length, 512u);

  const auto again = config_from_json(to_json(c));
  EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
  EXPECT_EQ(config_hash(again), config_hash(c));
}

TEST(Config, HashIgnoresJobsAndOutputDir) {
  auto a = default_config(ExperimentKind::Multi, Scale::Desk);
  auto b = a;
  b.jobs = 4;
  b.output_dir = "elsewhere";
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, RejectsUnknownKeysWithPointer) {
  const auto msg = error_of([] {
    config_from_json(json::parse(R"({"experiment": "multi", "multi": {"drawz": 5}})"));
  });
  EXPECT_NE(msg.find("/multi/drawz"), std::string::npos) << msg;
}

TEST(Config, RejectsTypeMismatchWithPointer) {
  const auto msg = error_of([] {
    config_from_json(json::parse(R"({"experiment": "single", "optimizer": {"steps": "many"}})"));
  });
  EXPECT_NE(msg.find("/optimizer/steps"), std::string::npos) << msg;
  EXPECT_THROW(config_from_json(json::parse(R"({"experiment": "fit", "loss": {"kind": "l1"}})")),
               ValidationError);
  EXPECT_THROW(config_from_json(json::parse(R"({"scale": "desk"})")), ValidationError);
}

TEST(Config, RejectsInvalidValues) {
  EXPECT_THROW(config_from_json(json::parse(
                   R"({"experiment": "single", "optimizer": {"beta1": 1.0}})")),
               ValidationError);
  EXPECT_THROW(config_from_json(json::parse(
                   R"({"experiment": "landscape", "landscape": {"lengths": []}})")),
               ValidationError);
  EXPECT_THROW(config_from_json(json::parse(
                   R"({"experiment": "multi", "multi": {"component_counts": [0]}})")),
               ValidationError);
}

TEST(Config, MalformedTextHasLineAndOffset) {
  try {
    parse_config_text("{\n  \"seed\": 1,\n  \"jobs\": ,\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.offset(), 25u);
  }
}

TEST(Config, LoadFileNamesPath) {
  const auto path = std::filesystem::temp_directory_path() / "wsin_bad_config.json";
  std::ofstream(path) << "{\"experiment\": \"fit\", \"fit\": {\"bogus\": 1}}";
  const auto msg = error_of([&] { load_config(path.string(), std::nullopt, std::nullopt); });
  EXPECT_NE(msg.find(path.string()), std::string::npos);
  EXPECT_NE(msg.find("/fit/bogus"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/config.json", std::nullopt, std::nullopt), IoError);
}

TEST(Config, StringConverters) {
  EXPECT_EQ(parse_loss("time-mse"), LossTag::TimeMse);
  EXPECT_EQ(parse_loss("dft-mag-mse"), LossTag::DftMagMse);
  EXPECT_EQ(to_string(LossTag::DftMagMse), "dft-mag-mse");
  EXPECT_EQ(parse_scale("paper"), Scale::Paper);
  EXPECT_EQ(parse_experiment("landscape"), ExperimentKind::Landscape);
  EXPECT_THROW(parse_experiment("sweep"), ValidationError);
}

#include "wsin/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "wsin/error.hpp"
#include "wsin/io.hpp"

namespace wsin {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Landscape: return "landscape";
    case ExperimentKind::Single: return "single";
    case ExperimentKind::Multi: return "multi";
    case ExperimentKind::Fit: return "fit";
  }
  return "?";
}

std::string to_string(Scale scale) { return scale == Scale::Desk ? "desk" : "paper"; }

std::string to_string(LossTag tag) { return tag == LossTag::TimeMse ? "time-mse" : "dft-mag-mse"; }

ExperimentKind parse_experiment(const std::string& s) {
  if (s == "landscape") return ExperimentKind::Landscape;
  if (s == "single") return ExperimentKind::Single;
  if (s == "multi") return ExperimentKind::Multi;
  if (s == "fit") return ExperimentKind::Fit;
  throw ValidationError("unknown experiment '" + s + "' (expected landscape|single|multi|fit)");
}

Scale parse_scale(const std::string& s) {
  if (s == "desk") return Scale::Desk;
  if (s == "paper") return Scale::Paper;
  throw ValidationError("unknown scale '" + s + "' (expected desk|paper)");
}

LossTag parse_loss(const std::string& s) {
  if (s == "time-mse") return LossTag::TimeMse;
  if (s == "dft-mag-mse") return LossTag::DftMagMse;
  throw ValidationError("unknown loss '" + s + "' (expected time-mse|dft-mag-mse)");
}

namespace {

std::string init_name(InitMode m) { return m == InitMode::InDisk ? "in-disk" : "on-circle"; }

InitMode parse_init(const std::string& s, const std::string& where) {
  if (s == "in-disk") return InitMode::InDisk;
  if (s == "on-circle") return InitMode::OnCircle;
  throw ValidationError(where + ": unknown init mode '" + s + "' (expected in-disk|on-circle)");
}

std::string scale_name(AmplitudeScale a) {
  return a == AmplitudeScale::InverseCount ? "inverse-count" : "none";
}

std::string model_name(FitModelChoice m) {
  switch (m) {
    case FitModelChoice::Surrogate: return "surrogate";
    case FitModelChoice::Baseline: return "baseline";
    case FitModelChoice::Both: return "both";
  }
  return "?";
}

// Walks one JSON object, consuming known keys and rejecting the rest.
class ObjectReader {
public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail(path_, "expected an object");
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path_ + "/" + it.key(), "unknown key");
    }
  }

  const json* find(const std::string& key) {
    seen_.insert({key, true});
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  void size(const std::string& key, std::size_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(at(key), "expected a nonnegative integer");
      out = v->get<std::size_t>();
    }
  }

  void u64(const std::string& key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) fail(at(key), "expected a nonnegative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (auto* v = find(key)) {
      if (!v->is_boolean()) fail(at(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) fail(at(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  /// Plain number, or a string such as "0.4pi" meaning 0.4 * pi.
  void real(const std::string& key, double& out) {
    if (auto* v = find(key)) out = real_value(*v, at(key));
  }

  void optional_real(const std::string& key, std::optional<double>& out) {
    if (auto* v = find(key)) {
      if (v->is_null()) {
        out.reset();
      } else {
        out = real_value(*v, at(key));
      }
    }
  }

  void size_list(const std::string& key, std::vector<std::size_t>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) fail(at(key), "expected an array of integers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number_unsigned()) {
          fail(at(key) + "/" + std::to_string(i), "expected a nonnegative integer");
        }
        out.push_back((*v)[i].get<std::size_t>());
      }
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ValidationError("config " + (where.empty() ? std::string("/") : where) + ": " + what);
  }

  static double real_value(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
        const std::string head = s.substr(0, s.size() - 2);
        if (head.empty()) return std::numbers::pi;
        char* end = nullptr;
        const double f = std::strtod(head.c_str(), &end);
        if (end == head.c_str() + head.size()) return f * std::numbers::pi;
      }
    }
    fail(where, "expected a number or a multiple of pi such as \"0.4pi\"");
  }

private:
  const json& obj_;
  std::string path_;
  std::map<std::string, bool> seen_;
};

void read_landscape(const json& j, LandscapeSettings& s, const std::string& path) {
  ObjectReader r(j, path);
  r.size_list("lengths", s.lengths);
  r.size("grid_points", s.grid_points);
  r.real("grid_min", s.grid_min);
  r.real("grid_max", s.grid_max);
  r.real("target_frequency", s.target_frequency);
  r.finish();
}

void read_single(const json& j, SingleSettings& s, const std::string& path) {
  ObjectReader r(j, path);
  r.size("length", s.length);
  r.size("frequency_steps", s.frequency_steps);
  r.real("frequency_min", s.frequency_min);
  r.real("frequency_max", s.frequency_max);
  r.size("snr_steps", s.snr_steps);
  r.real("snr_min_db", s.snr_min_db);
  r.real("snr_max_db", s.snr_max_db);
  r.size("seed_count", s.seed_count);
  r.boolean("noiseless_cell", s.noiseless_cell);
  r.finish();
}

void read_multi(const json& j, MultiSettings& s, const std::string& path) {
  ObjectReader r(j, path);
  r.size("length", s.length);
  r.size_list("component_counts", s.component_counts);
  r.size("draws", s.draws);
  r.real("frequency_min", s.frequency_min);
  r.real("frequency_max", s.frequency_max);
  r.real("amplitude_min", s.amplitude_min);
  r.real("amplitude_max", s.amplitude_max);
  std::string scale = scale_name(s.amplitude_scale);
  r.string("amplitude_scale", scale);
  if (scale == "inverse-count") {
    s.amplitude_scale = AmplitudeScale::InverseCount;
  } else if (scale == "none") {
    s.amplitude_scale = AmplitudeScale::None;
  } else {
    ObjectReader::fail(r.at("amplitude_scale"), "expected inverse-count|none");
  }
  r.optional_real("snr_db", s.snr_db);
  std::string init = init_name(s.init);
  r.string("init", init);
  s.init = parse_init(init, r.at("init"));
  r.boolean("surrogate", s.surrogate);
  r.boolean("baseline", s.baseline);
  r.boolean("random_control", s.random_control);
  r.finish();
}

void read_fit(const json& j, FitSettings& s, const std::string& path) {
  ObjectReader r(j, path);
  r.size("length", s.length);
  std::string model = model_name(s.model);
  r.string("model", model);
  if (model == "surrogate") {
    s.model = FitModelChoice::Surrogate;
  } else if (model == "baseline") {
    s.model = FitModelChoice::Baseline;
  } else if (model == "both") {
    s.model = FitModelChoice::Both;
  } else {
    ObjectReader::fail(r.at("model"), "expected surrogate|baseline|both");
  }
  r.size("component_count", s.component_count);
  if (auto* list = r.find("components")) {
    if (!list->is_array()) ObjectReader::fail(r.at("components"), "expected an array");
    s.components.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      SinusoidComponent c;
      ObjectReader cr((*list)[i], r.at("components") + "/" + std::to_string(i));
      cr.real("amplitude", c.amplitude);
      cr.real("frequency", c.frequency);
      cr.real("phase", c.phase);
      cr.finish();
      s.components.push_back(c);
    }
  }
  r.optional_real("snr_db", s.snr_db);
  r.real("noise_sigma", s.noise_sigma);
  std::string init = init_name(s.init);
  r.string("init", init);
  s.init = parse_init(init, r.at("init"));
  r.string("input", s.input);
  r.finish();
}

}  // namespace

ExperimentConfig default_config(ExperimentKind experiment, Scale scale) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.scale = scale;
  c.optimizer.learning_rate = 1e-4;
  c.optimizer.steps = experiment == ExperimentKind::Multi ? 100000 : 50000;
  if (scale == Scale::Desk) {
    c.optimizer.learning_rate = 1e-3;
    c.single.length = 512;
    c.single.frequency_steps = 10;
    c.single.snr_steps = 5;
    c.single.snr_min_db = 10.0;
    c.single.seed_count = 3;
    c.single.noiseless_cell = true;
    c.multi.length = 256;
    c.multi.component_counts = {2, 8};
    c.multi.draws = 50;
    c.fit.length = 1024;
    switch (experiment) {
      case ExperimentKind::Single:
        c.optimizer.steps = 10000;
        // Longer second-moment memory: with 0.999 the update re-inflates once the gradient
        // collapses near the minimum, leaving a ~-100 dB error floor at N = 512.
        c.optimizer.beta2 = 0.99999;
        break;
      case ExperimentKind::Multi:
      case ExperimentKind::Fit:
        c.optimizer.steps = 20000;
        break;
      case ExperimentKind::Landscape:
        break;
    }
  }
  if (experiment == ExperimentKind::Multi) c.trace_every = 100;
  return c;
}

void apply_json(ExperimentConfig& c, const json& doc) {
  ObjectReader r(doc, "");
  if (auto* v = r.find("experiment")) {
    if (!v->is_string()) ObjectReader::fail("/experiment", "expected a string");
    if (parse_experiment(v->get<std::string>()) != c.experiment) {
      ObjectReader::fail("/experiment", "does not match the selected experiment '" +
                                            to_string(c.experiment) + "'");
    }
  }
  if (auto* v = r.find("scale")) {
    if (!v->is_string()) ObjectReader::fail("/scale", "expected a string");
    parse_scale(v->get<std::string>());
  }
  r.size("trace_every", c.trace_every);
  r.boolean("write_traces", c.write_traces);
  r.u64("seed", c.seed);
  r.size("jobs", c.jobs);
  r.string("output_dir", c.output_dir);
  if (auto* v = r.find("loss")) {
    ObjectReader lr(*v, "/loss");
    std::string kind = to_string(c.loss.tag);
    lr.string("kind", kind);
    c.loss.tag = parse_loss(kind);
    lr.size("dft_size", c.loss.dft_size);
    lr.finish();
  }
  if (auto* v = r.find("optimizer")) {
    ObjectReader o(*v, "/optimizer");
    o.real("learning_rate", c.optimizer.learning_rate);
    o.real("beta1", c.optimizer.beta1);
    o.real("beta2", c.optimizer.beta2);
    o.real("epsilon", c.optimizer.epsilon);
    o.size("steps", c.optimizer.steps);
    o.finish();
  }
  if (auto* v = r.find("landscape")) read_landscape(*v, c.landscape, "/landscape");
  if (auto* v = r.find("single")) read_single(*v, c.single, "/single");
  if (auto* v = r.find("multi")) read_multi(*v, c.multi, "/multi");
  if (auto* v = r.find("fit")) read_fit(*v, c.fit, "/fit");
  r.finish();
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError(line, offset, "config line " + std::to_string(line) + ": " + e.what());
  }
}

ExperimentConfig config_from_json(const json& doc, std::optional<ExperimentKind> experiment,
                                  std::optional<Scale> scale) {
  if (!doc.is_object()) throw ValidationError("config /: expected an object");
  if (!experiment) {
    auto it = doc.find("experiment");
    if (it == doc.end() || !it->is_string()) {
      throw ValidationError("config /experiment: required when no subcommand selects one");
    }
    experiment = parse_experiment(it->get<std::string>());
  }
  if (!scale) {
    auto it = doc.find("scale");
    scale = (it != doc.end() && it->is_string()) ? parse_scale(it->get<std::string>())
                                                 : Scale::Paper;
  }
  ExperimentConfig c = default_config(*experiment, *scale);
  apply_json(c, doc);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> experiment,
                             std::optional<Scale> scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(parse_config_text(buf.str()), experiment, scale);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.offset(), path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["scale"] = to_string(c.scale);
  j["trace_every"] = c.trace_every;
  j["write_traces"] = c.write_traces;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  j["loss"] = {{"kind", to_string(c.loss.tag)}, {"dft_size", c.loss.dft_size}};
  j["optimizer"] = {{"learning_rate", c.optimizer.learning_rate},
                    {"beta1", c.optimizer.beta1},
                    {"beta2", c.optimizer.beta2},
                    {"epsilon", c.optimizer.epsilon},
                    {"steps", c.optimizer.steps}};
  j["landscape"] = {{"lengths", c.landscape.lengths},
                    {"grid_points", c.landscape.grid_points},
                    {"grid_min", c.landscape.grid_min},
                    {"grid_max", c.landscape.grid_max},
                    {"target_frequency", c.landscape.target_frequency}};
  j["single"] = {{"length", c.single.length},
                 {"frequency_steps", c.single.frequency_steps},
                 {"frequency_min", c.single.frequency_min},
                 {"frequency_max", c.single.frequency_max},
                 {"snr_steps", c.single.snr_steps},
                 {"snr_min_db", c.single.snr_min_db},
                 {"snr_max_db", c.single.snr_max_db},
                 {"seed_count", c.single.seed_count},
                 {"noiseless_cell", c.single.noiseless_cell}};
  j["multi"] = {{"length", c.multi.length},
                {"component_counts", c.multi.component_counts},
                {"draws", c.multi.draws},
                {"frequency_min", c.multi.frequency_min},
                {"frequency_max", c.multi.frequency_max},
                {"amplitude_min", c.multi.amplitude_min},
                {"amplitude_max", c.multi.amplitude_max},
                {"amplitude_scale", scale_name(c.multi.amplitude_scale)},
                {"snr_db", c.multi.snr_db ? json(*c.multi.snr_db) : json(nullptr)},
                {"init", init_name(c.multi.init)},
                {"surrogate", c.multi.surrogate},
                {"baseline", c.multi.baseline},
                {"random_control", c.multi.random_control}};
  json comps = json::array();
  for (const auto& comp : c.fit.components) {
    comps.push_back(
        {{"amplitude", comp.amplitude}, {"frequency", comp.frequency}, {"phase", comp.phase}});
  }
  j["fit"] = {{"length", c.fit.length},
              {"model", model_name(c.fit.model)},
              {"component_count", c.fit.component_count},
              {"components", comps},
              {"snr_db", c.fit.snr_db ? json(*c.fit.snr_db) : json(nullptr)},
              {"noise_sigma", c.fit.noise_sigma},
              {"init", init_name(c.fit.init)},
              {"input", c.fit.input}};
  return j;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& where, const std::string& what) {
    throw ValidationError("config " + where + ": " + what);
  };
  try {
    validate(c.optimizer);
  } catch (const ValidationError& e) {
    fail("/optimizer", e.what());
  }
  if (c.jobs == 0) fail("/jobs", "must be at least 1");
  switch (c.experiment) {
    case ExperimentKind::Landscape:
      if (c.landscape.lengths.empty()) fail("/landscape/lengths", "must not be empty");
      for (std::size_t n : c.landscape.lengths) {
        if (n < 2) fail("/landscape/lengths", "every length must be at least 2");
      }
      if (c.landscape.grid_points < 3) fail("/landscape/grid_points", "must be at least 3");
      if (!(c.landscape.grid_min < c.landscape.grid_max)) {
        fail("/landscape/grid_min", "must be below grid_max");
      }
      break;
    case ExperimentKind::Single:
      if (c.single.length < 3) fail("/single/length", "must be at least 3");
      if (c.single.frequency_steps < 1) fail("/single/frequency_steps", "must be at least 1");
      if (c.single.snr_steps < 1) fail("/single/snr_steps", "must be at least 1");
      if (c.single.seed_count < 1) fail("/single/seed_count", "must be at least 1");
      if (!(c.single.frequency_min > 0.0 && c.single.frequency_max < std::numbers::pi &&
            c.single.frequency_min <= c.single.frequency_max)) {
        fail("/single/frequency_min", "frequency range must lie inside (0, pi)");
      }
      break;
    case ExperimentKind::Multi:
      if (c.multi.length < 2) fail("/multi/length", "must be at least 2");
      if (c.multi.component_counts.empty()) fail("/multi/component_counts", "must not be empty");
      for (std::size_t k : c.multi.component_counts) {
        if (k < 1) fail("/multi/component_counts", "every count must be at least 1");
      }
      if (!(c.multi.amplitude_min > 0.0 && c.multi.amplitude_min <= c.multi.amplitude_max)) {
        fail("/multi/amplitude_min", "amplitude range must be positive and ordered");
      }
      if (!(c.multi.frequency_min > 0.0 && c.multi.frequency_max < std::numbers::pi &&
            c.multi.frequency_min <= c.multi.frequency_max)) {
        fail("/multi/frequency_min", "frequency range must lie inside (0, pi)");
      }
      break;
    case ExperimentKind::Fit:
      if (c.fit.input.empty()) {
        if (c.fit.length < 2) fail("/fit/length", "must be at least 2");
        if (c.fit.components.empty() && c.fit.snr_db) {
          fail("/fit/snr_db", "needs at least one target component");
        }
      }
      if (c.fit.component_count < 1) fail("/fit/component_count", "must be at least 1");
      break;
  }
  if (c.loss.tag == LossTag::DftMagMse && c.loss.dft_size != 0) {
    std::size_t n = 0;
    switch (c.experiment) {
      case ExperimentKind::Single: n = c.single.length; break;
      case ExperimentKind::Multi: n = c.multi.length; break;
      case ExperimentKind::Fit: n = c.fit.length; break;
      case ExperimentKind::Landscape: break;
    }
    if (c.loss.dft_size < n) fail("/loss/dft_size", "must not be smaller than the signal length");
  }
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  j.erase("jobs");
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

}  // namespace wsin

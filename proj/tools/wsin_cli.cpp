#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsin/config.hpp"
#include "wsin/error.hpp"
#include "wsin/experiments.hpp"
#include "wsin/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string scale;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> jobs;
  std::optional<std::size_t> trace_every;
  std::string loss;
  std::optional<std::size_t> dft_size;
  std::optional<std::size_t> steps;
  std::optional<double> lr;
  bool no_traces = false;
};

struct FitFlags {
  std::string input;
  std::string model;
  std::optional<std::size_t> components;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--scale", f.scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--trace-every", f.trace_every, "trace interval in steps (0: endpoints)");
  cmd->add_option("--loss", f.loss, "time-mse or dft-mag-mse")
      ->check(CLI::IsMember({"time-mse", "dft-mag-mse"}));
  cmd->add_option("--dft-size", f.dft_size, "DFT length for dft-mag-mse (0: signal length)");
  cmd->add_option("--steps", f.steps, "optimizer steps");
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_flag("--no-traces", f.no_traces, "skip per-run trace files");
}

wsin::ExperimentConfig resolve(wsin::ExperimentKind kind, const CommonFlags& f) {
  std::optional<wsin::Scale> scale;
  if (!f.scale.empty()) scale = wsin::parse_scale(f.scale);
  wsin::ExperimentConfig cfg =
      f.config_path.empty() ? wsin::default_config(kind, scale.value_or(wsin::Scale::Desk))
                            : wsin::load_config(f.config_path, kind, scale);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.trace_every) cfg.trace_every = *f.trace_every;
  if (!f.loss.empty()) cfg.loss.tag = wsin::parse_loss(f.loss);
  if (f.dft_size) cfg.loss.dft_size = *f.dft_size;
  if (f.steps) cfg.optimizer.steps = *f.steps;
  if (f.lr) cfg.optimizer.learning_rate = *f.lr;
  if (f.no_traces) cfg.write_traces = false;
  wsin::validate(cfg);
  return cfg;
}

std::string fmt_db(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// summarize: plot-ready tables from an output directory

using Table = std::vector<std::vector<std::string>>;

Table read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wsin::IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Table rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t column(const Table& t, const std::string& name, const fs::path& path) {
  if (t.empty()) throw wsin::IoError(path.string() + ": empty file");
  for (std::size_t i = 0; i < t[0].size(); ++i) {
    if (t[0][i] == name) return i;
  }
  throw wsin::IoError(path.string() + ": missing column " + name);
}

void summarize_landscape(const fs::path& dir) {
  const fs::path src = dir / "landscape.csv";
  const Table t = read_csv(src);
  const auto c_len = column(t, "length", src);
  const auto c_loss = column(t, "loss", src);
  const auto c_idx = column(t, "index", src);
  const auto c_w = column(t, "frequency", src);
  const auto c_v = column(t, "value", src);
  std::vector<std::string> curves;
  std::map<std::string, std::map<std::size_t, std::string>> values;
  std::map<std::size_t, std::string> freq;
  for (std::size_t r = 1; r < t.size(); ++r) {
    const std::string key = t[r][c_loss] + "_N" + t[r][c_len];
    if (!values.count(key)) curves.push_back(key);
    const std::size_t idx = std::stoul(t[r][c_idx]);
    values[key][idx] = t[r][c_v];
    freq[idx] = t[r][c_w];
  }
  std::vector<std::string> header{"frequency"};
  header.insert(header.end(), curves.begin(), curves.end());
  wsin::CsvWriter w(dir / "plot_landscape.csv", header);
  for (const auto& [idx, f] : freq) {
    std::vector<std::string> row{f};
    for (const auto& c : curves) row.push_back(values[c][idx]);
    w.row(row);
  }
}

void summarize_single(const fs::path& dir) {
  const fs::path src = dir / "aggregate.csv";
  const Table t = read_csv(src);
  const auto c_snr = column(t, "snr_db", src);
  const auto c_mean = column(t, "mean_db", src);
  const auto c_med = column(t, "median_db", src);
  const auto c_crlb = column(t, "crlb_db", src);
  wsin::CsvWriter w(dir / "plot_single.csv", {"snr_db", "mean_db", "median_db", "crlb_db"});
  for (std::size_t r = 1; r < t.size(); ++r) {
    w.row({t[r][c_snr], t[r][c_mean], t[r][c_med], t[r][c_crlb]});
  }
}

void summarize_multi(const fs::path& dir) {
  const fs::path src = dir / "aggregate.csv";
  const Table t = read_csv(src);
  const auto c_k = column(t, "components", src);
  const auto c_model = column(t, "model", src);
  const auto c_med = column(t, "median_db", src);
  const auto c_mean = column(t, "mean_db", src);
  std::vector<std::string> ks;
  std::map<std::string, std::map<std::string, std::pair<std::string, std::string>>> cells;
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (!cells.count(t[r][c_k])) ks.push_back(t[r][c_k]);
    cells[t[r][c_k]][t[r][c_model]] = {t[r][c_med], t[r][c_mean]};
  }
  const std::vector<std::string> models{"surrogate", "baseline", "random"};
  std::vector<std::string> header{"components"};
  for (const auto& m : models) {
    header.push_back(m + "_median_db");
    header.push_back(m + "_mean_db");
  }
  wsin::CsvWriter w(dir / "plot_multi.csv", header);
  for (const auto& k : ks) {
    std::vector<std::string> row{k};
    for (const auto& m : models) {
      const auto it = cells[k].find(m);
      row.push_back(it == cells[k].end() ? "" : it->second.first);
      row.push_back(it == cells[k].end() ? "" : it->second.second);
    }
    w.row(row);
  }
}

void summarize_fit(const fs::path& dir) {
  const fs::path src = dir / "summary.csv";
  const Table t = read_csv(src);
  const auto c_id = column(t, "run_id", src);
  const auto c_trace = column(t, "trace_file", src);
  std::vector<std::string> ids;
  std::map<std::string, std::map<std::size_t, std::pair<std::string, std::string>>> traces;
  std::map<std::size_t, bool> steps;
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (t[r][c_trace].empty()) continue;
    const fs::path tp = dir / t[r][c_trace];
    const Table tr = read_csv(tp);
    const auto s = column(tr, "step", tp);
    const auto l = column(tr, "loss", tp);
    const auto m = column(tr, "metric", tp);
    ids.push_back(t[r][c_id]);
    for (std::size_t i = 1; i < tr.size(); ++i) {
      const std::size_t step = std::stoul(tr[i][s]);
      traces[t[r][c_id]][step] = {tr[i][l], tr[i][m]};
      steps[step] = true;
    }
  }
  std::vector<std::string> header{"step"};
  for (const auto& id : ids) {
    header.push_back(id + "_loss");
    header.push_back(id + "_metric_db");
  }
  wsin::CsvWriter w(dir / "plot_fit.csv", header);
  for (const auto& [step, _] : steps) {
    std::vector<std::string> row{std::to_string(step)};
    for (const auto& id : ids) {
      const auto it = traces[id].find(step);
      row.push_back(it == traces[id].end() ? "" : it->second.first);
      row.push_back(it == traces[id].end() ? "" : it->second.second);
    }
    w.row(row);
  }
}

void summarize(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw wsin::IoError("cannot open " + (dir / "manifest.json").string());
  const nlohmann::json manifest = nlohmann::json::parse(in);
  const std::string kind = manifest.at("config").at("experiment").get<std::string>();
  if (kind == "landscape") {
    summarize_landscape(dir);
  } else if (kind == "single") {
    summarize_single(dir);
  } else if (kind == "multi") {
    summarize_multi(dir);
  } else {
    summarize_fit(dir);
  }
  std::cout << "wrote " << (dir / ("plot_" + kind + ".csv")).string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-descent sinusoid estimation with a complex surrogate"};
  app.require_subcommand(1);
  app.set_version_flag("--version", wsin::code_version());

  CommonFlags landscape_flags, single_flags, multi_flags, fit_flags;
  FitFlags fit_extra;
  std::string summarize_dir;
  bool print_config = false;

  auto* landscape = app.add_subcommand("landscape", "loss landscape sweep");
  add_common(landscape, landscape_flags);
  auto* single = app.add_subcommand("single", "single-sinusoid frequency x SNR x seed grid");
  add_common(single, single_flags);
  auto* multi = app.add_subcommand("multi", "multi-sinusoid surrogate vs baseline sweep");
  add_common(multi, multi_flags);
  auto* fit = app.add_subcommand("fit", "one fit with dense tracing");
  add_common(fit, fit_flags);
  fit->add_option("--input", fit_extra.input, "sample file (text, or .bin/.f64/.raw float64 LE)")
      ->check(CLI::ExistingFile);
  fit->add_option("--model", fit_extra.model, "surrogate, baseline or both")
      ->check(CLI::IsMember({"surrogate", "baseline", "both"}));
  fit->add_option("--components", fit_extra.components, "model component count")
      ->check(CLI::PositiveNumber);
  for (auto* cmd : {landscape, single, multi, fit}) {
    cmd->add_flag("--print-config", print_config, "print the resolved config and exit");
  }
  auto* summ = app.add_subcommand("summarize", "write plot-ready tables for an output directory");
  summ->add_option("dir", summarize_dir, "experiment output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (summ->parsed()) {
      summarize(summarize_dir);
      return 0;
    }
    if (landscape->parsed()) {
      const auto cfg = resolve(wsin::ExperimentKind::Landscape, landscape_flags);
      if (print_config) {
        std::cout << wsin::to_json(cfg).dump(2) << '\n';
        return 0;
      }
      const auto res = wsin::run_landscape(cfg);
      for (const auto& s : res.summaries) {
        std::cout << "N=" << s.length << " " << s.loss << ": argmin w=" << s.argmin_frequency
                  << " off-target minima=" << s.off_target_minima << " ripple=" << s.ripple
                  << '\n';
      }
    } else if (single->parsed()) {
      const auto cfg = resolve(wsin::ExperimentKind::Single, single_flags);
      if (print_config) {
        std::cout << wsin::to_json(cfg).dump(2) << '\n';
        return 0;
      }
      const auto res = wsin::run_single(cfg);
      for (const auto& a : res.aggregates) {
        std::cout << "SNR " << fmt_db(a.snr_db) << " dB: median " << fmt_db(a.median_db)
                  << " dB, mean " << fmt_db(a.mean_db) << " dB, CRLB " << fmt_db(a.crlb_db)
                  << " dB, failures " << a.failures << "/" << a.runs << '\n';
      }
    } else if (multi->parsed()) {
      const auto cfg = resolve(wsin::ExperimentKind::Multi, multi_flags);
      if (print_config) {
        std::cout << wsin::to_json(cfg).dump(2) << '\n';
        return 0;
      }
      const auto res = wsin::run_multi(cfg);
      for (const auto& a : res.aggregates) {
        std::cout << "|K|=" << a.components << " " << wsin::to_string(a.model) << ": median "
                  << fmt_db(a.median_db) << " dB (init " << fmt_db(a.median_init_db)
                  << " dB), failures " << a.failures << "/" << a.runs << '\n';
      }
    } else if (fit->parsed()) {
      auto cfg = resolve(wsin::ExperimentKind::Fit, fit_flags);
      if (!fit_extra.input.empty()) cfg.fit.input = fit_extra.input;
      if (fit_extra.model == "surrogate") cfg.fit.model = wsin::FitModelChoice::Surrogate;
      if (fit_extra.model == "baseline") cfg.fit.model = wsin::FitModelChoice::Baseline;
      if (fit_extra.model == "both") cfg.fit.model = wsin::FitModelChoice::Both;
      if (fit_extra.components) cfg.fit.component_count = *fit_extra.components;
      wsin::validate(cfg);
      if (print_config) {
        std::cout << wsin::to_json(cfg).dump(2) << '\n';
        return 0;
      }
      const auto res = wsin::run_fit(cfg);
      for (const auto& r : res.runs) {
        std::cout << r.run_id << ": spectral mse " << fmt_db(r.spectral_db) << " dB (init "
                  << fmt_db(r.init_spectral_db) << " dB), plateau drops " << r.plateau_drops
                  << '\n';
      }
      for (const auto& e : res.estimates) {
        std::cout << "  component " << e.index << ": w=" << e.frequency << " |z|=" << e.decay
                  << " alpha=" << e.amplitude << " alpha*=" << e.alpha_star << '\n';
      }
      if (res.estimate_status != "ok") std::cout << "  amplitude recovery: " << res.estimate_status << '\n';
    }
  } catch (const wsin::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const wsin::ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

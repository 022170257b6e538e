#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wsin/amplitude.hpp"
#include "wsin/config.hpp"
#include "wsin/error.hpp"
#include "wsin/experiments.hpp"
#include "wsin/fft.hpp"
#include "wsin/io.hpp"
#include "wsin/losses.hpp"
#include "wsin/metrics.hpp"
#include "wsin/optim.hpp"
#include "wsin/signal_model.hpp"
#include "wsin/surrogate.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw wsin::ValidationError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

wsin::LossKind loss_kind(const std::string& name, std::size_t dft_size) {
  return {wsin::parse_loss(name), dft_size};
}

wsin::ExperimentConfig config_from(const std::string& experiment, const std::string& scale,
                                   const py::object& overrides) {
  auto kind = wsin::parse_experiment(experiment);
  auto sc = wsin::parse_scale(scale);
  if (overrides.is_none()) return wsin::default_config(kind, sc);
  const std::string text = py::module_::import("json").attr("dumps")(overrides).cast<std::string>();
  return wsin::config_from_json(wsin::parse_config_text(text), kind, sc);
}

}  // namespace

PYBIND11_MODULE(_wsin, m) {
  m.doc() = "Gradient-descent sinusoid estimation with a complex-exponential surrogate";

  auto base = py::register_exception<wsin::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<wsin::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<wsin::DegenerateParameterError>(m, "DegenerateParameterError",
                                                         PyExc_ArithmeticError);
  py::register_exception<wsin::DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<wsin::ConditioningError>(m, "ConditioningError", PyExc_ArithmeticError);
  py::register_exception<wsin::IoError>(m, "IoError", PyExc_OSError);

  py::class_<wsin::SinusoidComponent>(m, "SinusoidComponent")
      .def(py::init<double, double, double>(), py::arg("amplitude"), py::arg("frequency"),
           py::arg("phase") = 0.0)
      .def_readwrite("amplitude", &wsin::SinusoidComponent::amplitude)
      .def_readwrite("frequency", &wsin::SinusoidComponent::frequency)
      .def_readwrite("phase", &wsin::SinusoidComponent::phase);

  py::class_<wsin::TargetSpec>(m, "TargetSpec")
      .def(py::init([](std::vector<wsin::SinusoidComponent> c, double sigma, std::size_t n) {
             return wsin::TargetSpec{std::move(c), sigma, n};
           }),
           py::arg("components"), py::arg("noise_sigma"), py::arg("length"))
      .def_readwrite("components", &wsin::TargetSpec::components)
      .def_readwrite("noise_sigma", &wsin::TargetSpec::noise_sigma)
      .def_readwrite("length", &wsin::TargetSpec::length);

  m.def("render_clean", [](const wsin::TargetSpec& s) { return to_array(wsin::render_clean(s)); });
  m.def("synthesize",
        [](const wsin::TargetSpec& s, std::uint64_t seed) {
          return to_array(wsin::synthesize(s, seed));
        },
        py::arg("spec"), py::arg("noise_seed"));
  m.def("snr_to_sigma", [](double snr_db, const Array& amps) {
    const auto a = to_vec(amps);
    return wsin::snr_to_sigma(snr_db, a);
  });

  py::class_<wsin::RealBaselineModel>(m, "RealBaselineModel")
      .def(py::init([](std::vector<double> w, std::vector<double> a, std::size_t n) {
             return wsin::RealBaselineModel{std::move(w), std::move(a), n};
           }),
           py::arg("frequencies"), py::arg("amplitudes"), py::arg("length"))
      .def_readwrite("frequencies", &wsin::RealBaselineModel::frequencies)
      .def_readwrite("amplitudes", &wsin::RealBaselineModel::amplitudes)
      .def_readwrite("length", &wsin::RealBaselineModel::length);

  m.def("baseline_forward",
        [](const wsin::RealBaselineModel& b) { return to_array(wsin::baseline_forward(b)); });
  m.def("baseline_backward", [](const wsin::RealBaselineModel& b, const Array& upstream) {
    const auto u = to_vec(upstream);
    const auto g = wsin::baseline_backward(b, u);
    return py::make_tuple(g.frequencies, g.amplitudes);
  });

  py::class_<wsin::SurrogateModel>(m, "SurrogateModel")
      .def(py::init([](std::vector<wsin::Complex> z, std::vector<double> a, std::size_t n,
                       double cap) { return wsin::SurrogateModel{std::move(z), std::move(a), n, cap}; }),
           py::arg("params"), py::arg("amplitudes"), py::arg("length"),
           py::arg("magnitude_cap") = 0.0)
      .def_readwrite("params", &wsin::SurrogateModel::params)
      .def_readwrite("amplitudes", &wsin::SurrogateModel::amplitudes)
      .def_readwrite("length", &wsin::SurrogateModel::length)
      .def_readwrite("magnitude_cap", &wsin::SurrogateModel::magnitude_cap)
      .def_property_readonly("cap", &wsin::SurrogateModel::cap)
      .def("__len__", &wsin::SurrogateModel::size);

  m.def("default_magnitude_cap", &wsin::default_magnitude_cap);
  m.def("surrogate_forward",
        [](const wsin::SurrogateModel& s) { return to_array(wsin::surrogate_forward(s)); });
  m.def("surrogate_backward",
        [](const wsin::SurrogateModel& s, const Array& upstream) {
          const auto u = to_vec(upstream);
          const auto g = wsin::surrogate_backward(s, u);
          return py::make_tuple(g.conj_wirtinger, g.amplitudes);
        },
        "Returns (dL/d conj z per component, dL/d amplitude per component).");
  m.def("extract_frequencies", [](const wsin::SurrogateModel& s) {
    py::list out;
    for (const auto& e : wsin::extract_frequencies(s)) {
      out.append(py::make_tuple(e.frequency, e.decay, e.amplitude));
    }
    return out;
  });
  m.def("init_params",
        [](std::size_t count, const std::string& mode, std::uint64_t seed, std::size_t length) {
          wsin::InitMode im;
          if (mode == "in-disk") {
            im = wsin::InitMode::InDisk;
          } else if (mode == "on-circle") {
            im = wsin::InitMode::OnCircle;
          } else {
            throw wsin::ValidationError("init mode must be in-disk or on-circle");
          }
          return wsin::init_params(count, im, seed, length);
        },
        py::arg("count"), py::arg("mode"), py::arg("seed"), py::arg("length"));

  m.def("dft",
        [](const Array& x, std::size_t size) {
          const auto v = to_vec(x);
          return wsin::dft(v, size == 0 ? v.size() : size).bins;
        },
        py::arg("signal"), py::arg("size") = 0);
  m.def("loss_forward",
        [](const std::string& loss, const Array& pred, const Array& target, std::size_t dft_size) {
          const auto p = to_vec(pred);
          const auto t = to_vec(target);
          return wsin::loss_forward(loss_kind(loss, dft_size), p, t);
        },
        py::arg("loss"), py::arg("predicted"), py::arg("target"), py::arg("dft_size") = 0);
  m.def("loss_backward",
        [](const std::string& loss, const Array& pred, const Array& target, std::size_t dft_size) {
          const auto p = to_vec(pred);
          const auto t = to_vec(target);
          return to_array(wsin::loss_backward(loss_kind(loss, dft_size), p, t));
        },
        py::arg("loss"), py::arg("predicted"), py::arg("target"), py::arg("dft_size") = 0);

  m.def("fit_surrogate",
        [](const wsin::SurrogateModel& init, const Array& target, const std::string& loss,
           double lr, std::size_t steps, std::size_t trace_every, double beta2) {
          const auto t = to_vec(target);
          wsin::FitOptions<wsin::SurrogateModel> opts;
          opts.loss = loss_kind(loss, 0);
          opts.adam.learning_rate = lr;
          opts.adam.steps = steps;
          opts.adam.beta2 = beta2;
          opts.trace_every = trace_every;
          wsin::FitResult<wsin::SurrogateModel> r;
          {
            py::gil_scoped_release release;
            r = wsin::fit(init, t, opts);
          }
          py::list trace;
          for (const auto& p : r.trace) trace.append(py::make_tuple(p.step, p.loss));
          return py::make_tuple(r.model, trace, r.cap_activations);
        },
        py::arg("init"), py::arg("target"), py::arg("loss") = "time-mse", py::arg("lr") = 1e-3,
        py::arg("steps") = 1000, py::arg("trace_every") = 100, py::arg("beta2") = 0.999,
        "Adam fit; returns (model, [(step, loss)], cap_activations).");
  m.def("fit_baseline",
        [](const wsin::RealBaselineModel& init, const Array& target, const std::string& loss,
           double lr, std::size_t steps, std::size_t trace_every) {
          const auto t = to_vec(target);
          wsin::FitOptions<wsin::RealBaselineModel> opts;
          opts.loss = loss_kind(loss, 0);
          opts.adam.learning_rate = lr;
          opts.adam.steps = steps;
          opts.trace_every = trace_every;
          wsin::FitResult<wsin::RealBaselineModel> r;
          {
            py::gil_scoped_release release;
            r = wsin::fit(init, t, opts);
          }
          py::list trace;
          for (const auto& p : r.trace) trace.append(py::make_tuple(p.step, p.loss));
          return py::make_tuple(r.model, trace);
        },
        py::arg("init"), py::arg("target"), py::arg("loss") = "time-mse", py::arg("lr") = 1e-3,
        py::arg("steps") = 1000, py::arg("trace_every") = 100);

  m.def("least_squares",
        [](py::array_t<double, py::array::f_style | py::array::forcecast> a, const Array& b) {
          if (a.ndim() != 2) throw wsin::ValidationError("A must be 2-D");
          wsin::DenseMatrix mat(a.shape(0), a.shape(1));
          std::copy(a.data(), a.data() + a.size(), mat.data.begin());
          const auto rhs = to_vec(b);
          return to_array(wsin::least_squares_qr(mat, rhs));
        });
  m.def("recover_amplitudes",
        [](const wsin::SurrogateModel& s, const std::string& rep, const std::string& basis) {
          wsin::Representation r;
          if (rep == "identity") {
            r.tag = wsin::RepresentationTag::Identity;
          } else if (rep == "dft-magnitude") {
            r.tag = wsin::RepresentationTag::DftMagnitude;
          } else {
            throw wsin::ValidationError("representation must be identity or dft-magnitude");
          }
          wsin::BasisFunction bf;
          if (basis == "cos") {
            bf = wsin::BasisFunction::Cos;
          } else if (basis == "sin") {
            bf = wsin::BasisFunction::Sin;
          } else {
            throw wsin::ValidationError("basis must be cos or sin");
          }
          const auto e = wsin::recover_amplitudes(s, r, bf);
          return py::make_tuple(to_array(e.least_squares), to_array(e.combined));
        },
        py::arg("model"), py::arg("representation") = "identity", py::arg("basis") = "cos");

  m.def("crlb_frequency",
        [](std::size_t length, double amplitude, double sigma) {
          return wsin::crlb_frequency({length, amplitude, sigma});
        },
        py::arg("length"), py::arg("amplitude"), py::arg("noise_sigma"));
  m.def("crlb_from_snr",
        [](double snr_db, std::size_t length) {
          return wsin::crlb_frequency(wsin::crlb_query_from_snr(snr_db, length));
        },
        py::arg("snr_db"), py::arg("length"));
  m.def("freq_sq_error", &wsin::freq_sq_error);
  m.def("spectral_mse_db",
        [](const Array& pred, const Array& target, std::size_t dft_size) {
          const auto p = to_vec(pred);
          const auto t = to_vec(target);
          return wsin::spectral_mse_db(p, t, dft_size).db;
        },
        py::arg("predicted"), py::arg("target"), py::arg("dft_size") = 0);

  m.def("derive_seed", [](std::uint64_t base, std::vector<std::uint64_t> coords) {
    return wsin::derive_seed(base, std::span<const std::uint64_t>(coords));
  });
  m.def("read_samples", [](const std::string& path) { return to_array(wsin::read_samples(path)); });

  m.def("resolve_config",
        [](const std::string& experiment, const std::string& scale, const py::object& overrides) {
          const auto cfg = config_from(experiment, scale, overrides);
          return wsin::to_json(cfg).dump();
        },
        py::arg("experiment"), py::arg("scale") = "desk", py::arg("overrides") = py::none(),
        "Canonical config as a JSON string.");
  m.def("run_experiment",
        [](const std::string& experiment, const std::string& scale, const py::object& overrides) {
          const auto cfg = config_from(experiment, scale, overrides);
          py::gil_scoped_release release;
          switch (cfg.experiment) {
            case wsin::ExperimentKind::Landscape: wsin::run_landscape(cfg); break;
            case wsin::ExperimentKind::Single: wsin::run_single(cfg); break;
            case wsin::ExperimentKind::Multi: wsin::run_multi(cfg); break;
            case wsin::ExperimentKind::Fit: wsin::run_fit(cfg); break;
          }
          return cfg.output_dir;
        },
        py::arg("experiment"), py::arg("scale") = "desk", py::arg("overrides") = py::none(),
        "Runs an experiment and writes its CSV outputs; returns the output directory.");

  m.attr("__version__") = wsin::code_version();
}

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "mlwin/error.hpp"
#include "mlwin/experiments.hpp"
#include "mlwin/mp_transform.hpp"
#include "mlwin/onset.hpp"
#include "mlwin/rootcheck.hpp"
#include "mlwin/signals.hpp"
#include "mlwin/tfr.hpp"
#include "mlwin/wav.hpp"
#include "mlwin/window.hpp"

namespace py = pybind11;
using namespace mlwin;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorKind::shape, "expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(std::span<const double> v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array grid(const RealTFR& T) {
  Array out({static_cast<py::ssize_t>(T.axes.frames), static_cast<py::ssize_t>(T.axes.bins)});
  std::copy(T.values.begin(), T.values.end(), out.mutable_data());
  return out;
}

py::dict axes_dict(const TfrAxes& a) {
  py::dict d;
  d["frames"] = a.frames;
  d["bins"] = a.bins;
  d["nfft"] = a.nfft;
  d["hop"] = a.hop;
  d["fs"] = a.fs;
  d["bin_hz"] = a.bin_hz;
  d["times"] = to_array(a.frame_times());
  d["freqs"] = to_array(a.bin_freqs());
  return d;
}

FrameStamp parse_stamp(const std::string& s) {
  if (auto v = stamp_from_tag(s)) return *v;
  throw Error(ErrorKind::invalid_spec, "unknown stamp '" + s + "'");
}

OnsetFeature parse_feature(const std::string& s) {
  if (s == "stft") return OnsetFeature::stft;
  if (s == "sst") return OnsetFeature::sst;
  throw Error(ErrorKind::invalid_spec, "feature must be stft or sst");
}

// STFT magnitude, SST or RM of a signal as (grid, axes).
py::tuple tfr(const Array& signal, double fs, const Window& w, const std::string& kind,
              std::size_t hop, std::size_t nfft, const std::string& stamp) {
  const auto x = to_vector(signal);
  StftOptions opt;
  opt.hop = hop;
  opt.nfft = nfft;
  opt.stamp = parse_stamp(stamp);
  const Analysis a = analyze(x, fs, w, opt);
  RealTFR T;
  if (kind == "stft") T = magnitude(a.V);
  else if (kind == "sst") T = sst(a.V, a.fields);
  else if (kind == "rm") T = rm(a.V, a.fields);
  else throw Error(ErrorKind::invalid_spec, "kind must be stft, sst or rm");
  return py::make_tuple(grid(T), axes_dict(T.axes));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Low-latency windows, minimum-phase transforms and time-frequency analysis";

  static py::exception<Error> error(m, "MlwinError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object inst = exc(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error.ptr(), inst.ptr());
    }
  });

  py::class_<Window>(m, "Window")
      .def(py::init([](const Array& taps, double tau) { return Window(to_vector(taps), tau); }),
           py::arg("taps"), py::arg("tau") = 1.0)
      .def_property_readonly("taps", [](const Window& w) { return to_array(w.taps()); })
      .def_property_readonly("tau", &Window::tau)
      .def_property_readonly("duration", &Window::duration)
      .def_property_readonly("energy", &Window::energy)
      .def_property_readonly("kind", [](const Window& w) { return kind_tag(w.provenance().kind); })
      .def("observation_order", [](const Window& w) { return to_array(w.observation_order()); })
      .def("is_symmetric", &Window::is_symmetric, py::arg("rel_tol") = 1e-12)
      .def("__len__", &Window::size)
      .def("__repr__", [](const Window& w) {
        return "<Window N=" + std::to_string(w.size()) + " kind=" + kind_tag(w.provenance().kind) + ">";
      });

  m.def(
      "cosine_window",
      [](const std::vector<double>& c, std::size_t n, double tau, bool periodic) {
        return make_cosine_window(c, n, tau, periodic ? CosineGrid::periodic : CosineGrid::symmetric);
      },
      py::arg("coefficients"), py::arg("n"), py::arg("tau") = 1.0, py::arg("periodic") = false);
  m.def(
      "derivative_window",
      [](const std::vector<double>& c, std::size_t n, double tau) {
        return make_derivative_window(c, n, tau);
      },
      py::arg("coefficients"), py::arg("n"), py::arg("tau") = 1.0);
  m.def("g729_window", &make_g729_window, py::arg("n") = 240, py::arg("tau") = 1.0);
  m.def("load_window", &load_window, py::arg("path"));
  m.def("save_window", &save_window, py::arg("path"), py::arg("window"));

  m.def("intrinsic_latency", &intrinsic_latency, py::arg("window"));
  m.def(
      "latency_report",
      [](const Window& w, const std::vector<double>& rates) {
        const auto r = latency_report(w, rates);
        py::dict d;
        d["observation_time"] = r.observation_time;
        d["estimation_time"] = r.estimation_time;
        d["intrinsic_latency"] = r.intrinsic_latency;
        d["narrowband_latency"] = r.narrowband_latency;
        d["extrinsic_curve"] = r.extrinsic_curve;
        return d;
      },
      py::arg("window"), py::arg("chirp_rates") = std::vector<double>{});

  m.def("eps_mp_transform", &eps_mp_transform, py::arg("window"), py::arg("epsilon") = 1e-8,
        py::arg("oversample") = 32);
  m.def("root_reflection_mp", &root_reflection_mp, py::arg("window"),
        py::arg("tol_circle") = 1e-9);
  m.def(
      "energy_concentration",
      [](const Window& h, const Window& hmp, double eps) {
        const auto r = energy_concentration_report(h, hmp, eps);
        py::dict d;
        d["margins"] = to_array(r.margins);
        d["min_margin"] = r.min_margin;
        d["eps_abs"] = r.eps_abs;
        d["holds"] = r.holds;
        return d;
      },
      py::arg("h"), py::arg("hmp"), py::arg("epsilon") = 1e-8);

  m.def(
      "check_roots",
      [](const Array& coeffs, const std::string& method, double q, double tol_circle) {
        const auto c = to_vector(coeffs);
        PalindromeTestReport r;
        if (method == "canonical") r = unit_circle_test_canonical(c, q);
        else if (method == "numeric") r = unit_circle_test_numeric(c, tol_circle);
        else if (method == "both") r = unit_circle_test_both(c, q, 1e-9, tol_circle);
        else throw Error(ErrorKind::invalid_spec, "method must be canonical, numeric or both");
        py::dict d;
        d["is_palindromic"] = r.is_palindromic;
        d["all_on_circle"] = r.all_on_circle;
        d["indeterminate"] = r.indeterminate;
        d["canonical_verdict"] = r.canonical_verdict;
        d["numeric_verdict"] = r.numeric_verdict;
        d["max_deviation"] = r.max_deviation;
        py::list w;
        for (const auto& x : r.witnesses) w.append(py::make_tuple(x.root, x.modulus));
        d["witnesses"] = w;
        return d;
      },
      py::arg("coefficients"), py::arg("method") = "both", py::arg("q") = 2.0,
      py::arg("tol_circle") = 1e-6);

  m.def("tfr", &tfr, py::arg("signal"), py::arg("fs"), py::arg("window"),
        py::arg("kind") = "stft", py::arg("hop") = 1, py::arg("nfft") = 0,
        py::arg("stamp") = "center");

  m.def("chirp_signal", [](double fs, double duration) {
    const auto x = gen_imt(chirp_example(fs, duration));
    return to_array(x);
  }, py::arg("fs") = 100.0, py::arg("duration") = 30.0);
  m.def(
      "onset_corpus",
      [](std::uint64_t seed, std::size_t events, double fs, std::optional<double> snr_db) {
        NoteModel model;
        model.snr_db = snr_db;
        const auto c = gen_onset_corpus(seed, events, fs, model);
        return py::make_tuple(to_array(c.samples), to_array(c.onsets));
      },
      py::arg("seed"), py::arg("events") = 40, py::arg("fs") = 5512.5,
      py::arg("snr_db") = py::none());
  m.def("read_wav", [](const std::string& path) {
    const auto w = read_wav(path);
    return py::make_tuple(to_array(w.samples), w.fs);
  }, py::arg("path"));

  m.def(
      "detect_onsets",
      [](const Array& signal, double fs, const Window& w, const std::string& feature,
         double p, std::size_t mu, std::size_t eta, double delta, std::size_t hop,
         const std::string& stamp) {
        OnsetParams opt;
        opt.feature = parse_feature(feature);
        opt.p = p;
        opt.mu = mu;
        opt.eta = eta;
        opt.peaks.delta = delta;
        opt.hop = hop;
        opt.stamp = parse_stamp(stamp);
        const auto r = detect_onsets(to_vector(signal), fs, w, opt);
        py::dict d;
        d["onsets"] = to_array(r.onsets);
        d["odf"] = to_array(r.odf.values);
        d["times"] = to_array(r.odf.frame_times);
        return d;
      },
      py::arg("signal"), py::arg("fs"), py::arg("window"), py::arg("feature") = "stft",
      py::arg("p") = 0.5, py::arg("mu") = 3, py::arg("eta") = 1, py::arg("delta") = 0.15,
      py::arg("hop") = 16, py::arg("stamp") = "observation");
  m.def(
      "evaluate",
      [](const Array& detected, const Array& truth, double sigma) {
        const auto r = evaluate(to_vector(detected), to_vector(truth), sigma);
        py::dict d;
        d["tp"] = r.tp;
        d["fp"] = r.fp;
        d["fn"] = r.fn;
        d["precision"] = r.precision;
        d["recall"] = r.recall;
        d["f_score"] = r.f_score;
        d["offsets"] = to_array(r.offsets);
        return d;
      },
      py::arg("detected"), py::arg("truth"), py::arg("sigma") = 0.05);

  m.def(
      "latency_table",
      [](std::size_t n, double epsilon, std::size_t oversample) {
        py::list out;
        for (const auto& r : latency_table(n, {epsilon, oversample})) {
          py::dict d;
          d["name"] = r.name;
          d["n"] = r.n;
          d["t_o"] = r.t_o;
          d["t_e"] = r.t_e;
          d["t_l"] = r.t_l;
          d["mp"] = r.mp_applied;
          out.append(d);
        }
        return out;
      },
      py::arg("n") = 65, py::arg("epsilon") = 1e-8, py::arg("oversample") = 32);
  m.def(
      "sweep_alpha",
      [](std::size_t n, double step) {
        const auto r = sweep_alpha(n, step);
        std::vector<double> a, l;
        for (const auto& p : r.curve) {
          a.push_back(p.alpha0);
          l.push_back(p.latency.value_or(std::numeric_limits<double>::quiet_NaN()));
        }
        return py::make_tuple(r.alpha_opt, r.latency_min, to_array(a), to_array(l));
      },
      py::arg("n") = 65, py::arg("step") = 0.005);
  m.def("chirp_shift", []() {
    const auto r = chirp_shift_experiment();
    py::dict d;
    d["predicted"] = r.predicted;
    d["sst_shift"] = r.sst_shift;
    d["rm_shift"] = r.rm_shift;
    d["stft_shift"] = r.stft_shift;
    d["hop_seconds"] = r.hop_seconds;
    return d;
  });
}

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mlwin/error.hpp"
#include "mlwin/experiments.hpp"
#include "mlwin/format.hpp"
#include "mlwin/mp_transform.hpp"
#include "mlwin/onset.hpp"
#include "mlwin/rootcheck.hpp"
#include "mlwin/signals.hpp"
#include "mlwin/tfr.hpp"
#include "mlwin/wav.hpp"
#include "mlwin/window.hpp"

using namespace mlwin;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_spec:
    case ErrorKind::size:
    case ErrorKind::shape: return 2;
    case ErrorKind::parse: return 3;
    case ErrorKind::model_violation: return 5;
    default: return 4;
  }
}

// Writes to the named file, or stdout when the name is empty.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw Error(ErrorKind::parse, "cannot open '" + path + "' for writing");
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> list_arg(const std::string& s, const char* what) {
  auto v = parse_double_list(s);
  if (!v) throw Error(ErrorKind::invalid_spec, std::string("bad ") + what + " list '" + s + "'");
  return *v;
}

std::size_t nfft_arg(const std::string& s) {
  if (s == "auto") return 0;
  auto v = parse_double(s);
  if (!v || *v < 1 || *v != std::floor(*v))
    throw Error(ErrorKind::invalid_spec, "nfft must be 'auto' or a positive integer");
  return static_cast<std::size_t>(*v);
}

FrameStamp stamp_arg(const std::string& s) {
  auto st = stamp_from_tag(s);
  if (!st) throw Error(ErrorKind::invalid_spec, "unknown stamp '" + s + "'");
  return *st;
}

CosineGrid grid_arg(const std::string& s) {
  if (s == "symmetric") return CosineGrid::symmetric;
  if (s == "periodic") return CosineGrid::periodic;
  throw Error(ErrorKind::invalid_spec, "unknown grid '" + s + "'");
}

std::string opt_str(const std::optional<bool>& b) {
  return b ? (*b ? "true" : "false") : "none";
}

std::string fmt(double v) { return std::isnan(v) ? "nan" : format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-latency window design and time-frequency analysis"};
  app.require_subcommand(1);

  // window -----------------------------------------------------------------
  auto* win = app.add_subcommand("window", "window design and inspection");
  win->require_subcommand(1);

  struct {
    std::string family = "cosine", coeffs, grid = "symmetric", out;
    std::size_t n = 65;
    double tau = 1.0;
  } design;
  auto* w_design = win->add_subcommand("design", "build a window");
  w_design->add_option("--family", design.family, "cosine | sine | g729")
      ->check(CLI::IsMember({"cosine", "sine", "g729"}));
  w_design->add_option("--coeffs", design.coeffs, "alpha_0,alpha_1,...");
  w_design->add_option("--n", design.n, "number of taps")->required();
  w_design->add_option("--tau", design.tau, "sampling period, seconds");
  w_design->add_option("--grid", design.grid, "symmetric | periodic");
  w_design->add_option("--out", design.out, "window CSV (stdout if omitted)");

  struct {
    std::string in, out, method = "eps";
    double epsilon = 1e-8, tol = 1e-9;
    std::size_t oversample = 32;
  } mp;
  auto* w_mp = win->add_subcommand("mp", "minimum-phase companion of a window");
  w_mp->add_option("--in", mp.in)->required();
  w_mp->add_option("--epsilon", mp.epsilon, "relative to peak magnitude");
  w_mp->add_option("--oversample", mp.oversample);
  w_mp->add_option("--method", mp.method, "eps | reflect")
      ->check(CLI::IsMember({"eps", "reflect"}));
  w_mp->add_option("--tol", mp.tol, "unit-circle tolerance for reflect");
  w_mp->add_option("--out", mp.out);

  struct {
    std::string in, method = "both", out;
    double q = 2.0, tol = 1e-9, tol_circle = 1e-6;
  } roots;
  auto* w_roots = win->add_subcommand("check-roots", "unit-circle test of the z-transform");
  w_roots->add_option("--in", roots.in)->required();
  w_roots->add_option("--method", roots.method, "canonical | numeric | both")
      ->check(CLI::IsMember({"canonical", "numeric", "both"}));
  w_roots->add_option("--q", roots.q);
  w_roots->add_option("--tol", roots.tol);
  w_roots->add_option("--tol-circle", roots.tol_circle);
  w_roots->add_option("--out", roots.out, "witness CSV (appended to stdout if omitted)");

  struct {
    std::string in, rates, out;
  } report;
  auto* w_report = win->add_subcommand("report", "latency report");
  w_report->add_option("--in", report.in)->required();
  w_report->add_option("--chirp-rates", report.rates, "Hz/s list for the extrinsic curve");
  w_report->add_option("--out", report.out);

  // tfr --------------------------------------------------------------------
  auto* tfr = app.add_subcommand("tfr", "time-frequency representations");
  tfr->require_subcommand(1);

  struct {
    std::string wav, window, nfft = "auto", kind = "stft", reject, delta = "auto",
                stamp = "center", out, csv;
    std::size_t hop = 16;
  } tc;
  auto* t_compute = tfr->add_subcommand("compute", "STFT magnitude, SST or RM of a WAV file");
  t_compute->add_option("--wav", tc.wav)->required();
  t_compute->add_option("--window", tc.window)->required();
  t_compute->add_option("--hop", tc.hop);
  t_compute->add_option("--nfft", tc.nfft, "auto | integer");
  t_compute->add_option("--kind", tc.kind)->check(CLI::IsMember({"stft", "sst", "rm"}));
  t_compute->add_option("--reject", tc.reject, "h | h,hprime (sst only)");
  t_compute->add_option("--delta", tc.delta, "auto | bins");
  t_compute->add_option("--stamp", tc.stamp, "center | observation | estimation");
  t_compute->add_option("--out", tc.out, "float32 grid, sidecar at <out>.hdr")->required();
  t_compute->add_option("--csv", tc.csv, "also write (time, freq, value) CSV");

  struct {
    std::string in, band, out;
  } tr;
  auto* t_ridge = tfr->add_subcommand("ridge", "per-frame maximum inside a band");
  t_ridge->add_option("--in", tr.in)->required();
  t_ridge->add_option("--band", tr.band, "lo,hi in Hz")->required();
  t_ridge->add_option("--out", tr.out);

  // onset ------------------------------------------------------------------
  auto* onset = app.add_subcommand("onset", "onset detection");
  onset->require_subcommand(1);

  struct {
    std::string wav, window, feature = "stft", nfft = "auto", stamp = "observation", out, odf;
    double p = 0.5, delta = 0.15, combine = 0.03;
    std::size_t mu = 3, eta = 1, hop = 16;
    bool literal = false;
  } od;
  auto* o_detect = onset->add_subcommand("detect", "spectral-flux onset detection");
  o_detect->add_option("--wav", od.wav)->required();
  o_detect->add_option("--window", od.window)->required();
  o_detect->add_option("--feature", od.feature)->check(CLI::IsMember({"stft", "sst"}));
  o_detect->add_option("--p", od.p);
  o_detect->add_option("--mu", od.mu);
  o_detect->add_option("--eta", od.eta);
  o_detect->add_option("--delta", od.delta);
  o_detect->add_option("--combine", od.combine, "minimum inter-onset span, seconds");
  o_detect->add_flag("--literal", od.literal, "no window-length widening of --combine");
  o_detect->add_option("--hop", od.hop);
  o_detect->add_option("--nfft", od.nfft);
  o_detect->add_option("--stamp", od.stamp);
  o_detect->add_option("--out", od.out);
  o_detect->add_option("--odf", od.odf, "also write the ODF CSV");

  struct {
    std::string detected, truth, out;
    double sigma = 0.05;
  } oe;
  auto* o_eval = onset->add_subcommand("eval", "F-score against annotations");
  o_eval->add_option("--detected", oe.detected)->required();
  o_eval->add_option("--truth", oe.truth)->required();
  o_eval->add_option("--sigma", oe.sigma);
  o_eval->add_option("--out", oe.out);

  // signal -----------------------------------------------------------------
  auto* sig = app.add_subcommand("signal", "synthetic test signals");
  sig->require_subcommand(1);

  struct {
    std::uint64_t seed = 7;
    std::size_t events = 40;
    double fs = 5512.5;
    std::optional<double> snr;
    std::string wav, truth;
  } sc;
  auto* s_corpus = sig->add_subcommand("corpus", "synthetic onset corpus");
  s_corpus->add_option("--seed", sc.seed);
  s_corpus->add_option("--events", sc.events);
  s_corpus->add_option("--fs", sc.fs);
  s_corpus->add_option("--snr", sc.snr, "add white noise at this SNR (dB)");
  s_corpus->add_option("--wav", sc.wav)->required();
  s_corpus->add_option("--truth", sc.truth)->required();

  struct {
    double fs = 100, duration = 30;
    std::string wav;
  } sch;
  auto* s_chirp = sig->add_subcommand("chirp", "cos(4 pi t + 30 cos(pi t / 15))");
  s_chirp->add_option("--fs", sch.fs);
  s_chirp->add_option("--duration", sch.duration);
  s_chirp->add_option("--wav", sch.wav)->required();

  // exp ----------------------------------------------------------------------
  auto* ex = app.add_subcommand("exp", "scripted experiments");
  ex->require_subcommand(1);
  struct {
    std::size_t n = 65, g729_n = 240;
    double step = 0.005, epsilon = 1e-8;
    std::size_t oversample = 32;
    std::uint64_t seed = 7;
    std::string out;
  } xe;
  auto add_mp = [&](CLI::App* c) {
    c->add_option("--epsilon", xe.epsilon);
    c->add_option("--oversample", xe.oversample);
    c->add_option("--out", xe.out);
  };
  auto* x_table = ex->add_subcommand("table2", "intrinsic latency table");
  x_table->add_option("--n", xe.n);
  x_table->add_option("--g729-n", xe.g729_n, "G.729 length, multiple of 6");
  add_mp(x_table);
  auto* x_sweep = ex->add_subcommand("sweep-alpha", "2-term alpha0 sweep");
  x_sweep->add_option("--n", xe.n);
  x_sweep->add_option("--step", xe.step);
  add_mp(x_sweep);
  auto* x_chirp = ex->add_subcommand("chirp-shift", "flat-top vs MP flat-top on the chirp");
  add_mp(x_chirp);
  auto* x_bench = ex->add_subcommand("benchmark", "onset benchmark over windows and lengths");
  x_bench->add_option("--seed", xe.seed);
  add_mp(x_bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const MpSettings mps{xe.epsilon, xe.oversample};

    if (*w_design) {
      std::optional<Window> w;
      if (design.family == "g729") {
        w = make_g729_window(design.n, design.tau);
      } else {
        if (design.coeffs.empty()) throw Error(ErrorKind::invalid_spec, "--coeffs is required");
        const auto c = list_arg(design.coeffs, "coefficient");
        const auto g = grid_arg(design.grid);
        w = design.family == "cosine" ? make_cosine_window(c, design.n, design.tau, g)
                                      : make_derivative_window(c, design.n, design.tau, g);
      }
      Sink out(design.out);
      write_window_csv(out.get(), *w);
    } else if (*w_mp) {
      const Window w = load_window(mp.in);
      const Window m = mp.method == "eps" ? eps_mp_transform(w, mp.epsilon, mp.oversample)
                                          : root_reflection_mp(w, mp.tol);
      Sink out(mp.out);
      write_window_csv(out.get(), m);
    } else if (*w_roots) {
      const Window w = load_window(roots.in);
      const RootMethod method = roots.method == "canonical" ? RootMethod::canonical
                                : roots.method == "numeric" ? RootMethod::numeric
                                                            : RootMethod::both;
      const auto r = check_window_roots(w, method, roots.q, roots.tol, roots.tol_circle);
      std::cout << "is_palindromic=" << (r.is_palindromic ? "true" : "false") << '\n'
                << "all_on_circle=" << (r.all_on_circle ? "true" : "false") << '\n'
                << "indeterminate=" << (r.indeterminate ? "true" : "false") << '\n'
                << "canonical_verdict=" << opt_str(r.canonical_verdict) << '\n'
                << "numeric_verdict=" << opt_str(r.numeric_verdict) << '\n'
                << "degree_reductions=" << r.degree_reductions.size() << '\n'
                << "max_deviation=" << fmt(r.max_deviation) << '\n';
      if (r.failing_step) std::cout << "failing_step=" << *r.failing_step << '\n';
      std::ostringstream csv;
      csv << "re,im,modulus\n";
      for (const auto& wt : r.witnesses)
        csv << fmt(wt.root.real()) << ',' << fmt(wt.root.imag()) << ',' << fmt(wt.modulus) << '\n';
      if (roots.out.empty()) {
        if (!r.witnesses.empty()) std::cout << '\n' << csv.str();
      } else {
        Sink out(roots.out);
        out.get() << csv.str();
      }
    } else if (*w_report) {
      const Window w = load_window(report.in);
      std::vector<double> rates;
      if (!report.rates.empty()) rates = list_arg(report.rates, "chirp rate");
      const auto r = latency_report(w, rates);
      Sink sink(report.out);
      auto& out = sink.get();
      out << "quantity,value\n"
          << "N," << w.size() << '\n'
          << "tau," << fmt(w.tau()) << '\n'
          << "observation_time," << fmt(r.observation_time) << '\n'
          << "estimation_time," << fmt(r.estimation_time) << '\n'
          << "intrinsic_latency," << fmt(r.intrinsic_latency) << '\n'
          << "intrinsic_latency_over_Ntau," << fmt(r.intrinsic_latency / w.duration()) << '\n'
          << "narrowband_latency,"
          << (r.narrowband_latency ? fmt(*r.narrowband_latency) : "none") << '\n';
      for (const auto& [c, v] : r.extrinsic_curve)
        out << "extrinsic_latency@" << fmt(c) << ',' << fmt(v) << '\n';
    } else if (*t_compute) {
      const WavData x = read_wav(tc.wav);
      const Window w = load_window(tc.window);
      StftOptions opt;
      opt.hop = tc.hop;
      opt.nfft = nfft_arg(tc.nfft);
      opt.stamp = stamp_arg(tc.stamp);
      RealTFR T;
      if (tc.kind == "stft") {
        if (!tc.reject.empty()) throw Error(ErrorKind::invalid_spec, "--reject needs --kind sst");
        T = magnitude(stft(x.samples, x.fs, w, opt));
      } else {
        const Analysis a = analyze(x.samples, x.fs, w, opt);
        if (tc.kind == "rm") {
          if (!tc.reject.empty()) throw Error(ErrorKind::invalid_spec, "--reject needs --kind sst");
          T = rm(a.V, a.fields);
        } else {
          std::vector<RejectionRule> rules;
          if (!tc.reject.empty()) {
            if (tc.reject != "h" && tc.reject != "h,hprime")
              throw Error(ErrorKind::invalid_spec, "--reject must be h or h,hprime");
            const double delta = tc.delta == "auto" ? auto_delta_bins(w, a.V.axes.nfft)
                                                    : parse_double(tc.delta).value_or(-1.0);
            StftOptions ropt = opt;
            ropt.nfft = a.V.axes.nfft;
            ropt.theta = a.fields.theta;
            rules.push_back(make_rejection_rule(x.samples, x.fs, w, ropt, RuleShape::main_lobe, delta));
            if (tc.reject == "h,hprime") {
              const auto& pv = w.provenance();
              if (pv.kind != WindowKind::cosine_series)
                throw Error(ErrorKind::invalid_spec, "h' needs a cosine-series window with coefficients");
              const Window hp = make_derivative_window(pv.coefficients, w.size(), w.tau(), pv.grid);
              rules.push_back(make_rejection_rule(x.samples, x.fs, hp, ropt, RuleShape::offset, delta));
            }
          }
          T = sst(a.V, a.fields, rules);
        }
      }
      save_tfr(tc.out, T);
      if (!tc.csv.empty()) {
        Sink out(tc.csv);
        write_tfr_csv(out.get(), T);
      }
      if (T.dropped) std::cerr << "dropped=" << T.dropped << '\n';
    } else if (*t_ridge) {
      const RealTFR T = load_tfr(tr.in);
      const auto band = list_arg(tr.band, "band");
      if (band.size() != 2) throw Error(ErrorKind::invalid_spec, "--band needs lo,hi");
      const auto ridge = ridge_extract(T, band[0], band[1]);
      Sink out(tr.out);
      write_ridge_csv(out.get(), ridge);
    } else if (*o_detect) {
      const WavData x = read_wav(od.wav);
      const Window w = load_window(od.window);
      OnsetParams p;
      p.feature = od.feature == "sst" ? OnsetFeature::sst : OnsetFeature::stft;
      p.p = od.p;
      p.mu = od.mu;
      p.eta = od.eta;
      p.peaks.delta = od.delta;
      p.peaks.combine = od.combine;
      p.combine_over_window = !od.literal;
      p.hop = od.hop;
      p.nfft = nfft_arg(od.nfft);
      p.stamp = stamp_arg(od.stamp);
      const auto r = detect_onsets(x.samples, x.fs, w, p);
      Sink out(od.out);
      write_onsets_csv(out.get(), r.onsets);
      if (!od.odf.empty()) {
        Sink o(od.odf);
        write_odf_csv(o.get(), r.odf);
      }
    } else if (*o_eval) {
      const auto det = load_annotations(oe.detected);
      const auto truth = load_annotations(oe.truth);
      Sink out(oe.out);
      write_eval(out.get(), evaluate(det, truth, oe.sigma));
    } else if (*s_corpus) {
      NoteModel m;
      m.snr_db = sc.snr;
      const auto c = gen_onset_corpus(sc.seed, sc.events, sc.fs, m);
      write_wav(sc.wav, c.samples, c.fs);
      save_annotations(sc.truth, c.onsets);
    } else if (*s_chirp) {
      write_wav(sch.wav, gen_imt(chirp_example(sch.fs, sch.duration)), sch.fs);
    } else if (*x_table) {
      Sink out(xe.out);
      write_latency_table(out.get(), latency_table(xe.n, mps, xe.g729_n));
    } else if (*x_sweep) {
      Sink out(xe.out);
      write_sweep(out.get(), sweep_alpha(xe.n, xe.step, mps));
    } else if (*x_chirp) {
      ChirpSettings s;
      s.mp = mps;
      const auto r = chirp_shift_experiment(s);
      Sink out(xe.out);
      write_chirp(out.get(), r);
      std::cerr << "predicted " << fmt(r.predicted) << " s, SST lead " << fmt(r.sst_shift)
                << " s, RM lead " << fmt(r.rm_shift) << " s\n";
    } else if (*x_bench) {
      BenchmarkSettings s;
      s.mp = mps;
      Sink out(xe.out);
      write_benchmark(out.get(), onset_benchmark(benchmark_families(), xe.seed, s));
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

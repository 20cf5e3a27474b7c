#include "mlwin/signals.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "mlwin/error.hpp"
#include "mlwin/format.hpp"

namespace mlwin {

namespace {

constexpr double pi = std::numbers::pi;

std::size_t sample_count(const ImtSpec& s) {
  if (!(s.fs > 0.0)) throw Error(ErrorKind::invalid_spec, "sampling rate must be positive");
  if (!(s.duration > 0.0)) throw Error(ErrorKind::invalid_spec, "duration must be positive");
  return static_cast<std::size_t>(std::llround(s.duration * s.fs));
}

double derivative(const RealFn& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

double second_derivative(const RealFn& f, double t, double h) {
  return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

[[noreturn]] void violation(const std::string& what, std::size_t comp, double t, double value,
                            double bound) {
  std::ostringstream os;
  os << what << " violated for component " << comp << " at t=" << format_double(t)
     << " (value " << format_double(value) << ", bound " << format_double(bound) << ")";
  throw Error(ErrorKind::model_violation, os.str());
}

// 53-bit uniform in [0, 1) and Box-Muller normals; fixed formulas so corpora
// do not depend on the standard library's distribution implementations.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
  }
};

}  // namespace

void check_model(const ImtSpec& spec) {
  const std::size_t n = sample_count(spec);
  const ModelParams& p = spec.params;
  const double h = 0.5 / spec.fs;
  if (spec.components.empty()) throw Error(ErrorKind::invalid_spec, "no components");

  // Worst-case margins per condition, so the error names the worst point.
  struct Worst { double excess = 0; std::size_t comp = 0; double t = 0, value = 0, bound = 0; bool hit = false; };
  Worst amp_range, if_range, amp_slope, if_slope, separation;
  auto note = [](Worst& w, double excess, std::size_t c, double t, double v, double b,
                 bool strict = false) {
    const bool bad = strict ? excess >= 0 : excess > 0;
    if (bad && (!w.hit || excess > w.excess)) w = {excess, c, t, v, b, true};
  };

  std::vector<double> prev_if;
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    const ImtComponent& comp = spec.components[c];
    if (!comp.amplitude || !comp.phase)
      throw Error(ErrorKind::invalid_spec, "component lacks amplitude or phase");
    std::vector<double> cur_if(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / spec.fs;
      const double a = comp.amplitude(t);
      const double ad = comp.amplitude_d ? comp.amplitude_d(t) : derivative(comp.amplitude, t, h);
      const double f = comp.phase_d ? comp.phase_d(t) : derivative(comp.phase, t, h);
      const double fd = comp.phase_dd ? comp.phase_dd(t) : second_derivative(comp.phase, t, h);
      cur_if[i] = f;
      note(amp_range, std::max(p.c1 - a, a - p.c2), c, t, a, a < p.c1 ? p.c1 : p.c2);
      note(if_range, std::max(p.c1 - f, f - p.c2), c, t, f, f < p.c1 ? p.c1 : p.c2);
      note(amp_slope, std::abs(ad) - p.epsilon * f, c, t, std::abs(ad), p.epsilon * f);
      note(if_slope, std::abs(fd) - p.epsilon * f, c, t, std::abs(fd), p.epsilon * f);
      if (!prev_if.empty()) {
        const double gap = f - prev_if[i];
        note(separation, p.d - gap, c, t, gap, p.d, true);
      }
    }
    prev_if = std::move(cur_if);
  }
  if (amp_range.hit) violation("amplitude bound c1 <= A <= c2", amp_range.comp, amp_range.t, amp_range.value, amp_range.bound);
  if (if_range.hit) violation("frequency bound c1 <= phi' <= c2", if_range.comp, if_range.t, if_range.value, if_range.bound);
  if (amp_slope.hit) violation("slow amplitude |A'| <= eps phi'", amp_slope.comp, amp_slope.t, amp_slope.value, amp_slope.bound);
  if (if_slope.hit) violation("slow frequency |phi''| <= eps phi'", if_slope.comp, if_slope.t, if_slope.value, if_slope.bound);
  if (separation.hit) violation("separation phi'_{l+1} - phi'_l > d", separation.comp, separation.t, separation.value, separation.bound);
}

std::vector<double> gen_imt(const ImtSpec& spec) {
  check_model(spec);
  const std::size_t n = sample_count(spec);
  std::vector<double> x(n, 0.0);
  for (const auto& c : spec.components)
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / spec.fs;
      x[i] += c.amplitude(t) * std::cos(2.0 * pi * c.phase(t));
    }
  return x;
}

ImtSpec chirp_example(double fs, double duration) {
  ImtSpec s;
  s.fs = fs;
  s.duration = duration;
  ImtComponent c;
  c.amplitude = [](double) { return 1.0; };
  c.amplitude_d = [](double) { return 0.0; };
  c.phase = [](double t) { return 2.0 * t + (15.0 / pi) * std::cos(pi * t / 15.0); };
  c.phase_d = [](double t) { return 2.0 - std::sin(pi * t / 15.0); };
  c.phase_dd = [](double t) { return -(pi / 15.0) * std::cos(pi * t / 15.0); };
  s.components.push_back(std::move(c));
  s.params = {0.25, 0.0, 0.5, 4.0};
  return s;
}

ImtSpec pure_tone(double freq, double fs, double duration, double amplitude) {
  ImtSpec s;
  s.fs = fs;
  s.duration = duration;
  ImtComponent c;
  c.amplitude = [amplitude](double) { return amplitude; };
  c.amplitude_d = [](double) { return 0.0; };
  c.phase = [freq](double t) { return freq * t; };
  c.phase_d = [freq](double) { return freq; };
  c.phase_dd = [](double) { return 0.0; };
  s.components.push_back(std::move(c));
  return s;
}

OnsetCorpus gen_onset_corpus(std::uint64_t seed, std::size_t n_events, double fs,
                             const NoteModel& m) {
  if (n_events < 1) throw Error(ErrorKind::invalid_spec, "corpus needs at least one event");
  if (!(fs > 0.0)) throw Error(ErrorKind::invalid_spec, "sampling rate must be positive");
  if (m.min_gap < 0.2 || m.max_gap < m.min_gap)
    throw Error(ErrorKind::invalid_spec, "inter-onset gaps must be at least 200 ms");

  Rng rng(seed);
  OnsetCorpus c;
  c.fs = fs;
  std::vector<std::size_t> starts;
  double t = m.lead;
  for (std::size_t e = 0; e < n_events; ++e) {
    const auto s = static_cast<std::size_t>(std::llround(t * fs));
    starts.push_back(s);
    c.onsets.push_back(static_cast<double>(s) / fs);
    t += rng.uniform(m.min_gap, m.max_gap);
  }
  const auto total = static_cast<std::size_t>(std::llround((c.onsets.back() + m.tail) * fs));
  c.samples.assign(total, 0.0);

  const double attack_n = std::max(1.0, m.attack * fs);
  for (std::size_t s : starts) {
    const double f0 = m.f0_min * std::pow(m.f0_max / m.f0_min, rng.uniform());
    const double amp = rng.uniform(m.amp_min, m.amp_max);
    const double decay = rng.uniform(m.decay_min, m.decay_max);
    const double phase0 = rng.uniform();
    const auto len = std::min(total - s, static_cast<std::size_t>(10.0 * decay * fs));
    for (int k = 1; k <= m.harmonics; ++k) {
      const double fk = f0 * k;
      if (fk >= 0.45 * fs) break;
      const double ak = amp / k;
      for (std::size_t i = 0; i < len; ++i) {
        const double ti = static_cast<double>(i) / fs;
        const double env = std::min(1.0, (static_cast<double>(i) + 1.0) / attack_n) *
                           std::exp(-ti / decay);
        c.samples[s + i] += ak * env * std::sin(2.0 * pi * (fk * ti + phase0 * k));
      }
    }
  }

  if (m.snr_db) {
    double power = 0.0;
    for (double v : c.samples) power += v * v;
    power /= static_cast<double>(c.samples.size());
    const double sigma = std::sqrt(power / std::pow(10.0, *m.snr_db / 10.0));
    for (double& v : c.samples) v += sigma * rng.normal();
  }
  return c;
}

std::vector<double> read_annotations(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string_view cell(line);
    cell.remove_prefix(first);
    if (auto sep = cell.find_first_of(",\t "); sep != std::string_view::npos) cell = cell.substr(0, sep);
    auto v = parse_double(cell);
    if (!v) {
      if (lineno == 1 && out.empty()) continue;  // tolerate a CSV header line
      throw Error(ErrorKind::parse, "line " + std::to_string(lineno) + ": bad onset time '" + line + "'");
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<double> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  return read_annotations(in);
}

void write_annotations(std::ostream& out, const std::vector<double>& onsets) {
  for (double t : onsets) out << format_double(t) << '\n';
}

void save_annotations(const std::string& path, const std::vector<double>& onsets) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::parse, "cannot open '" + path + "' for writing");
  write_annotations(out, onsets);
}

}  // namespace mlwin

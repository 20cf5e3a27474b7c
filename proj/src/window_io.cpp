#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "mlwin/error.hpp"
#include "mlwin/format.hpp"
#include "mlwin/window.hpp"

namespace mlwin {

namespace {

std::optional<WindowKind> kind_from_tag(std::string_view tag) {
  for (auto k : {WindowKind::cosine_series, WindowKind::sine_taper, WindowKind::g729,
                 WindowKind::mp_derived, WindowKind::custom})
    if (kind_tag(k) == tag) return k;
  return std::nullopt;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

void write_window_csv(std::ostream& out, const Window& w) {
  const Provenance& p = w.provenance();
  out << "# tau=" << format_double(w.tau()) << " kind=" << kind_tag(p.kind);
  if (!p.coefficients.empty()) {
    out << " coeffs=";
    for (std::size_t i = 0; i < p.coefficients.size(); ++i)
      out << (i ? "," : "") << format_double(p.coefficients[i]);
    out << " grid=" << (p.grid == CosineGrid::symmetric ? "symmetric" : "periodic");
  }
  out << '\n';
  for (double v : w.taps()) out << format_double(v) << '\n';
}

Window read_window_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  double tau = 0.0;
  bool have_tau = false;
  Provenance prov;
  std::vector<double> taps;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (have_tau || !taps.empty()) continue;  // later comments are ignored
      std::istringstream fields(line.substr(1));
      std::string field;
      while (fields >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) parse_fail(lineno, "malformed header field '" + field + "'");
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "tau") {
          auto v = parse_double(value);
          if (!v) parse_fail(lineno, "bad tau value '" + value + "'");
          tau = *v;
          have_tau = true;
        } else if (key == "kind") {
          auto k = kind_from_tag(value);
          if (!k) parse_fail(lineno, "unknown window kind '" + value + "'");
          prov.kind = *k;
        } else if (key == "coeffs") {
          auto list = parse_double_list(value);
          if (!list) parse_fail(lineno, "bad coefficient list '" + value + "'");
          prov.coefficients = std::move(*list);
        } else if (key == "grid") {
          if (value == "symmetric") prov.grid = CosineGrid::symmetric;
          else if (value == "periodic") prov.grid = CosineGrid::periodic;
          else parse_fail(lineno, "unknown grid '" + value + "'");
        }
      }
      continue;
    }
    std::string_view cell = line;
    if (auto comma = cell.find(','); comma != std::string_view::npos) cell = cell.substr(0, comma);
    auto v = parse_double(cell);
    if (!v) parse_fail(lineno, "bad tap value '" + line + "'");
    taps.push_back(*v);
  }
  if (!have_tau) throw Error(ErrorKind::parse, "window file has no '# tau=' header");
  if (taps.empty()) throw Error(ErrorKind::parse, "window file has no taps");
  return Window(std::move(taps), tau, std::move(prov));
}

void save_window(const std::string& path, const Window& w) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::parse, "cannot open '" + path + "' for writing");
  write_window_csv(out, w);
}

Window load_window(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  return read_window_csv(in);
}

}  // namespace mlwin

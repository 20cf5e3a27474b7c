#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>

#include "mlwin/error.hpp"
#include "mlwin/format.hpp"
#include "mlwin/tfr.hpp"

namespace mlwin {

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

}  // namespace

void save_tfr(const std::string& path, const RealTFR& T) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error(ErrorKind::parse, "cannot open '" + path + "' for writing");
  for (double v : T.values) {
    const auto f = static_cast<float>(v);
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof u);
    u = to_le(u);
    bin.write(reinterpret_cast<const char*>(&u), sizeof u);
  }
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw Error(ErrorKind::parse, "cannot write header for '" + path + "'");
  const TfrAxes& a = T.axes;
  hdr << "format=float32-le-row-major\n"
      << "rows=" << a.frames << "\n"
      << "cols=" << a.bins << "\n"
      << "hop_seconds=" << format_double(a.hop_s) << "\n"
      << "bin_hz=" << format_double(a.bin_hz) << "\n"
      << "first_frame_time=" << format_double(a.t0) << "\n"
      << "stamp=" << stamp_tag(a.stamp) << "\n"
      << "fs=" << format_double(a.fs) << "\n"
      << "nfft=" << a.nfft << "\n"
      << "hop=" << a.hop << "\n"
      << "window_size=" << a.window_size << "\n"
      << "dropped=" << T.dropped << "\n";
}

RealTFR load_tfr(const std::string& path) {
  std::ifstream hdr(path + ".hdr");
  if (!hdr) throw Error(ErrorKind::parse, "missing header '" + path + ".hdr'");
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(hdr, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::parse, path + ".hdr line " + std::to_string(lineno) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto num = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::parse, std::string("header lacks '") + key + "'");
    auto v = parse_double(it->second);
    if (!v) throw Error(ErrorKind::parse, std::string("header field '") + key + "' is not a number");
    return *v;
  };
  RealTFR T;
  TfrAxes& a = T.axes;
  a.frames = static_cast<std::size_t>(num("rows"));
  a.bins = static_cast<std::size_t>(num("cols"));
  a.hop_s = num("hop_seconds");
  a.bin_hz = num("bin_hz");
  a.t0 = num("first_frame_time");
  if (kv.count("stamp")) {
    auto s = stamp_from_tag(kv["stamp"]);
    if (!s) throw Error(ErrorKind::parse, "unknown stamp '" + kv["stamp"] + "'");
    a.stamp = *s;
  }
  if (kv.count("fs")) a.fs = num("fs");
  if (kv.count("nfft")) a.nfft = static_cast<std::size_t>(num("nfft"));
  if (kv.count("hop")) a.hop = static_cast<std::size_t>(num("hop"));
  if (kv.count("window_size")) a.window_size = static_cast<std::size_t>(num("window_size"));
  if (kv.count("dropped")) T.dropped = static_cast<std::size_t>(num("dropped"));

  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  T.values.resize(a.frames * a.bins);
  for (auto& v : T.values) {
    std::uint32_t u;
    if (!bin.read(reinterpret_cast<char*>(&u), sizeof u))
      throw Error(ErrorKind::parse, "'" + path + "' is shorter than rows x cols");
    u = to_le(u);
    float f;
    std::memcpy(&f, &u, sizeof f);
    v = f;
  }
  return T;
}

void write_tfr_csv(std::ostream& out, const RealTFR& T) {
  const TfrAxes& a = T.axes;
  out << "time";
  for (std::size_t k = 0; k < a.bins; ++k) out << ',' << format_double(a.bin_freq(k));
  out << '\n';
  for (std::size_t f = 0; f < a.frames; ++f) {
    out << format_double(a.frame_time(f));
    for (std::size_t k = 0; k < a.bins; ++k) out << ',' << format_double(T.at(f, k));
    out << '\n';
  }
}

void write_ridge_csv(std::ostream& out, std::span<const RidgePoint> ridge) {
  out << "time,freq\n";
  for (const auto& p : ridge)
    out << format_double(p.time) << ',' << (p.valid ? format_double(p.freq) : std::string("nan"))
        << '\n';
}

}  // namespace mlwin

#include "mlwin/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mlwin/error.hpp"

namespace mlwin {

namespace {

// RIFF is little-endian; these helpers assume a little-endian host, which is
// checked at compile time.
static_assert(std::endian::native == std::endian::little, "little-endian host required");

template <class T>
T get(const std::vector<char>& buf, std::size_t at) {
  if (at + sizeof(T) > buf.size()) throw Error(ErrorKind::parse, "truncated WAV file");
  T v;
  std::memcpy(&v, buf.data() + at, sizeof v);
  return v;
}

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

WavData read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorKind::parse, "'" + path + "' is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  double exact_rate = 0.0;
  std::size_t data_at = 0, data_len = 0;
  bool have_data = false;
  for (std::size_t at = 12; at + 8 <= buf.size();) {
    const std::string id(buf.data() + at, 4);
    const auto len = get<std::uint32_t>(buf, at + 4);
    const std::size_t body = at + 8;
    if (id == "fmt ") {
      format = get<std::uint16_t>(buf, body);
      channels = get<std::uint16_t>(buf, body + 2);
      rate = get<std::uint32_t>(buf, body + 4);
      bits = get<std::uint16_t>(buf, body + 14);
      if (format == 0xFFFE && len >= 40) format = get<std::uint16_t>(buf, body + 24);
      have_fmt = true;
    } else if (id == "mlfs" && len >= 8) {
      exact_rate = get<double>(buf, body);
    } else if (id == "data") {
      data_at = body;
      data_len = std::min<std::size_t>(len, buf.size() - body);
      have_data = true;
    }
    at = body + len + (len & 1u);
  }
  if (!have_fmt || !have_data) throw Error(ErrorKind::parse, "WAV file lacks fmt or data chunk");
  if (channels != 1)
    throw Error(ErrorKind::parse, "only mono WAV is supported (file has " +
                                      std::to_string(channels) + " channels)");

  WavData w;
  w.fs = exact_rate > 0.0 ? exact_rate : static_cast<double>(rate);
  if (format == 1 && bits == 16) {
    const std::size_t n = data_len / 2;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      w.samples[i] = get<std::int16_t>(buf, data_at + 2 * i) / 32768.0;
  } else if (format == 3 && bits == 32) {
    const std::size_t n = data_len / 4;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] = get<float>(buf, data_at + 4 * i);
  } else {
    throw Error(ErrorKind::parse, "unsupported WAV encoding (need PCM16 or float32)");
  }
  return w;
}

void write_wav(const std::string& path, std::span<const double> samples, double fs,
               WavFormat format) {
  if (!(fs > 0.0)) throw Error(ErrorKind::invalid_spec, "sampling rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::parse, "cannot open '" + path + "' for writing");
  const bool pcm = format == WavFormat::pcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t bytes = static_cast<std::uint32_t>(samples.size() * (bits / 8));
  const auto rate = static_cast<std::uint32_t>(std::lround(fs));
  const bool fractional = static_cast<double>(rate) != fs;

  out.write("RIFF", 4);
  put<std::uint32_t>(out, 4 + 24 + (fractional ? 16 : 0) + 8 + bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, pcm ? 1 : 3);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * (bits / 8));
  put<std::uint16_t>(out, bits / 8);
  put<std::uint16_t>(out, bits);
  if (fractional) {
    // The fmt chunk only holds an integer rate; keep the exact one alongside.
    out.write("mlfs", 4);
    put<std::uint32_t>(out, 8);
    put<double>(out, fs);
  }
  out.write("data", 4);
  put<std::uint32_t>(out, bytes);
  for (double v : samples) {
    if (pcm) {
      const double c = std::clamp(v, -1.0, 32767.0 / 32768.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(std::lround(c * 32768.0)));
    } else {
      put<float>(out, static_cast<float>(v));
    }
  }
}

}  // namespace mlwin

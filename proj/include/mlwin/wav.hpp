#pragma once

#include <span>
#include <string>
#include <vector>

namespace mlwin {

enum class WavFormat { pcm16, float32 };

struct WavData {
  double fs = 0;
  std::vector<double> samples;
};

// Mono PCM16 or float32 only; anything else is a parse error.
WavData read_wav(const std::string& path);
void write_wav(const std::string& path, std::span<const double> samples, double fs,
               WavFormat format = WavFormat::float32);

}  // namespace mlwin

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace emoclap {

// Mono PCM clip. Samples live in [-1, 1].
struct AudioClip {
  std::string id;
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file (PCM 16-bit, mono). Samples are scaled by 1/32768;
// the clip id is the filename stem.
AudioClip load_wav(const std::filesystem::path& path);

// Writes PCM 16-bit mono. Samples are clamped to [-1, 1] before quantizing.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

}  // namespace emoclap

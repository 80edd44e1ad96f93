#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#include "emoclap/audio.hpp"
#include "emoclap/util.hpp"

namespace emoclap::test {

inline AudioClip make_sine(double freq, double duration_s, int rate = 16000,
                           double amplitude = 0.3, const std::string& id = "sine") {
  AudioClip clip;
  clip.id = id;
  clip.sample_rate = rate;
  const int n = static_cast<int>(std::lround(duration_s * rate));
  clip.samples.resize(n);
  for (int i = 0; i < n; ++i) {
    clip.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  }
  return clip;
}

inline AudioClip make_constant(double value, double duration_s, int rate = 16000) {
  AudioClip clip;
  clip.id = "const";
  clip.sample_rate = rate;
  clip.samples.assign(static_cast<std::size_t>(std::lround(duration_s * rate)), value);
  return clip;
}

inline AudioClip make_noise(double duration_s, std::uint64_t seed, int rate = 16000,
                            double amplitude = 0.3) {
  AudioClip clip;
  clip.id = "noise";
  clip.sample_rate = rate;
  Rng rng(seed);
  const int n = static_cast<int>(std::lround(duration_s * rate));
  clip.samples.resize(n);
  for (int i = 0; i < n; ++i) clip.samples[i] = amplitude * rng.uniform(-1.0, 1.0);
  return clip;
}

// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("emoclap_test_" + name + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace emoclap::test

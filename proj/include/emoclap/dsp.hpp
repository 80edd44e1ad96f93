#pragma once

#include <string>
#include <vector>

#include "emoclap/audio.hpp"

namespace emoclap {

// dB scale reference: full-scale-1.0 samples against p_ref, floor at -100 dB.
inline constexpr double kPressureRef = 2e-5;
inline constexpr double kDbFloor = -100.0;

// Frame-level contour. values[i] sits at time start_s + i * hop_s.
struct FrameSeries {
  std::vector<double> values;
  double hop_s = 0.0;
  double start_s = 0.0;
};

struct PitchConfig {
  double f_min = 60.0;
  double f_max = 600.0;
  double frame_s = 0.040;
  double hop_s = 0.010;
  double voicing_threshold = 0.15;
};

struct NucleiConfig {
  double silence_offset_db = 25.0;
  double min_dip_db = 2.0;
};

struct MelConfig {
  int n_fft = 512;
  int hop = 256;
  int n_mels = 40;
  double f_min = 0.0;
  double f_max = 0.0;  // 0 = Nyquist
};

struct ProfileConfig {
  PitchConfig pitch;
  double intensity_frame_s = 0.040;
  double intensity_hop_s = 0.010;
  NucleiConfig nuclei;
};

// Per-clip acoustic summary: the four emotion correlates plus durations.
struct AcousticProfile {
  std::string clip_id;
  double pitch_hz = 0.0;       // mean F0 over voiced frames; 0 = no voiced frames
  double intensity_db = 0.0;   // mean over frames above the silence threshold
  double speech_rate = 0.0;    // syllables / total duration
  double articulation_rate = 0.0;  // syllables / phonation time
  int syllable_count = 0;
  double duration_s = 0.0;
  double phonation_s = 0.0;

  bool operator==(const AcousticProfile&) const = default;
};

struct MelFeatures {
  std::vector<double> values;  // n_mels x n_frames, row-major (band rows)
  int n_mels = 0;
  int n_frames = 0;
  double hop_s = 0.0;

  double at(int band, int frame) const { return values[static_cast<std::size_t>(band) * n_frames + frame]; }
};

struct NucleiResult {
  int count = 0;
  std::vector<double> nuclei_times;  // seconds, frame centers
  double phonation_s = 0.0;
};

// Per-frame intensity in dB: 20*log10(rms / p_ref); exactly-zero frames
// report the -100 dB floor.
FrameSeries intensity_contour(const AudioClip& clip, double frame_s, double hop_s);

// YIN pitch per frame (Hz, 0 = unvoiced): cumulative-mean-normalized
// difference, first dip below the voicing threshold inside the lag band,
// parabolic refinement of the lag.
FrameSeries pitch_contour(const AudioClip& clip, const PitchConfig& cfg);

// Intensity-peak syllable nuclei. The silence threshold trails the contour
// maximum by silence_offset_db; a peak counts only if the dip since the
// previously accepted peak is at least min_dip_db. A contour stuck at the
// dB floor is treated as silence (count 0, phonation 0).
NucleiResult detect_syllable_nuclei(const FrameSeries& intensity, const NucleiConfig& cfg);

// Magnitude STFT (Hann) -> triangular HTK-mel filterbank -> log(x + 1e-10).
// Incomplete tail frames are dropped.
MelFeatures log_mel(const AudioClip& clip, const MelConfig& cfg);

AcousticProfile extract_profile(const AudioClip& clip, const ProfileConfig& cfg);

}  // namespace emoclap

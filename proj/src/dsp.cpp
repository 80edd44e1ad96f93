#include "emoclap/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "emoclap/errors.hpp"

namespace emoclap {

namespace {

constexpr double kPi = std::numbers::pi;

struct FrameGrid {
  int win = 0;   // samples per frame
  int hop = 0;   // samples per step
  int count = 0; // complete frames
};

FrameGrid make_grid(const AudioClip& clip, double frame_s, double hop_s) {
  if (clip.samples.empty()) throw EmptyAudio("empty clip");
  if (!(hop_s > 0.0) || hop_s > frame_s || frame_s > clip.duration_s()) {
    throw BadFrameConfig("need 0 < hop_s <= frame_s <= duration");
  }
  FrameGrid g;
  g.win = static_cast<int>(std::lround(frame_s * clip.sample_rate));
  g.hop = static_cast<int>(std::lround(hop_s * clip.sample_rate));
  if (g.win <= 0 || g.hop <= 0) throw BadFrameConfig("frame/hop shorter than one sample");
  const int n = static_cast<int>(clip.samples.size());
  g.count = n < g.win ? 0 : (n - g.win) / g.hop + 1;
  if (g.count == 0) throw BadFrameConfig("clip shorter than one frame");
  return g;
}

// In-place radix-2 FFT; n must be a power of two.
void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

FrameSeries intensity_contour(const AudioClip& clip, double frame_s, double hop_s) {
  const FrameGrid g = make_grid(clip, frame_s, hop_s);
  FrameSeries out;
  out.hop_s = hop_s;
  out.start_s = 0.5 * g.win / clip.sample_rate;
  out.values.reserve(g.count);
  for (int f = 0; f < g.count; ++f) {
    const double* x = clip.samples.data() + static_cast<std::size_t>(f) * g.hop;
    double acc = 0.0;
    for (int i = 0; i < g.win; ++i) acc += x[i] * x[i];
    const double rms = std::sqrt(acc / g.win);
    out.values.push_back(rms == 0.0 ? kDbFloor : 20.0 * std::log10(rms / kPressureRef));
  }
  return out;
}

FrameSeries pitch_contour(const AudioClip& clip, const PitchConfig& cfg) {
  const FrameGrid g = make_grid(clip, cfg.frame_s, cfg.hop_s);
  if (!(cfg.f_min > 0.0) || !(cfg.f_min < cfg.f_max) ||
      !(cfg.f_max < 0.5 * clip.sample_rate)) {
    throw BandTooNarrow("need 0 < f_min < f_max < sample_rate/2");
  }
  const int tau_min = std::max(2, static_cast<int>(std::floor(clip.sample_rate / cfg.f_max)));
  const int tau_max = static_cast<int>(std::ceil(clip.sample_rate / cfg.f_min));
  if (tau_max <= tau_min + 1) throw BandTooNarrow("lag range collapses at this sample rate");
  // Fixed integration window: every lag is summed over the same span, so the
  // difference function stays comparable across lags.
  const int n_int = g.win - tau_max;
  if (n_int < tau_min) throw BandTooNarrow("frame too short for f_min");

  FrameSeries out;
  out.hop_s = cfg.hop_s;
  out.start_s = 0.5 * g.win / clip.sample_rate;
  out.values.reserve(g.count);

  std::vector<double> d(static_cast<std::size_t>(tau_max) + 1, 0.0);
  std::vector<double> cmnd(static_cast<std::size_t>(tau_max) + 1, 1.0);

  for (int f = 0; f < g.count; ++f) {
    const double* x = clip.samples.data() + static_cast<std::size_t>(f) * g.hop;

    // Squared difference of the frame against its lagged self.
    for (int tau = 1; tau <= tau_max; ++tau) {
      double acc = 0.0;
      for (int i = 0; i < n_int; ++i) {
        const double delta = x[i] - x[i + tau];
        acc += delta * delta;
      }
      d[tau] = acc;
    }

    // Cumulative mean normalization; a flat (all-zero) frame normalizes to 1.
    double running = 0.0;
    cmnd[0] = 1.0;
    for (int tau = 1; tau <= tau_max; ++tau) {
      running += d[tau];
      cmnd[tau] = running == 0.0 ? 1.0 : d[tau] * tau / running;
    }

    // First dip under the threshold inside the band, then walk to its bottom.
    int best = -1;
    for (int tau = tau_min; tau <= tau_max; ++tau) {
      if (cmnd[tau] < cfg.voicing_threshold) {
        while (tau + 1 <= tau_max && cmnd[tau + 1] < cmnd[tau]) ++tau;
        best = tau;
        break;
      }
    }

    if (best < 0) {
      out.values.push_back(0.0);
      continue;
    }

    double refined = static_cast<double>(best);
    if (best > 1 && best < tau_max) {
      const double s0 = cmnd[best - 1], s1 = cmnd[best], s2 = cmnd[best + 1];
      const double denom = 2.0 * (2.0 * s1 - s2 - s0);
      if (denom != 0.0) refined += (s2 - s0) / denom;
    }
    out.values.push_back(clip.sample_rate / refined);
  }
  return out;
}

NucleiResult detect_syllable_nuclei(const FrameSeries& intensity, const NucleiConfig& cfg) {
  NucleiResult res;
  const auto& v = intensity.values;
  if (v.empty()) return res;

  const double vmax = *std::max_element(v.begin(), v.end());
  if (vmax <= kDbFloor) return res;  // all floor: silence

  const double threshold = vmax - cfg.silence_offset_db;
  int loud = 0;
  for (double x : v) {
    if (x > threshold) ++loud;
  }
  res.phonation_s = intensity.hop_s * loud;

  // Peaks are leading edges of maximal equal-valued runs that rise above both
  // sides. A peak is kept when the valley since the last kept peak dips at
  // least min_dip_db below it.
  const double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t n = v.size();
  long last_kept = -1;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    while (e + 1 < n && v[e + 1] == v[s]) ++e;
    const double left = s > 0 ? v[s - 1] : neg_inf;
    const double right = e + 1 < n ? v[e + 1] : neg_inf;
    if (v[s] > threshold && v[s] > left && v[s] > right) {
      bool keep = true;
      if (last_kept >= 0) {
        double valley = v[s];
        for (std::size_t k = static_cast<std::size_t>(last_kept) + 1; k < s; ++k) {
          valley = std::min(valley, v[k]);
        }
        keep = v[s] - valley >= cfg.min_dip_db;
      }
      if (keep) {
        res.nuclei_times.push_back(intensity.start_s + static_cast<double>(s) * intensity.hop_s);
        last_kept = static_cast<long>(s);
      }
    }
    s = e + 1;
  }
  res.count = static_cast<int>(res.nuclei_times.size());
  return res;
}

MelFeatures log_mel(const AudioClip& clip, const MelConfig& cfg) {
  if (clip.samples.empty()) throw EmptyAudio("empty clip");
  if (cfg.n_fft <= 0 || (cfg.n_fft & (cfg.n_fft - 1)) != 0) {
    throw BadFrameConfig("n_fft must be a power of two");
  }
  if (cfg.hop <= 0 || cfg.n_mels < 1) throw BadFrameConfig("bad hop or n_mels");
  const double nyquist = 0.5 * clip.sample_rate;
  const double f_max = cfg.f_max == 0.0 ? nyquist : cfg.f_max;
  if (!(cfg.f_min >= 0.0) || !(cfg.f_min < f_max) || f_max > nyquist) {
    throw BadFrameConfig("bad mel band edges");
  }

  const int n = static_cast<int>(clip.samples.size());
  const int n_frames = n < cfg.n_fft ? 0 : (n - cfg.n_fft) / cfg.hop + 1;
  if (n_frames < 1) throw BadFrameConfig("clip shorter than n_fft");

  const int n_bins = cfg.n_fft / 2 + 1;
  const double bin_hz = static_cast<double>(clip.sample_rate) / cfg.n_fft;

  // Triangular filters with edges equally spaced on the HTK mel scale.
  const double mel_lo = hz_to_mel(cfg.f_min);
  const double mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(static_cast<std::size_t>(cfg.n_mels) + 2);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    edges[k] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(k) / (cfg.n_mels + 1));
  }
  std::vector<std::vector<double>> filters(static_cast<std::size_t>(cfg.n_mels),
                                           std::vector<double>(n_bins, 0.0));
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double fl = edges[m], fc = edges[m + 1], fr = edges[m + 2];
    for (int j = 0; j < n_bins; ++j) {
      const double f = j * bin_hz;
      if (f > fl && f < fc) {
        filters[m][j] = (f - fl) / (fc - fl);
      } else if (f >= fc && f < fr) {
        filters[m][j] = fr == fc ? 0.0 : (fr - f) / (fr - fc);
      }
    }
  }

  std::vector<double> window(cfg.n_fft);
  for (int i = 0; i < cfg.n_fft; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / cfg.n_fft));
  }

  MelFeatures mel;
  mel.n_mels = cfg.n_mels;
  mel.n_frames = n_frames;
  mel.hop_s = static_cast<double>(cfg.hop) / clip.sample_rate;
  mel.values.assign(static_cast<std::size_t>(cfg.n_mels) * n_frames, 0.0);

  std::vector<std::complex<double>> buf(static_cast<std::size_t>(cfg.n_fft));
  std::vector<double> mag(n_bins);
  for (int f = 0; f < n_frames; ++f) {
    const double* x = clip.samples.data() + static_cast<std::size_t>(f) * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i) buf[i] = {x[i] * window[i], 0.0};
    fft(buf);
    for (int j = 0; j < n_bins; ++j) mag[j] = std::abs(buf[j]);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      const auto& w = filters[m];
      for (int j = 0; j < n_bins; ++j) acc += w[j] * mag[j];
      mel.values[static_cast<std::size_t>(m) * n_frames + f] = std::log(acc + 1e-10);
    }
  }
  return mel;
}

AcousticProfile extract_profile(const AudioClip& clip, const ProfileConfig& cfg) {
  AcousticProfile p;
  p.clip_id = clip.id;
  p.duration_s = clip.duration_s();

  const FrameSeries pitch = pitch_contour(clip, cfg.pitch);
  double pitch_sum = 0.0;
  int voiced = 0;
  for (double f0 : pitch.values) {
    if (f0 > 0.0) {
      pitch_sum += f0;
      ++voiced;
    }
  }
  p.pitch_hz = voiced > 0 ? pitch_sum / voiced : 0.0;

  const FrameSeries intensity = intensity_contour(clip, cfg.intensity_frame_s, cfg.intensity_hop_s);
  const NucleiResult nuclei = detect_syllable_nuclei(intensity, cfg.nuclei);
  p.syllable_count = nuclei.count;
  p.phonation_s = nuclei.phonation_s;

  const double vmax = *std::max_element(intensity.values.begin(), intensity.values.end());
  if (vmax <= kDbFloor) {
    p.intensity_db = kDbFloor;
  } else {
    const double threshold = vmax - cfg.nuclei.silence_offset_db;
    double acc = 0.0;
    int loud = 0;
    for (double x : intensity.values) {
      if (x > threshold) {
        acc += x;
        ++loud;
      }
    }
    p.intensity_db = loud > 0 ? acc / loud : kDbFloor;
  }

  p.speech_rate = p.syllable_count / p.duration_s;
  p.articulation_rate = p.phonation_s > 0.0 ? p.syllable_count / p.phonation_s : 0.0;
  return p;
}

}  // namespace emoclap

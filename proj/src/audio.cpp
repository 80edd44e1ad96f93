#include "emoclap/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "emoclap/errors.hpp"

namespace emoclap {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(buf.data());
  const std::size_t n = buf.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw MalformedWav("not a RIFF/WAVE file: " + path.string());
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* data_ptr = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const char* chunk_id = reinterpret_cast<const char*>(p + pos);
    std::uint32_t chunk_size = read_u32(p + pos + 4);
    pos += 8;
    if (pos + chunk_size > n) throw MalformedWav("truncated chunk in " + path.string());
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw MalformedWav("fmt chunk too small");
      format = read_u16(p + pos);
      channels = read_u16(p + pos + 2);
      sample_rate = read_u32(p + pos + 4);
      bits = read_u16(p + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data_ptr = p + pos;
      data_len = chunk_size;
    }
    pos += chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_ptr == nullptr) throw MalformedWav("missing fmt/data chunk");
  if (format != 1 || bits != 16) throw UnsupportedFormat("only PCM 16-bit supported");
  if (channels != 1) throw UnsupportedFormat("only mono supported");
  if (sample_rate == 0) throw MalformedWav("zero sample rate");
  if (data_len < 2) throw EmptyAudio("no samples in " + path.string());

  AudioClip clip;
  clip.id = path.stem().string();
  clip.sample_rate = static_cast<int>(sample_rate);
  const std::size_t count = data_len / 2;
  clip.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::int16_t s = static_cast<std::int16_t>(read_u16(data_ptr + 2 * i));
    clip.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return clip;
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.samples.empty()) throw EmptyAudio("refusing to write empty clip");
  if (clip.sample_rate <= 0) throw InvalidSpec("bad sample rate");

  const std::uint32_t data_len = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  put_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_len);
  for (double s : clip.samples) {
    double clamped = std::clamp(s, -1.0, 1.0);
    long q = std::lround(clamped * 32768.0);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace emoclap

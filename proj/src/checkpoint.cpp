#include <cstdint>
#include <cstring>
#include <fstream>

#include "emoclap/encoder.hpp"
#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

constexpr char kMagic[8] = {'E', 'M', 'O', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_tensor(std::string& out, const std::string& name, const std::vector<std::uint64_t>& dims,
                const double* data, std::size_t count) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out += name;
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (std::uint64_t d : dims) put_u64(out, d);
  const std::size_t bytes = count * sizeof(double);
  const std::size_t at = out.size();
  out.resize(at + bytes);
  std::memcpy(out.data() + at, data, bytes);  // host is little-endian
}

class Reader {
 public:
  Reader(const std::string& buf, std::size_t pos) : buf_(buf), pos_(pos) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  std::string str(std::size_t len) {
    need(len);
    std::string s = buf_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  void doubles(double* out, std::size_t count) {
    need(count * sizeof(double));
    std::memcpy(out, buf_.data() + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw ChecksumMismatch("checkpoint truncated");
  }
  const std::string& buf_;
  std::size_t pos_;
};

struct TensorRef {
  const char* name;
  std::vector<std::uint64_t> dims;
  double* data;
  std::size_t count;
};

std::vector<TensorRef> tensor_refs(ModelParams& p) {
  return {
      {"audio_w1", {p.audio_w1.rows, p.audio_w1.cols}, p.audio_w1.data.data(), p.audio_w1.data.size()},
      {"audio_b1", {p.audio_b1.size()}, p.audio_b1.data(), p.audio_b1.size()},
      {"audio_w2", {p.audio_w2.rows, p.audio_w2.cols}, p.audio_w2.data.data(), p.audio_w2.data.size()},
      {"audio_b2", {p.audio_b2.size()}, p.audio_b2.data(), p.audio_b2.size()},
      {"text_table", {p.text_table.rows, p.text_table.cols}, p.text_table.data.data(), p.text_table.data.size()},
      {"proj_audio_w", {p.proj_audio_w.rows, p.proj_audio_w.cols}, p.proj_audio_w.data.data(), p.proj_audio_w.data.size()},
      {"proj_audio_b", {p.proj_audio_b.size()}, p.proj_audio_b.data(), p.proj_audio_b.size()},
      {"proj_text_w", {p.proj_text_w.rows, p.proj_text_w.cols}, p.proj_text_w.data.data(), p.proj_text_w.data.size()},
      {"proj_text_b", {p.proj_text_b.size()}, p.proj_text_b.data(), p.proj_text_b.size()},
      {"log_tau", {1}, &p.log_tau, 1},
  };
}

std::string hex_to_bytes(const std::string& hex) {
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    auto nib = [](char c) -> int { return c <= '9' ? c - '0' : c - 'a' + 10; };
    out.push_back(static_cast<char>((nib(hex[i]) << 4) | nib(hex[i + 1])));
  }
  return out;
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  std::string payload;
  auto refs = tensor_refs(const_cast<ModelParams&>(params));
  put_u32(payload, static_cast<std::uint32_t>(refs.size()));
  for (const TensorRef& t : refs) put_tensor(payload, t.name, t.dims, t.data, t.count);

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u64(out, params.cfg.audio_feat_dim);
  put_u64(out, params.cfg.text_feat_dim);
  put_u64(out, params.cfg.joint_dim);
  put_u64(out, params.cfg.vocab_hash_size);
  put_u64(out, params.cfg.audio_in_dim);
  put_u64(out, params.cfg.seed);
  put_u64(out, payload.size());
  out += hex_to_bytes(sha256_hex(payload.data(), payload.size()));
  out += payload;

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint for write: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("checkpoint write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < sizeof(kMagic) + 4 || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw ChecksumMismatch("not a checkpoint file: " + path.string());
  }
  Reader r(buf, sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw VersionUnsupported("checkpoint format version " + std::to_string(version));
  }

  ModelParams p;
  p.cfg.audio_feat_dim = r.u64();
  p.cfg.text_feat_dim = r.u64();
  p.cfg.joint_dim = r.u64();
  p.cfg.vocab_hash_size = r.u64();
  p.cfg.audio_in_dim = r.u64();
  p.cfg.seed = r.u64();
  const std::uint64_t payload_size = r.u64();
  const std::string stored_sha = r.str(32);
  if (r.pos() + payload_size != buf.size()) throw ChecksumMismatch("payload size mismatch");
  const std::string payload = buf.substr(r.pos(), payload_size);
  if (hex_to_bytes(sha256_hex(payload.data(), payload.size())) != stored_sha) {
    throw ChecksumMismatch("checkpoint payload checksum mismatch");
  }

  const std::size_t v = p.cfg.audio_feat_dim, u = p.cfg.text_feat_dim, d = p.cfg.joint_dim;
  p.audio_w1 = Mat(p.cfg.audio_in_dim, v);
  p.audio_b1.assign(v, 0.0);
  p.audio_w2 = Mat(v, v);
  p.audio_b2.assign(v, 0.0);
  p.text_table = Mat(p.cfg.vocab_hash_size, u);
  p.proj_audio_w = Mat(v, d);
  p.proj_audio_b.assign(d, 0.0);
  p.proj_text_w = Mat(u, d);
  p.proj_text_b.assign(d, 0.0);

  Reader pr(payload, 0);
  const std::uint32_t n_tensors = pr.u32();
  auto refs = tensor_refs(p);
  if (n_tensors != refs.size()) throw ChecksumMismatch("unexpected tensor count");
  for (TensorRef& t : refs) {
    const std::uint32_t name_len = pr.u32();
    const std::string name = pr.str(name_len);
    if (name != t.name) throw ChecksumMismatch("unexpected tensor name: " + name);
    const std::uint32_t rank = pr.u32();
    if (rank != t.dims.size()) throw ChecksumMismatch("unexpected tensor rank: " + name);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) count *= pr.u64();
    if (count != t.count) throw ChecksumMismatch("unexpected tensor shape: " + name);
    pr.doubles(t.data, count);
  }
  return p;
}

}  // namespace emoclap

#include "emoclap/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "emoclap/errors.hpp"
#include "emoclap/util.hpp"

namespace emoclap {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + value + "'");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': not a bool: '" + value + "'");
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

struct KeyDef {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, KeyDef>& key_table() {
  static const std::map<std::string, KeyDef> table = [] {
    std::map<std::string, KeyDef> t;
    auto dbl = [&t](const std::string& key, auto member) {
      t[key] = {[member, key](RunConfig& c, const std::string& k, const std::string& v) {
                  c.*member = parse_double(k, v);
                },
                [member](const RunConfig& c) { return format_double(c.*member); }};
    };
    auto custom = [&t](const std::string& key, auto set, auto get) {
      t[key] = {set, get};
    };

    custom("bin.pitch_mode",
           [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "two") c.bins.pitch_mode = PitchMode::TwoBin;
             else if (v == "four") c.bins.pitch_mode = PitchMode::FourBin;
             else throw ConfigError("key '" + k + "': expected two|four, got '" + v + "'");
           },
           [](const RunConfig& c) {
             return c.bins.pitch_mode == PitchMode::TwoBin ? "two" : "four";
           });
    custom("bin.pitch_cutoff_two",
           [](RunConfig& c, const std::string& k, const std::string& v) {
             c.bins.pitch_cutoff_two = parse_double(k, v);
           },
           [](const RunConfig& c) { return format_double(c.bins.pitch_cutoff_two); });
    custom("bin.pitch_cutoffs_four",
           [](RunConfig& c, const std::string& k, const std::string& v) {
             std::vector<std::string> parts;
             std::string cur;
             for (char ch : v) {
               if (ch == ',') { parts.push_back(cur); cur.clear(); }
               else cur.push_back(ch);
             }
             parts.push_back(cur);
             if (parts.size() != 3) throw ConfigError("key '" + k + "': expected 3 comma-separated values");
             for (int i = 0; i < 3; ++i) c.bins.pitch_cutoffs_four[i] = parse_double(k, parts[i]);
           },
           [](const RunConfig& c) {
             return format_double(c.bins.pitch_cutoffs_four[0]) + "," +
                    format_double(c.bins.pitch_cutoffs_four[1]) + "," +
                    format_double(c.bins.pitch_cutoffs_four[2]);
           });
    custom("bin.intensity_cutoff",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.bins.intensity_cutoff = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.bins.intensity_cutoff); });
    custom("bin.speech_rate_cutoff",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.bins.speech_rate_cutoff = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.bins.speech_rate_cutoff); });
    custom("bin.articulation_rate_cutoff",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.bins.articulation_rate_cutoff = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.bins.articulation_rate_cutoff); });

    custom("pitch.f_min",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.pitch.f_min = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.pitch.f_min); });
    custom("pitch.f_max",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.pitch.f_max = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.pitch.f_max); });
    custom("pitch.frame_s",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.pitch.frame_s = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.pitch.frame_s); });
    custom("pitch.hop_s",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.pitch.hop_s = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.pitch.hop_s); });
    custom("pitch.voicing_threshold",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.pitch.voicing_threshold = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.pitch.voicing_threshold); });

    dbl("intensity.frame_s", &RunConfig::intensity_frame_s);
    dbl("intensity.hop_s", &RunConfig::intensity_hop_s);

    custom("nuclei.silence_offset_db",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.nuclei.silence_offset_db = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.nuclei.silence_offset_db); });
    custom("nuclei.min_dip_db",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.nuclei.min_dip_db = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.nuclei.min_dip_db); });

    custom("mel.n_fft",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mel.n_fft = static_cast<int>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.mel.n_fft); });
    custom("mel.hop",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mel.hop = static_cast<int>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.mel.hop); });
    custom("mel.n_mels",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mel.n_mels = static_cast<int>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.mel.n_mels); });
    custom("mel.f_min",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mel.f_min = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.mel.f_min); });
    custom("mel.f_max",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.mel.f_max = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.mel.f_max); });

    custom("encoder.audio_dim",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.audio_feat_dim = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.encoder.audio_feat_dim); });
    custom("encoder.text_dim",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.text_feat_dim = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.encoder.text_feat_dim); });
    custom("encoder.joint_dim",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.joint_dim = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.encoder.joint_dim); });
    custom("encoder.vocab_hash_size",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.vocab_hash_size = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.encoder.vocab_hash_size); });
    custom("encoder.seed",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.encoder.seed = static_cast<std::uint64_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.encoder.seed); });

    custom("train.lr",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.lr = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.train.lr); });
    custom("train.batch_size",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.batch_size = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.train.batch_size); });
    custom("train.epochs",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.epochs = static_cast<std::size_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.train.epochs); });
    custom("train.beta1",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.beta1 = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.train.beta1); });
    custom("train.beta2",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.beta2 = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.train.beta2); });
    custom("train.eps",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.eps = parse_double(k, v); },
           [](const RunConfig& c) { return format_double(c.train.eps); });
    custom("train.seed",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.seed = static_cast<std::uint64_t>(parse_int(k, v)); },
           [](const RunConfig& c) { return std::to_string(c.train.seed); });
    custom("train.shuffle",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.shuffle = parse_bool(k, v); },
           [](const RunConfig& c) { return c.train.shuffle ? "true" : "false"; });
    custom("train.freeze_tau",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.freeze_tau = parse_bool(k, v); },
           [](const RunConfig& c) { return c.train.freeze_tau ? "true" : "false"; });
    custom("train.keep_partial_batch",
           [](RunConfig& c, const std::string& k, const std::string& v) { c.train.keep_partial_batch = parse_bool(k, v); },
           [](const RunConfig& c) { return c.train.keep_partial_batch ? "true" : "false"; });

    custom("eval.k",
           [](RunConfig& c, const std::string& k, const std::string& v) {
             std::vector<int> ks;
             std::string cur;
             auto flush = [&] {
               if (!cur.empty()) {
                 ks.push_back(static_cast<int>(parse_int(k, cur)));
                 cur.clear();
               }
             };
             for (char ch : v) {
               if (ch == ',') flush();
               else cur.push_back(ch);
             }
             flush();
             if (ks.empty()) throw ConfigError("key '" + k + "': empty K list");
             c.eval_k = std::move(ks);
           },
           [](const RunConfig& c) {
             std::string out;
             for (std::size_t i = 0; i < c.eval_k.size(); ++i) {
               if (i) out += ",";
               out += std::to_string(c.eval_k[i]);
             }
             return out;
           });
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::sync_derived() {
  encoder.audio_in_dim = static_cast<std::size_t>(2 * mel.n_mels);
}

void RunConfig::validate() const {
  bins.validate();
  encoder.validate();
  train.validate();
  if (!(pitch.f_min > 0.0) || !(pitch.f_min < pitch.f_max)) {
    throw ConfigError("pitch band must satisfy 0 < f_min < f_max");
  }
  if (!(pitch.hop_s > 0.0) || pitch.hop_s > pitch.frame_s) {
    throw ConfigError("pitch frames must satisfy 0 < hop_s <= frame_s");
  }
  if (!(pitch.voicing_threshold > 0.0) || pitch.voicing_threshold >= 1.0) {
    throw ConfigError("voicing threshold must be in (0, 1)");
  }
  if (!(intensity_hop_s > 0.0) || intensity_hop_s > intensity_frame_s) {
    throw ConfigError("intensity frames must satisfy 0 < hop_s <= frame_s");
  }
  if (!(nuclei.silence_offset_db > 0.0) || !(nuclei.min_dip_db >= 0.0)) {
    throw ConfigError("bad nuclei thresholds");
  }
  if (mel.n_fft <= 0 || (mel.n_fft & (mel.n_fft - 1)) != 0) {
    throw ConfigError("mel.n_fft must be a power of two");
  }
  if (mel.hop <= 0 || mel.n_mels < 1) throw ConfigError("bad mel.hop or mel.n_mels");
  for (int k : eval_k) {
    if (k < 1) throw ConfigError("eval.k entries must be >= 1");
  }
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, def] : key_table()) {  // std::map: sorted keys
    out += key + " = " + def.get(*this) + "\n";
  }
  return out;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto it = key_table().find(key);
  if (it == key_table().end()) throw ConfigError("unknown config key: '" + key + "'");
  it->second.set(cfg, key, value);
}

RunConfig load_config(const std::optional<std::filesystem::path>& path,
                      const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw IoError("cannot open config file: " + path->string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string stripped;
      for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c)) || !stripped.empty()) stripped.push_back(c);
      }
      while (!stripped.empty() && std::isspace(static_cast<unsigned char>(stripped.back()))) {
        stripped.pop_back();
      }
      if (stripped.empty()) continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      auto trim = [](std::string s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
      };
      apply_override(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be key=value: '" + ov + "'");
    apply_override(cfg, ov.substr(0, eq), ov.substr(eq + 1));
  }
  cfg.sync_derived();
  cfg.validate();
  return cfg;
}

}  // namespace emoclap

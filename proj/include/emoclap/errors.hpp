#pragma once

#include <stdexcept>
#include <string>

namespace emoclap {

// Base of all library errors. exit_code() steers the CLI: 1 for invalid
// input/config, 2 for runtime failures (I/O, corrupted artifacts).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

struct RuntimeError : Error {
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

// audio
struct MalformedWav : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct EmptyAudio : Error { using Error::Error; };

// dsp
struct BadFrameConfig : Error { using Error::Error; };
struct BandTooNarrow : Error { using Error::Error; };

// prompts
struct UnvoicedClip : Error { using Error::Error; };
struct MissingBin : Error { using Error::Error; };
struct InvalidEmotion : Error { using Error::Error; };

// embedding
struct DimMismatch : Error { using Error::Error; };
struct EmptyPrompt : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct ChecksumMismatch : RuntimeError { using RuntimeError::RuntimeError; };
struct VersionUnsupported : Error { using Error::Error; };

// training
struct NonFinite : RuntimeError { using RuntimeError::RuntimeError; };
struct TooFewPairs : Error { using Error::Error; };

// eval
struct UnknownTag : Error { using Error::Error; };

// synth
struct InvalidSpec : Error { using Error::Error; };

// io
struct IoError : RuntimeError { using RuntimeError::RuntimeError; };
struct ManifestError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace emoclap

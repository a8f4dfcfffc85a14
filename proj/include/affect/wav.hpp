#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace affect {

// Mono audio held as doubles in [-1, 1].
struct AudioSegment {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;

  double duration_s() const {
    return sample_rate == 0
               ? 0.0
               : static_cast<double>(samples.size()) / sample_rate;
  }
};

// Reads a RIFF/WAVE file. Accepts 16-bit PCM and 32-bit IEEE float, mono or
// stereo (stereo is averaged down to mono). Any other encoding raises
// UnsupportedError naming the format; a malformed file raises ParseError; an
// unreadable path raises IoError.
AudioSegment load_wav(const std::string& path);

// Writes mono 16-bit PCM (used by tests and corpus fixtures). Samples are
// clamped to [-1, 1] before quantization.
void write_wav(const std::string& path, const AudioSegment& segment);

}  // namespace affect

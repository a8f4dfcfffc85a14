#include "affect/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "affect/errors.hpp"

namespace affect {
namespace {

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

}  // namespace

AudioSegment load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_wav: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("load_wav: read failed for " + path);

  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw ParseError("load_wav: " + path + " is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t at = 12;
  while (at + 8 <= n) {
    const std::uint32_t chunk_len = read_u32(p + at + 4);
    const unsigned char* body = p + at + 8;
    if (at + 8 + chunk_len > n) {
      throw ParseError("load_wav: truncated chunk in " + path);
    }
    if (std::memcmp(p + at, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw ParseError("load_wav: short fmt chunk");
      format = read_u16(body);
      channels = read_u16(body + 2);
      rate = read_u32(body + 4);
      bits = read_u16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(p + at, "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    at += 8 + chunk_len + (chunk_len & 1);  // chunks are word aligned
  }

  if (!have_fmt || data == nullptr) {
    throw ParseError("load_wav: missing fmt or data chunk in " + path);
  }
  if (channels != 1 && channels != 2) {
    throw UnsupportedError("load_wav: " + std::to_string(channels) +
                           " channels (only mono and stereo are supported)");
  }

  const bool pcm16 = format == 1 && bits == 16;
  const bool float32 = format == 3 && bits == 32;
  if (!pcm16 && !float32) {
    throw UnsupportedError("load_wav: format code " + std::to_string(format) +
                           " with " + std::to_string(bits) +
                           "-bit samples (supported: 16-bit PCM, 32-bit float)");
  }

  const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t frames = data_len / frame_bytes;

  AudioSegment seg;
  seg.sample_rate = rate;
  seg.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::uint16_t ch = 0; ch < channels; ++ch) {
      const unsigned char* sp = data + i * frame_bytes + ch * bytes_per_sample;
      if (pcm16) {
        const auto raw = static_cast<std::int16_t>(read_u16(sp));
        acc += static_cast<double>(raw) / 32768.0;
      } else {
        std::uint32_t u = read_u32(sp);
        float f;
        std::memcpy(&f, &u, sizeof(f));
        acc += static_cast<double>(f);
      }
    }
    seg.samples[i] = acc / channels;
  }
  return seg;
}

void write_wav(const std::string& path, const AudioSegment& segment) {
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(segment.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_len);
  out.append("RIFF");
  put_u32(out, 36 + data_len);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, segment.sample_rate);
  put_u32(out, segment.sample_rate * 2);  // byte rate
  put_u16(out, 2);                        // block align
  put_u16(out, 16);                       // bits per sample
  out.append("data");
  put_u32(out, data_len);
  for (double s : segment.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lrint(clamped * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("write_wav: cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write_wav: write failed for " + path);
}

}  // namespace affect

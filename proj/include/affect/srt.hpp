#pragma once

#include <string>
#include <vector>

namespace affect {

struct TimedCaption {
  std::size_t index = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string speaker;  // empty when the caption names none
  std::string text;
};

// Parses SubRip text: blocks of `index`, `HH:MM:SS,mmm --> HH:MM:SS,mmm`,
// then text lines (joined with single spaces), separated by blank lines.
// A leading `NAME:` prefix on the text — uppercase letters, digits, spaces,
// and ._'- only — is extracted as the speaker. Captions are returned sorted
// by start time. Malformed indices/timestamps and end <= start raise
// ParseError naming the line; empty input yields an empty list.
std::vector<TimedCaption> parse_srt(const std::string& bytes);

}  // namespace affect

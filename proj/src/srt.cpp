#include "affect/srt.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "affect/errors.hpp"

namespace affect {
namespace {

std::string strip_cr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
    line.pop_back();
  }
  return line;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) {
    return std::isspace(c);
  });
}

double parse_timestamp(const std::string& s, std::size_t line_no) {
  int h = 0, m = 0, sec = 0, ms = 0;
  char tail = 0;
  const int got =
      std::sscanf(s.c_str(), "%d:%d:%d,%d%c", &h, &m, &sec, &ms, &tail);
  if (got != 4 || h < 0 || m < 0 || m >= 60 || sec < 0 || sec >= 60 ||
      ms < 0 || ms >= 1000) {
    throw ParseError("parse_srt: line " + std::to_string(line_no) +
                     ": malformed timestamp '" + s + "'");
  }
  return h * 3600.0 + m * 60.0 + sec + ms / 1000.0;
}

// Speaker prefixes look like `PENNY:` — no lowercase letters before the
// colon, so prose like `Note: ...` is left alone.
bool split_speaker(const std::string& text, std::string& speaker,
                   std::string& rest) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0) return false;
  bool has_upper = false;
  for (std::size_t i = 0; i < colon; ++i) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isupper(c)) {
      has_upper = true;
    } else if (std::islower(c)) {
      return false;
    } else if (!std::isdigit(c) && c != ' ' && c != '.' && c != '_' &&
               c != '\'' && c != '-') {
      return false;
    }
  }
  if (!has_upper) return false;
  speaker = text.substr(0, colon);
  while (!speaker.empty() && speaker.back() == ' ') speaker.pop_back();
  rest = text.substr(colon + 1);
  const std::size_t start = rest.find_first_not_of(' ');
  rest = start == std::string::npos ? std::string() : rest.substr(start);
  return true;
}

}  // namespace

std::vector<TimedCaption> parse_srt(const std::string& bytes) {
  std::string body = bytes;
  if (body.size() >= 3 && body.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    body.erase(0, 3);  // UTF-8 BOM
  }

  std::vector<std::string> lines;
  {
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) lines.push_back(strip_cr(line));
  }

  std::vector<TimedCaption> captions;
  std::size_t at = 0;
  while (at < lines.size()) {
    while (at < lines.size() && blank(lines[at])) ++at;
    if (at >= lines.size()) break;

    TimedCaption cap;
    {
      const std::size_t line_no = at + 1;
      std::istringstream ss(lines[at]);
      long long idx = 0;
      std::string extra;
      if (!(ss >> idx) || idx < 0 || (ss >> extra)) {
        throw ParseError("parse_srt: line " + std::to_string(line_no) +
                         ": expected a caption index, got '" + lines[at] +
                         "'");
      }
      cap.index = static_cast<std::size_t>(idx);
      ++at;
    }

    if (at >= lines.size()) {
      throw ParseError("parse_srt: line " + std::to_string(at + 1) +
                       ": missing timestamp line");
    }
    {
      const std::size_t line_no = at + 1;
      const std::string& ts = lines[at];
      const std::string arrow = " --> ";
      const std::size_t pos = ts.find(arrow);
      if (pos == std::string::npos) {
        throw ParseError("parse_srt: line " + std::to_string(line_no) +
                         ": malformed timestamp '" + ts + "'");
      }
      cap.start_s = parse_timestamp(ts.substr(0, pos), line_no);
      cap.end_s = parse_timestamp(ts.substr(pos + arrow.size()), line_no);
      if (cap.end_s <= cap.start_s) {
        throw ParseError("parse_srt: line " + std::to_string(line_no) +
                         ": caption ends at or before its start");
      }
      ++at;
    }

    std::string text;
    while (at < lines.size() && !blank(lines[at])) {
      if (!text.empty()) text += ' ';
      text += lines[at];
      ++at;
    }
    std::string speaker, rest;
    if (split_speaker(text, speaker, rest)) {
      cap.speaker = speaker;
      cap.text = rest;
    } else {
      cap.text = text;
    }
    captions.push_back(std::move(cap));
  }

  std::stable_sort(captions.begin(), captions.end(),
                   [](const TimedCaption& a, const TimedCaption& b) {
                     return a.start_s < b.start_s;
                   });
  return captions;
}

}  // namespace affect

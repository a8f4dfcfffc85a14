#include "affect/text.hpp"

#include <cctype>
#include <unordered_set>

namespace affect {
namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '\'' || c >= 0x80;
}

}  // namespace

std::string lowercase(const std::string& text) {
  std::string out = text;
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    std::size_t begin = 0, end = current.size();
    while (begin < end && current[begin] == '\'') ++begin;
    while (end > begin && current[end - 1] == '\'') --end;
    if (end > begin) tokens.push_back(current.substr(begin, end - begin));
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      current.push_back(
          static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> sentences;
  std::string current;
  const auto flush = [&] {
    std::size_t begin = 0, end = current.size();
    while (begin < end &&
           std::isspace(static_cast<unsigned char>(current[begin])))
      ++begin;
    while (end > begin &&
           std::isspace(static_cast<unsigned char>(current[end - 1])))
      --end;
    if (end > begin) sentences.push_back(current.substr(begin, end - begin));
    current.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return sentences;
}

double type_token_diversity(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return 0.0;
  std::unordered_set<std::string> distinct(tokens.begin(), tokens.end());
  return static_cast<double>(distinct.size()) /
         static_cast<double>(tokens.size());
}

bool has_alphabetic(const std::string& token) {
  for (unsigned char c : token) {
    if (std::isalpha(c) || c >= 0x80) return true;
  }
  return false;
}

}  // namespace affect

#pragma once

#include <string>
#include <vector>

namespace affect {

// The fixed tokenizer used everywhere text enters the system, so corpora and
// feature counts are reproducible: lowercase ASCII, tokens are maximal runs
// of letters/digits/apostrophes (bytes >= 0x80 are kept verbatim so UTF-8
// words survive), leading/trailing apostrophes stripped, everything else a
// separator that is dropped.
std::vector<std::string> tokenize(const std::string& text);

// Splits on runs of '.', '!' or '?'. Text without terminal punctuation is a
// single sentence; empty pieces are dropped.
std::vector<std::string> split_sentences(const std::string& text);

// distinct tokens / total tokens; 0 for an empty list.
double type_token_diversity(const std::vector<std::string>& tokens);

bool has_alphabetic(const std::string& token);

std::string lowercase(const std::string& text);

}  // namespace affect

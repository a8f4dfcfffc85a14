#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "affect/tensor.hpp"

namespace affect {

// How lookups of tokens absent from the table behave: the zero vector, or a
// deterministic pseudo-random vector seeded by a hash of the token (identical
// across calls and processes).
enum class OovPolicy { kZero, kHashed };

struct EmbeddingTable {
  std::size_t dim = 0;
  OovPolicy oov = OovPolicy::kZero;
  std::vector<std::string> tokens;  // insertion order, parallel to vectors
  std::vector<Tensor> vectors;
  std::unordered_map<std::string, std::size_t> index;

  bool contains(const std::string& token) const {
    return index.count(token) != 0;
  }

  // In-table tokens return their stored vector; everything else follows the
  // OOV policy.
  Tensor lookup(const std::string& token) const;
};

// 64-bit FNV-1a; the documented token hash behind the OOV policy and the
// fine-tuned-channel initialization, so expected vectors can be derived
// outside this codebase.
std::uint64_t fnv1a(const std::string& s);

// Uniform in [-0.25, 0.25], dim values drawn from Rng(fnv1a(token)).
Tensor hashed_vector(const std::string& token, std::size_t dim);

// Line-oriented text: `token v1 ... v_d`, whitespace separated; dimension
// fixed by the first entry; blank lines skipped. Duplicate tokens, dimension
// mismatches, and unparsable values raise ParseError naming the line;
// an unreadable path raises IoError; a file with no entries raises
// ParseError.
EmbeddingTable load_embeddings(const std::string& path, OovPolicy oov);

// Sentence matrix: one row per token (per the table's OOV policy), zero-row
// padded at the end up to min_rows. Empty token list raises EmptyInputError.
Tensor embed_sentence(const EmbeddingTable& table,
                      const std::vector<std::string>& tokens,
                      std::size_t min_rows);

}  // namespace affect

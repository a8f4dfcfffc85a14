#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "affect/emotion.hpp"
#include "affect/humor.hpp"
#include "affect/sentiment.hpp"
#include "affect/tensor.hpp"

namespace affect {

// Versioned binary container for trained models: magic "AFFECTCK", a u32
// format version, the model kind, ordered hyperparameter strings, named
// string lists (vocabularies, rosters), and named tensors with shapes and
// little-endian IEEE-754 payloads. Round trips are bit-exact. Unknown
// versions are refused (UnsupportedError); anything structurally wrong is a
// ParseError.
struct Checkpoint {
  std::uint32_t version = 1;
  std::string kind;  // emotion | sentiment | humor
  std::vector<std::pair<std::string, std::string>> hyper;
  std::vector<std::pair<std::string, std::vector<std::string>>> string_lists;
  std::vector<std::pair<std::string, Tensor>> tensors;

  void set_hyper(const std::string& key, const std::string& value);
  void set_hyper_double(const std::string& key, double value);
  void set_hyper_size(const std::string& key, std::size_t value);
  void set_hyper_bool(const std::string& key, bool value);

  const std::string& hyper_at(const std::string& key) const;
  double hyper_double(const std::string& key) const;
  std::size_t hyper_size(const std::string& key) const;
  bool hyper_bool(const std::string& key) const;
  const std::vector<std::string>& list_at(const std::string& name) const;
  const Tensor& tensor_at(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint checkpoint_from(const EmotionModel& model);
EmotionModel emotion_from_checkpoint(const Checkpoint& ck);

Checkpoint checkpoint_from(const SentimentModel& model);
SentimentModel sentiment_from_checkpoint(const Checkpoint& ck);

Checkpoint checkpoint_from(const HumorModel& model);
HumorModel humor_from_checkpoint(const Checkpoint& ck,
                                 std::uint64_t dropout_seed = 0);

}  // namespace affect

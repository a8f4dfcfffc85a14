#pragma once

#include <array>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "affect/tensor.hpp"

namespace affect {

// Lexicon families behind the language cues; user-supplied text files, one
// single-token term per line ('#' comments and blank lines skipped).
struct CueLexicons {
  std::unordered_set<std::string> hedges;
  std::unordered_set<std::string> negations;
  std::unordered_set<std::string> articles;
  std::unordered_set<std::string> self_references;
  std::unordered_set<std::string> social_words;
  std::unordered_set<std::string> positive_emotion;
  std::unordered_set<std::string> negative_emotion;
  std::unordered_set<std::string> exclusive_inclusive;
};

// Expects <family>.txt for each family in `dir`; a missing file raises
// ConfigError naming it.
CueLexicons load_cue_lexicons(const std::string& dir);

// Speech-side input: frame feature vectors (as produced by frame_features)
// plus the response duration.
struct SpeechCueInput {
  double duration_s = 0.0;
  std::vector<Tensor> frames;
};

struct CueVector {
  double hedges = 0.0;
  double negations = 0.0;
  double articles = 0.0;
  double self_references = 0.0;
  double social_words = 0.0;
  double positive_emotion = 0.0;
  double negative_emotion = 0.0;
  double exclusive_inclusive = 0.0;
  double words_per_sentence = 0.0;
  double type_token_diversity = 0.0;
  // Speech cues; all exactly zero when the response has no audio.
  double speech_rate = 0.0;  // tokens per second
  double filled_pauses = 0.0;
  double unfilled_pauses = 0.0;
  double mean_energy = 0.0;
  double pitch_variability = 0.0;
};

// Deterministic counts over the fixed tokenizer; pass audio == nullptr for
// text-only responses.
CueVector extract_cues(const std::string& response_text,
                       const SpeechCueInput* audio, const CueLexicons& lex);

// Cue value by its canonical key ("hedges", ..., "pitch_variability");
// unknown keys raise ConfigError.
double cue_value(const CueVector& cues, const std::string& key);

using WeightTable = std::map<std::string, double>;

// tanh of the weighted cue sum; range (-1, 1).
double score_dimension(const CueVector& cues, const WeightTable& weights);

// Per-dimension weight tables. Defaults encode the extraversion cue signs
// (social words, positive emotion, self references and the speech cues
// except unfilled pauses pull toward E; hedges, negations, articles, long
// sentences, lexical diversity, exclusivity markers and negative emotion
// pull toward I); the other three dimensions default to neutral zero.
struct MbtiWeights {
  WeightTable e_i, n_s, t_f, j_p;
};

MbtiWeights default_mbti_weights();

// Text file with rows `<dimension> <cue> <weight>` (dimensions e_i, n_s,
// t_f, j_p); unknown dimensions raise ConfigError, bad rows ParseError.
MbtiWeights load_mbti_weights(const std::string& path);

struct MbtiScore {
  double e_i = 0.0, n_s = 0.0, t_f = 0.0, j_p = 0.0;
  std::string type;  // four letters
  bool low_confidence = false;
};

// Arithmetic mean per dimension over responses; letters by sign with the
// fixed zero tie-break I/N/F/P; all-zero means are flagged low confidence.
MbtiScore aggregate_personality(
    const std::vector<std::array<double, 4>>& per_response_scores);

std::array<double, 4> score_all_dimensions(const CueVector& cues,
                                           const MbtiWeights& weights);

enum class ChallengeLabel {
  kDisclosureReciprocity,
  kClarification,
  kAvoidance,
  kDeliberateChallenge,
  kAbusive,
  kGarbage,
  kNone,
};

std::string challenge_label_name(ChallengeLabel label);

// Rule-based and total: first match in the fixed priority order
// garbage → abusive → clarification → deliberate_challenge →
// disclosure_reciprocity → avoidance → none.
ChallengeLabel classify_challenge(const std::string& utterance_text);

// Fraction of responses classified as anything but `none`.
double challenge_rate(const std::vector<std::string>& responses);

}  // namespace affect

#include "affect/persona.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "affect/audio.hpp"
#include "affect/errors.hpp"
#include "affect/text.hpp"

namespace affect {
namespace {

// Low-energy frames this quiet count toward unfilled pauses…
constexpr double kPauseEnergyThreshold = 1e-5;
// …once a run lasts at least this long at the 10 ms frame step.
constexpr std::size_t kPauseMinFrames = 20;

const std::unordered_set<std::string>& filler_tokens() {
  static const std::unordered_set<std::string> fillers = {
      "uh", "um", "er", "ah", "erm", "hmm", "uhm"};
  return fillers;
}

std::unordered_set<std::string> load_lexicon_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("load_cue_lexicons: missing lexicon file " + path);
  }
  std::unordered_set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    for (const std::string& token : tokenize(line)) terms.insert(token);
  }
  return terms;
}

double count_hits(const std::vector<std::string>& tokens,
                  const std::unordered_set<std::string>& lexicon) {
  double hits = 0.0;
  for (const std::string& t : tokens) {
    if (lexicon.count(t)) hits += 1.0;
  }
  return hits;
}

}  // namespace

CueLexicons load_cue_lexicons(const std::string& dir) {
  const std::string base = dir.empty() ? "." : dir;
  CueLexicons lex;
  lex.hedges = load_lexicon_file(base + "/hedges.txt");
  lex.negations = load_lexicon_file(base + "/negations.txt");
  lex.articles = load_lexicon_file(base + "/articles.txt");
  lex.self_references = load_lexicon_file(base + "/self_references.txt");
  lex.social_words = load_lexicon_file(base + "/social_words.txt");
  lex.positive_emotion = load_lexicon_file(base + "/positive_emotion.txt");
  lex.negative_emotion = load_lexicon_file(base + "/negative_emotion.txt");
  lex.exclusive_inclusive =
      load_lexicon_file(base + "/exclusive_inclusive.txt");
  return lex;
}

CueVector extract_cues(const std::string& response_text,
                       const SpeechCueInput* audio, const CueLexicons& lex) {
  CueVector cues;
  const std::vector<std::string> tokens = tokenize(response_text);
  cues.hedges = count_hits(tokens, lex.hedges);
  cues.negations = count_hits(tokens, lex.negations);
  cues.articles = count_hits(tokens, lex.articles);
  cues.self_references = count_hits(tokens, lex.self_references);
  cues.social_words = count_hits(tokens, lex.social_words);
  cues.positive_emotion = count_hits(tokens, lex.positive_emotion);
  cues.negative_emotion = count_hits(tokens, lex.negative_emotion);
  cues.exclusive_inclusive = count_hits(tokens, lex.exclusive_inclusive);
  if (!tokens.empty()) {
    const std::size_t sentences =
        std::max<std::size_t>(1, split_sentences(response_text).size());
    cues.words_per_sentence =
        static_cast<double>(tokens.size()) / static_cast<double>(sentences);
    cues.type_token_diversity = type_token_diversity(tokens);
  }

  if (audio != nullptr && !audio->frames.empty() && audio->duration_s > 0.0) {
    cues.speech_rate = static_cast<double>(tokens.size()) / audio->duration_s;
    cues.filled_pauses = count_hits(tokens, filler_tokens());

    const std::size_t dim = audio->frames.front().numel();
    const std::size_t pitch_at = dim - 3, energy_at = dim - 2;
    double energy_sum = 0.0;
    std::size_t quiet_run = 0;
    std::vector<double> voiced;
    for (const Tensor& f : audio->frames) {
      const double e = f.data[energy_at];
      energy_sum += e;
      if (e < kPauseEnergyThreshold) {
        ++quiet_run;
        if (quiet_run == kPauseMinFrames) cues.unfilled_pauses += 1.0;
      } else {
        quiet_run = 0;
      }
      if (f.data[pitch_at] > 0.0) voiced.push_back(f.data[pitch_at]);
    }
    cues.mean_energy = energy_sum / static_cast<double>(audio->frames.size());
    if (!voiced.empty()) {
      double mean = 0.0;
      for (double p : voiced) mean += p;
      mean /= static_cast<double>(voiced.size());
      double var = 0.0;
      for (double p : voiced) var += (p - mean) * (p - mean);
      cues.pitch_variability =
          std::sqrt(var / static_cast<double>(voiced.size()));
    }
  }
  return cues;
}

double cue_value(const CueVector& cues, const std::string& key) {
  if (key == "hedges") return cues.hedges;
  if (key == "negations") return cues.negations;
  if (key == "articles") return cues.articles;
  if (key == "self_references") return cues.self_references;
  if (key == "social_words") return cues.social_words;
  if (key == "positive_emotion") return cues.positive_emotion;
  if (key == "negative_emotion") return cues.negative_emotion;
  if (key == "exclusive_inclusive") return cues.exclusive_inclusive;
  if (key == "words_per_sentence") return cues.words_per_sentence;
  if (key == "type_token_diversity") return cues.type_token_diversity;
  if (key == "speech_rate") return cues.speech_rate;
  if (key == "filled_pauses") return cues.filled_pauses;
  if (key == "unfilled_pauses") return cues.unfilled_pauses;
  if (key == "mean_energy") return cues.mean_energy;
  if (key == "pitch_variability") return cues.pitch_variability;
  throw ConfigError("score_dimension: unknown cue key '" + key + "'");
}

double score_dimension(const CueVector& cues, const WeightTable& weights) {
  double acc = 0.0;
  for (const auto& [key, w] : weights) {
    acc += w * cue_value(cues, key);
  }
  return std::tanh(acc);
}

MbtiWeights default_mbti_weights() {
  MbtiWeights w;
  w.e_i = {
      {"social_words", 1.0},        {"positive_emotion", 1.0},
      {"self_references", 1.0},     {"hedges", -1.0},
      {"negations", -1.0},          {"articles", -1.0},
      {"negative_emotion", -1.0},   {"exclusive_inclusive", -1.0},
      {"words_per_sentence", -0.1}, {"type_token_diversity", -0.5},
      {"speech_rate", 0.2},         {"filled_pauses", 0.5},
      {"unfilled_pauses", -0.5},    {"mean_energy", 1.0},
      {"pitch_variability", 0.5},
  };
  return w;
}

MbtiWeights load_mbti_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_mbti_weights: cannot open " + path);
  MbtiWeights w;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string dim, cue;
    double value = 0.0;
    if (!(ss >> dim >> cue >> value)) {
      throw ParseError("load_mbti_weights: " + path + " line " +
                       std::to_string(line_no) +
                       ": expected '<dimension> <cue> <weight>'");
    }
    WeightTable* table = nullptr;
    if (dim == "e_i") table = &w.e_i;
    else if (dim == "n_s") table = &w.n_s;
    else if (dim == "t_f") table = &w.t_f;
    else if (dim == "j_p") table = &w.j_p;
    else {
      throw ConfigError("load_mbti_weights: " + path + " line " +
                        std::to_string(line_no) + ": unknown dimension '" +
                        dim + "'");
    }
    (*table)[cue] = value;
  }
  return w;
}

std::array<double, 4> score_all_dimensions(const CueVector& cues,
                                           const MbtiWeights& weights) {
  return {score_dimension(cues, weights.e_i),
          score_dimension(cues, weights.n_s),
          score_dimension(cues, weights.t_f),
          score_dimension(cues, weights.j_p)};
}

MbtiScore aggregate_personality(
    const std::vector<std::array<double, 4>>& per_response_scores) {
  if (per_response_scores.empty()) {
    throw EmptyInputError("aggregate_personality: no responses");
  }
  MbtiScore score;
  for (const auto& s : per_response_scores) {
    score.e_i += s[0];
    score.n_s += s[1];
    score.t_f += s[2];
    score.j_p += s[3];
  }
  const double n = static_cast<double>(per_response_scores.size());
  score.e_i /= n;
  score.n_s /= n;
  score.t_f /= n;
  score.j_p /= n;
  // Zero resolves to the second pole of each pair: I, N, F, P.
  score.type.push_back(score.e_i > 0.0 ? 'E' : 'I');
  score.type.push_back(score.n_s > 0.0 ? 'N' : (score.n_s < 0.0 ? 'S' : 'N'));
  score.type.push_back(score.t_f > 0.0 ? 'T' : 'F');
  score.type.push_back(score.j_p > 0.0 ? 'J' : 'P');
  score.low_confidence = score.e_i == 0.0 && score.n_s == 0.0 &&
                         score.t_f == 0.0 && score.j_p == 0.0;
  return score;
}

namespace {

struct Phrase {
  std::vector<std::string> tokens;
  bool exact_only = false;  // match whole responses only, not substrings
};

bool contains_phrase(const std::vector<std::string>& tokens,
                     const Phrase& phrase) {
  if (phrase.tokens.empty() || phrase.tokens.size() > tokens.size()) {
    return false;
  }
  if (phrase.exact_only) return tokens == phrase.tokens;
  for (std::size_t at = 0; at + phrase.tokens.size() <= tokens.size(); ++at) {
    bool all = true;
    for (std::size_t i = 0; i < phrase.tokens.size(); ++i) {
      if (tokens[at + i] != phrase.tokens[i]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

Phrase make_phrase(const char* text, bool exact_only = false) {
  return {tokenize(text), exact_only};
}

const std::vector<Phrase>& abusive_phrases() {
  static const std::vector<Phrase> phrases = {
      make_phrase("get lost"),          make_phrase("none of your business"),
      make_phrase("shut up"),           make_phrase("you are stupid"),
      make_phrase("you're stupid"),     make_phrase("i hate you"),
      make_phrase("you idiot"),         make_phrase("go away", true),
      make_phrase("stupid machine"),    make_phrase("dumb robot"),
  };
  return phrases;
}

const std::vector<Phrase>& clarification_phrases() {
  static const std::vector<Phrase> phrases = {
      make_phrase("can you repeat"),     make_phrase("say it again"),
      make_phrase("say that again"),     make_phrase("what do you mean"),
      make_phrase("i don't understand"), make_phrase("didn't understand"),
      make_phrase("didn't hear"),        make_phrase("pardon", true),
      make_phrase("what", true),         make_phrase("sorry", true),
  };
  return phrases;
}

const std::vector<Phrase>& deliberate_challenge_phrases() {
  static const std::vector<Phrase> phrases = {
      make_phrase("change a topic"),    make_phrase("change the topic"),
      make_phrase("change the subject"), make_phrase("why can't you"),
      make_phrase("why don't you"),     make_phrase("can you even"),
      make_phrase("are you real"),      make_phrase("are you a robot"),
      make_phrase("prove it"),
  };
  return phrases;
}

const std::vector<Phrase>& disclosure_phrases() {
  static const std::vector<Phrase> phrases = {
      make_phrase("what about you"), make_phrase("how about you"),
      make_phrase("and you", true),  make_phrase("your turn"),
      make_phrase("you tell me"),    make_phrase("you first", true),
      make_phrase("same question to you"),
  };
  return phrases;
}

const std::vector<Phrase>& avoidance_phrases() {
  static const std::vector<Phrase> phrases = {
      make_phrase("don't want to talk"),  make_phrase("no mood"),
      make_phrase("not in the mood"),     make_phrase("let's continue"),
      make_phrase("make it a quick one"), make_phrase("you know", true),
      make_phrase("rather not say"),      make_phrase("i'd rather not"),
      make_phrase("next question"),       make_phrase("skip this"),
      make_phrase("let's move on"),       make_phrase("no comment", true),
  };
  return phrases;
}

bool any_match(const std::vector<std::string>& tokens,
               const std::vector<Phrase>& phrases) {
  for (const Phrase& p : phrases) {
    if (contains_phrase(tokens, p)) return true;
  }
  return false;
}

}  // namespace

std::string challenge_label_name(ChallengeLabel label) {
  switch (label) {
    case ChallengeLabel::kDisclosureReciprocity:
      return "disclosure_reciprocity";
    case ChallengeLabel::kClarification:
      return "clarification";
    case ChallengeLabel::kAvoidance:
      return "avoidance";
    case ChallengeLabel::kDeliberateChallenge:
      return "deliberate_challenge";
    case ChallengeLabel::kAbusive:
      return "abusive";
    case ChallengeLabel::kGarbage:
      return "garbage";
    case ChallengeLabel::kNone:
      return "none";
  }
  return "none";
}

ChallengeLabel classify_challenge(const std::string& utterance_text) {
  const std::vector<std::string> tokens = tokenize(utterance_text);
  bool any_word = false;
  for (const std::string& t : tokens) {
    if (has_alphabetic(t)) {
      any_word = true;
      break;
    }
  }
  if (!any_word) return ChallengeLabel::kGarbage;
  if (any_match(tokens, abusive_phrases())) return ChallengeLabel::kAbusive;
  if (any_match(tokens, clarification_phrases())) {
    return ChallengeLabel::kClarification;
  }
  if (any_match(tokens, deliberate_challenge_phrases())) {
    return ChallengeLabel::kDeliberateChallenge;
  }
  if (any_match(tokens, disclosure_phrases())) {
    return ChallengeLabel::kDisclosureReciprocity;
  }
  if (any_match(tokens, avoidance_phrases())) {
    return ChallengeLabel::kAvoidance;
  }
  return ChallengeLabel::kNone;
}

double challenge_rate(const std::vector<std::string>& responses) {
  if (responses.empty()) return 0.0;
  std::size_t challenged = 0;
  for (const std::string& r : responses) {
    if (classify_challenge(r) != ChallengeLabel::kNone) ++challenged;
  }
  return static_cast<double>(challenged) /
         static_cast<double>(responses.size());
}

}  // namespace affect

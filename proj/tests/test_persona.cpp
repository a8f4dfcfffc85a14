#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "affect/errors.hpp"
#include "affect/persona.hpp"
#include "affect/tensor.hpp"
#include "doctest.h"

using namespace affect;

namespace {

CueLexicons tiny_lexicons() {
  CueLexicons lex;
  lex.hedges = {"maybe", "perhaps"};
  lex.negations = {"never", "not"};
  lex.articles = {"a", "an", "the"};
  lex.self_references = {"i", "me", "my"};
  lex.social_words = {"we", "together", "party"};
  lex.positive_emotion = {"laugh", "happy"};
  lex.negative_emotion = {"sad", "awful"};
  lex.exclusive_inclusive = {"but", "without"};
  return lex;
}

// A 42-wide frame row with chosen pitch/energy/zcr tail values.
Tensor frame_row(double pitch, double energy, double zcr) {
  Tensor f = Tensor::zeros({42});
  f(39) = pitch;
  f(40) = energy;
  f(41) = zcr;
  return f;
}

}  // namespace

TEST_SUITE("persona") {

TEST_CASE("the five canonical challenge routings") {
  CHECK(classify_challenge("Can you repeat?") ==
        ChallengeLabel::kClarification);
  CHECK(classify_challenge("I don't want to talk about it") ==
        ChallengeLabel::kAvoidance);
  CHECK(classify_challenge("get lost now") == ChallengeLabel::kAbusive);
  CHECK(classify_challenge("Can I change a topic?") ==
        ChallengeLabel::kDeliberateChallenge);
  CHECK(classify_challenge("I like going for long walks in the evening.") ==
        ChallengeLabel::kNone);
}

TEST_CASE("priority order resolves multi-category responses") {
  // No alphabetic content wins over everything.
  CHECK(classify_challenge("12345 !!!") == ChallengeLabel::kGarbage);
  CHECK(classify_challenge("") == ChallengeLabel::kGarbage);
  // abusive > clarification
  CHECK(classify_challenge("shut up, what do you mean") ==
        ChallengeLabel::kAbusive);
  // clarification > deliberate challenge
  CHECK(classify_challenge("what do you mean, prove it") ==
        ChallengeLabel::kClarification);
  // deliberate challenge > disclosure
  CHECK(classify_challenge("prove it, what about you") ==
        ChallengeLabel::kDeliberateChallenge);
  // disclosure > avoidance
  CHECK(classify_challenge("what about you, next question") ==
        ChallengeLabel::kDisclosureReciprocity);
}

TEST_CASE("exact-only phrases never fire inside longer sentences") {
  CHECK(classify_challenge("what") == ChallengeLabel::kClarification);
  CHECK(classify_challenge("What?") == ChallengeLabel::kClarification);
  CHECK(classify_challenge("what a lovely day") == ChallengeLabel::kNone);
  CHECK(classify_challenge("go away") == ChallengeLabel::kAbusive);
  CHECK(classify_challenge("don't go away") == ChallengeLabel::kNone);
  CHECK(classify_challenge("you know") == ChallengeLabel::kAvoidance);
  CHECK(classify_challenge("you know me well") == ChallengeLabel::kNone);
  CHECK(classify_challenge("sorry") == ChallengeLabel::kClarification);
  CHECK(classify_challenge("sorry about the weather") ==
        ChallengeLabel::kNone);
}

TEST_CASE("label names are stable strings") {
  CHECK(challenge_label_name(ChallengeLabel::kNone) == "none");
  CHECK(challenge_label_name(ChallengeLabel::kGarbage) == "garbage");
  CHECK(challenge_label_name(ChallengeLabel::kAbusive) == "abusive");
  CHECK(challenge_label_name(ChallengeLabel::kClarification) ==
        "clarification");
  CHECK(challenge_label_name(ChallengeLabel::kDeliberateChallenge) ==
        "deliberate_challenge");
  CHECK(challenge_label_name(ChallengeLabel::kDisclosureReciprocity) ==
        "disclosure_reciprocity");
  CHECK(challenge_label_name(ChallengeLabel::kAvoidance) == "avoidance");
}

TEST_CASE("challenge rate counts everything but none") {
  const double rate = challenge_rate(
      {"Can you repeat?", "get lost now", "The weather is nice today."});
  CHECK(rate == doctest::Approx(2.0 / 3.0));
  CHECK(challenge_rate({}) == 0.0);
}

TEST_CASE("lexicon loading expects one file per family") {
  const auto dir =
      std::filesystem::temp_directory_path() / "affect_test_lexicons";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::vector<std::string> families = {
      "hedges",           "negations",        "articles",
      "self_references",  "social_words",     "positive_emotion",
      "negative_emotion", "exclusive_inclusive"};
  for (const std::string& fam : families) {
    // Underscores are token separators, so build a plain marker word.
    std::string marker = fam;
    marker.erase(std::remove(marker.begin(), marker.end(), '_'),
                 marker.end());
    std::ofstream f(dir / (fam + ".txt"));
    f << "# comment line\n\n" << marker << "word\n";
  }
  const CueLexicons lex = load_cue_lexicons(dir.string());
  CHECK(lex.hedges.count("hedgesword") == 1);
  CHECK(lex.hedges.count("# comment line") == 0);
  CHECK(lex.exclusive_inclusive.count("exclusiveinclusiveword") == 1);

  std::filesystem::remove(dir / "articles.txt");
  CHECK_THROWS_AS(load_cue_lexicons(dir.string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("text cues are exact token counts") {
  const CueLexicons lex = tiny_lexicons();
  const CueVector cues = extract_cues(
      "Maybe I never liked the party. But we laugh together!", nullptr, lex);
  CHECK(cues.hedges == 1.0);
  CHECK(cues.negations == 1.0);
  CHECK(cues.articles == 1.0);
  CHECK(cues.self_references == 1.0);
  CHECK(cues.social_words == 3.0);  // party, we, together
  CHECK(cues.positive_emotion == 1.0);
  CHECK(cues.negative_emotion == 0.0);
  CHECK(cues.exclusive_inclusive == 1.0);
  CHECK(cues.words_per_sentence == doctest::Approx(5.0));  // 10 tokens, 2 sentences
  CHECK(cues.type_token_diversity == doctest::Approx(1.0));
  // No audio: every speech cue is exactly zero.
  CHECK(cues.speech_rate == 0.0);
  CHECK(cues.filled_pauses == 0.0);
  CHECK(cues.unfilled_pauses == 0.0);
  CHECK(cues.mean_energy == 0.0);
  CHECK(cues.pitch_variability == 0.0);
}

TEST_CASE("speech cues come from the frame features") {
  const CueLexicons lex = tiny_lexicons();
  SpeechCueInput audio;
  audio.duration_s = 2.0;
  // 25 voiced frames at alternating pitches, then a 20-frame silence
  // (one unfilled pause), then 5 more voiced frames.
  for (int i = 0; i < 25; ++i) {
    audio.frames.push_back(frame_row(i % 2 ? 210.0 : 190.0, 0.02, 0.1));
  }
  for (int i = 0; i < 20; ++i) {
    audio.frames.push_back(frame_row(0.0, 1e-7, 0.0));
  }
  for (int i = 0; i < 5; ++i) {
    audio.frames.push_back(frame_row(200.0, 0.03, 0.1));
  }
  const CueVector cues = extract_cues("um so maybe yes", &audio, lex);
  CHECK(cues.speech_rate == doctest::Approx(2.0));  // 4 tokens / 2 s
  CHECK(cues.filled_pauses == 1.0);                 // "um"
  CHECK(cues.unfilled_pauses == 1.0);               // one 20-frame quiet run
  const double expected_energy = (25 * 0.02 + 20 * 1e-7 + 5 * 0.03) / 50.0;
  CHECK(cues.mean_energy == doctest::Approx(expected_energy));
  CHECK(cues.pitch_variability > 0.0);  // mixed 190/200/210 readings

  // Frames of uniform pitch have zero variability.
  SpeechCueInput flat;
  flat.duration_s = 1.0;
  for (int i = 0; i < 10; ++i) flat.frames.push_back(frame_row(150.0, 0.05, 0.1));
  CHECK(extract_cues("hello there", &flat, lex).pitch_variability ==
        doctest::Approx(0.0));
}

TEST_CASE("dimension scores are bounded and respect the weights") {
  const CueLexicons lex = tiny_lexicons();
  const CueVector social =
      extract_cues("we laugh together at the party", nullptr, lex);
  const CueVector hedged =
      extract_cues("maybe perhaps not never but without me", nullptr, lex);
  const MbtiWeights weights = default_mbti_weights();
  const double s_social = score_dimension(social, weights.e_i);
  const double s_hedged = score_dimension(hedged, weights.e_i);
  CHECK(s_social > 0.0);
  CHECK(s_hedged < 0.0);
  CHECK(s_social < 1.0);
  CHECK(s_hedged > -1.0);

  WeightTable bad = {{"no_such_cue", 1.0}};
  CHECK_THROWS_AS(score_dimension(social, bad), ConfigError);

  const std::array<double, 4> all = score_all_dimensions(social, weights);
  CHECK(all[0] == doctest::Approx(s_social));
  // Neutral default tables leave the other dimensions at zero.
  CHECK(all[1] == 0.0);
  CHECK(all[2] == 0.0);
  CHECK(all[3] == 0.0);
}

TEST_CASE("weight files override the defaults") {
  const auto path =
      std::filesystem::temp_directory_path() / "affect_test_weights.txt";
  {
    std::ofstream f(path);
    f << "# dimension cue weight\n";
    f << "e_i social_words 2.0\n";
    f << "n_s hedges -0.5\n";
  }
  const MbtiWeights w = load_mbti_weights(path.string());
  CHECK(w.e_i.at("social_words") == doctest::Approx(2.0));
  CHECK(w.n_s.at("hedges") == doctest::Approx(-0.5));
  CHECK(w.t_f.empty());

  {
    std::ofstream f(path);
    f << "q_x hedges 1.0\n";
  }
  CHECK_THROWS_AS(load_mbti_weights(path.string()), ConfigError);
  {
    std::ofstream f(path);
    f << "e_i hedges notanumber\n";
  }
  CHECK_THROWS_AS(load_mbti_weights(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("aggregation averages, tie-breaks and flags confidence") {
  const std::vector<std::array<double, 4>> scores = {
      {0.6, -0.2, 0.0, 0.1}, {0.2, -0.4, 0.0, 0.3}};
  const MbtiScore s = aggregate_personality(scores);
  CHECK(s.e_i == doctest::Approx(0.4));
  CHECK(s.n_s == doctest::Approx(-0.3));
  CHECK(s.t_f == doctest::Approx(0.0));
  CHECK(s.j_p == doctest::Approx(0.2));
  // e_i > 0 -> E; n_s < 0 -> S; t_f == 0 -> F; j_p > 0 -> J.
  CHECK(s.type == "ESFJ");
  CHECK_FALSE(s.low_confidence);

  // Zero ties resolve to I/N/F/P, and all-zero means are low confidence.
  const MbtiScore zero = aggregate_personality({{0.0, 0.0, 0.0, 0.0}});
  CHECK(zero.type == "INFP");
  CHECK(zero.low_confidence);

  // Permutation invariance of the mean.
  std::vector<std::array<double, 4>> permuted = {scores[1], scores[0]};
  const MbtiScore p = aggregate_personality(permuted);
  CHECK(p.type == s.type);
  CHECK(p.e_i == doctest::Approx(s.e_i));

  CHECK_THROWS_AS(aggregate_personality({}), EmptyInputError);
}

}  // TEST_SUITE

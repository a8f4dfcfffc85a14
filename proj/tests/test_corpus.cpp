#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "affect/corpus.hpp"
#include "affect/errors.hpp"
#include "affect/text.hpp"
#include "affect/wav.hpp"
#include "doctest.h"

using namespace affect;

namespace {

constexpr double kPi = 3.14159265358979323846;

AudioSegment tone(double hz, double seconds, std::uint32_t rate,
                  double amplitude) {
  AudioSegment seg;
  seg.sample_rate = rate;
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  for (std::size_t i = 0; i < n; ++i) {
    seg.samples.push_back(amplitude * std::sin(2.0 * kPi * hz * i / rate));
  }
  return seg;
}

Utterance make_utt(double start_s, double end_s, std::uint32_t rate) {
  Utterance u;
  u.start_s = start_s;
  u.end_s = end_s;
  u.tokens = {"hello"};
  u.text = "hello";
  u.audio = tone(220.0, end_s - start_s, rate, 0.5);
  u.audio.sample_rate = rate;
  return u;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("tokenizer folds case and strips punctuation") {
  CHECK(tokenize("Hello, world!") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("don't stop-me now") ==
        std::vector<std::string>{"don't", "stop", "me", "now"});
  CHECK(tokenize("'quoted' words") == std::vector<std::string>{"quoted", "words"});
  CHECK(tokenize("x2 4you") == std::vector<std::string>{"x2", "4you"});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("") == std::vector<std::string>{});
}

TEST_CASE("sentence splitting and diversity helpers") {
  CHECK(split_sentences("One. Two! Three?") ==
        std::vector<std::string>{"One", "Two", "Three"});
  CHECK(split_sentences("no punctuation") ==
        std::vector<std::string>{"no punctuation"});
  CHECK(type_token_diversity({"a", "b", "a"}) == doctest::Approx(2.0 / 3.0));
  CHECK(type_token_diversity({}) == 0.0);
  CHECK(has_alphabetic("ab3"));
  CHECK_FALSE(has_alphabetic("123"));
}

TEST_CASE("srt parsing extracts speakers and sorts by time") {
  const std::string srt =
      "2\n"
      "00:00:05,000 --> 00:00:06,200\n"
      "Fine.\n"
      "\n"
      "1\n"
      "00:00:01,000 --> 00:00:02,500\n"
      "PENNY: Okay.\n"
      "\n"
      "3\n"
      "00:01:00,000 --> 00:01:02,000\n"
      "Two lines\n"
      "of text.\n";
  const std::vector<TimedCaption> caps = parse_srt(srt);
  REQUIRE(caps.size() == 3);
  CHECK(caps[0].index == 1);
  CHECK(caps[0].start_s == doctest::Approx(1.0));
  CHECK(caps[0].end_s == doctest::Approx(2.5));
  CHECK(caps[0].speaker == "PENNY");
  CHECK(caps[0].text == "Okay.");
  CHECK(caps[1].speaker == "");
  CHECK(caps[1].text == "Fine.");
  CHECK(caps[2].start_s == doctest::Approx(60.0));
  CHECK(caps[2].text == "Two lines of text.");

  CHECK(parse_srt("").empty());
  CHECK_THROWS_AS(parse_srt("abc\n00:00:01,000 --> 00:00:02,000\nHi.\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_srt("1\n00:00:02,000 --> 00:00:01,000\nHi.\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_srt("1\nnot a timestamp\nHi.\n"), ParseError);
}

TEST_CASE("span merging unions overlaps") {
  std::vector<LaughSpan> spans = {{5.0, 6.0}, {1.0, 2.0}, {1.5, 3.0}, {3.0, 3.5}};
  const std::vector<LaughSpan> merged = merge_spans(spans);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].start_s == doctest::Approx(1.0));
  CHECK(merged[0].end_s == doctest::Approx(3.5));
  CHECK(merged[1].start_s == doctest::Approx(5.0));
  CHECK(merge_spans({}).empty());
}

TEST_CASE("sound detection finds an energy burst") {
  AudioSegment seg;
  seg.sample_rate = 8000;
  seg.samples.assign(8000 * 6, 0.0);
  // One second of loud tone from t=3 to t=4.
  for (std::size_t i = 8000 * 3; i < 8000 * 4; ++i) {
    seg.samples[i] = 0.6 * std::sin(2.0 * kPi * 180.0 * i / 8000.0);
  }
  const std::vector<LaughSpan> spans = detect_sound_spans(seg, 0.01, 0.2);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start_s == doctest::Approx(3.0).epsilon(0.05));
  CHECK(spans[0].end_s == doctest::Approx(4.0).epsilon(0.05));

  // Two bursts separated by 50 ms of silence merge into one span.
  AudioSegment close_pair;
  close_pair.sample_rate = 8000;
  close_pair.samples.assign(8000 * 2, 0.0);
  auto burst = [&](double from, double to) {
    for (std::size_t i = static_cast<std::size_t>(from * 8000);
         i < static_cast<std::size_t>(to * 8000); ++i) {
      close_pair.samples[i] = 0.5;
    }
  };
  burst(0.50, 0.80);
  burst(0.85, 1.20);
  const std::vector<LaughSpan> joined = detect_sound_spans(close_pair, 0.01, 0.2);
  REQUIRE(joined.size() == 1);
  CHECK(joined[0].start_s == doctest::Approx(0.5).epsilon(0.08));
  CHECK(joined[0].end_s == doctest::Approx(1.2).epsilon(0.05));

  // A lone 120 ms burst dies to the minimum-duration filter.
  AudioSegment blip;
  blip.sample_rate = 8000;
  blip.samples.assign(8000, 0.0);
  for (std::size_t i = 4000; i < 4000 + 960; ++i) blip.samples[i] = 0.5;
  CHECK(detect_sound_spans(blip, 0.01, 0.2).empty());
}

TEST_CASE("laughter csv parsing") {
  const auto path =
      std::filesystem::temp_directory_path() / "affect_test_laughs.csv";
  {
    std::ofstream f(path);
    f << "start,end\n";
    f << "1.5,2.25\n";
    f << "10,11.5\n";
  }
  const std::vector<LaughSpan> spans = load_laughter_csv(path.string());
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start_s == doctest::Approx(1.5));
  CHECK(spans[0].end_s == doctest::Approx(2.25));
  CHECK(spans[1].end_s == doctest::Approx(11.5));

  {
    std::ofstream f(path);
    f << "2.0,1.0\n";
  }
  CHECK_THROWS_AS(load_laughter_csv(path.string()), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_laughter_csv(path.string()), IoError);
}

TEST_CASE("punchline labels follow the one-second rule inclusively") {
  std::vector<Utterance> utts;
  for (int i = 0; i < 4; ++i) {
    Utterance u;
    u.start_s = i * 10.0;
    u.end_s = i * 10.0 + 2.0;
    utts.push_back(u);
  }
  // Laugh exactly 1 s after utterance 0 ends (boundary: inclusive), laugh
  // right at utterance 2's end (exclusive: must start strictly after), laugh
  // 1.001 s after utterance 3 (too late).
  const std::vector<LaughSpan> laughs = {{3.0, 3.8}, {22.0, 23.0}, {33.001, 34.0}};
  label_punchlines(utts, laughs);
  CHECK(utts[0].is_punchline);
  CHECK_FALSE(utts[1].is_punchline);
  CHECK_FALSE(utts[2].is_punchline);
  CHECK_FALSE(utts[3].is_punchline);

  // Idempotent: relabeling with the same spans changes nothing, and stale
  // labels are cleared.
  utts[1].is_punchline = true;
  label_punchlines(utts, laughs);
  CHECK(utts[0].is_punchline);
  CHECK_FALSE(utts[1].is_punchline);
}

TEST_CASE("laughter trimming removes exactly the overlapped samples") {
  // 2 s utterance at t=[10,12), 8 kHz: 16000 samples.
  Utterance u = make_utt(10.0, 12.0, 8000);
  // Laugh covers [10.5, 11.0): samples 4000..7999 (sample t = 10 + i/8000).
  const std::vector<LaughSpan> laughs = {{10.5, 11.0}};
  const Utterance trimmed = trim_laughter(u, laughs);
  CHECK(trimmed.audio.samples.size() == 12000);
  CHECK(trimmed.audio_usable);
  CHECK(trimmed.start_s == 10.0);  // caption times unchanged
  CHECK(trimmed.end_s == 12.0);
  // The first kept sample after the cut is the original sample 8000.
  CHECK(trimmed.audio.samples[4000] == doctest::Approx(u.audio.samples[8000]));

  // A laugh covering everything leaves the utterance unusable.
  const Utterance eaten = trim_laughter(u, {{9.0, 13.0}});
  CHECK(eaten.audio.samples.empty());
  CHECK_FALSE(eaten.audio_usable);
  CHECK(eaten.text == u.text);

  // No overlap: untouched.
  const Utterance same = trim_laughter(u, {{0.0, 1.0}});
  CHECK(same.audio.samples.size() == u.audio.samples.size());
}

TEST_CASE("per-season episode splits cover every episode exactly once") {
  std::vector<EpisodeCorpus> episodes;
  for (int season = 1; season <= 2; ++season) {
    for (int ep = 1; ep <= 10; ++ep) {
      EpisodeCorpus e;
      e.show = "show";
      e.season = season;
      e.episode = ep;
      episodes.push_back(e);
    }
  }
  const CorpusSplit split = split_corpus(episodes, 99);
  CHECK_FALSE(split.best_effort);
  CHECK(split.episodes.dev.size() == 2);   // one per season
  CHECK(split.episodes.test.size() == 2);
  CHECK(split.episodes.train.size() == 16);

  std::set<std::string> seen;
  auto tag = [](const EpisodeCorpus& e) {
    return e.show + "/" + std::to_string(e.season) + "/" +
           std::to_string(e.episode);
  };
  for (const auto* part :
       {&split.episodes.train, &split.episodes.dev, &split.episodes.test}) {
    for (const auto& e : *part) seen.insert(tag(e));
  }
  CHECK(seen.size() == 20);

  // Determinism.
  const CorpusSplit again = split_corpus(episodes, 99);
  REQUIRE(again.episodes.dev.size() == 2);
  CHECK(tag(again.episodes.dev[0]) == tag(split.episodes.dev[0]));
  CHECK(tag(again.episodes.dev[1]) == tag(split.episodes.dev[1]));

  // A three-episode season is carved best-effort.
  std::vector<EpisodeCorpus> tiny(episodes.begin(), episodes.begin() + 3);
  const CorpusSplit small = split_corpus(tiny, 99);
  CHECK(small.best_effort);
  CHECK(small.episodes.dev.size() == 1);
  CHECK(small.episodes.test.size() == 1);
}

TEST_CASE("episode building ties captions, audio and laughs together") {
  const auto dir = temp_dir("affect_test_episode");
  const auto srt_path = dir / "e1.srt";
  {
    std::ofstream f(srt_path);
    f << "1\n00:00:00,500 --> 00:00:02,000\nJOEY: How you doin'?\n\n";
    f << "2\n00:00:03,000 --> 00:00:04,000\nFine.\n\n";
  }
  // 6 s episode audio with a laugh burst at [4.2, 4.8].
  AudioSegment wav;
  wav.sample_rate = 8000;
  wav.samples.assign(8000 * 6, 0.0);
  for (std::size_t i = 0; i < wav.samples.size(); ++i) {
    wav.samples[i] = 0.05 * std::sin(2.0 * kPi * 150.0 * i / 8000.0);
  }
  for (std::size_t i = 8000 * 42 / 10; i < 8000 * 48 / 10; ++i) {
    wav.samples[i] = 0.7 * std::sin(2.0 * kPi * 90.0 * i / 8000.0);
  }
  const auto wav_path = dir / "e1.wav";
  write_wav(wav_path.string(), wav);

  EpisodeInputs inputs;
  inputs.show = "friends";
  inputs.season = 1;
  inputs.episode = 1;
  inputs.srt_path = srt_path.string();
  inputs.wav_path = wav_path.string();

  BuildOptions opts;
  opts.energy_threshold = 0.05;
  const EpisodeCorpus ep = build_episode(inputs, opts);
  REQUIRE(ep.utterances.size() == 2);
  CHECK(ep.utterances[0].speaker == "JOEY");
  CHECK(ep.utterances[0].tokens ==
        std::vector<std::string>{"how", "you", "doin"});
  CHECK(ep.utterances[0].audio.samples.size() == 12000);  // 1.5 s slice
  // The laugh at 4.2 starts within a second of utterance 2's end (4.0).
  CHECK_FALSE(ep.utterances[0].is_punchline);
  CHECK(ep.utterances[1].is_punchline);

  std::filesystem::remove_all(dir);
}

TEST_CASE("corpus writing round trips and is byte deterministic") {
  std::vector<EpisodeCorpus> episodes;
  for (int ep = 1; ep <= 3; ++ep) {
    EpisodeCorpus e;
    e.show = "demo";
    e.season = 1;
    e.episode = ep;
    Utterance u1 = make_utt(0.0, 0.5, 8000);
    u1.index = 0;
    u1.speaker = "ALICE";
    u1.text = "Hi there.";
    u1.tokens = tokenize(u1.text);
    Utterance u2 = make_utt(1.0, 1.5, 8000);
    u2.index = 1;
    u2.speaker = "BOB";
    u2.text = "Hello!";
    u2.tokens = tokenize(u2.text);
    u2.is_punchline = true;
    e.utterances = {u1, u2};
    episodes.push_back(e);
  }
  const CorpusSplit split = split_corpus(episodes, 5);

  const auto dir1 = temp_dir("affect_test_corpus1");
  const auto dir2 = temp_dir("affect_test_corpus2");
  write_corpus(split, dir1.string());
  write_corpus(split, dir2.string());

  const std::vector<ManifestRow> manifest =
      load_manifest((dir1 / "manifest.tsv").string());
  REQUIRE(manifest.size() == 3);
  std::size_t train_rows = 0;
  for (const ManifestRow& row : manifest) {
    CHECK(row.show == "demo");
    if (row.split == "train") ++train_rows;
    const std::vector<Utterance> back =
        load_episode_records((dir1 / row.records_file).string());
    REQUIRE(back.size() == 2);
    CHECK(back[0].speaker == "ALICE");
    CHECK(back[0].text == "Hi there.");
    CHECK(back[0].tokens == std::vector<std::string>{"hi", "there"});
    CHECK_FALSE(back[0].is_punchline);
    CHECK(back[1].is_punchline);
    CHECK(back[1].start_s == doctest::Approx(1.0));
    CHECK(back[1].audio.samples.size() == 4000);
  }
  CHECK(train_rows == 1);  // 3 episodes: best-effort 1/1/1

  // Byte determinism across independent writes.
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir1);
    std::ifstream a(entry.path(), std::ios::binary);
    std::ifstream b(dir2 / rel, std::ios::binary);
    REQUIRE(b.good());
    const std::string bytes_a((std::istreambuf_iterator<char>(a)),
                              std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(b)),
                              std::istreambuf_iterator<char>());
    CHECK(bytes_a == bytes_b);
  }

  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

}  // TEST_SUITE

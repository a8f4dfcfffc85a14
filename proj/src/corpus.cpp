#include "affect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "affect/errors.hpp"
#include "affect/text.hpp"

namespace affect {
namespace fs = std::filesystem;

std::vector<LaughSpan> merge_spans(std::vector<LaughSpan> spans) {
  std::sort(spans.begin(), spans.end(),
            [](const LaughSpan& a, const LaughSpan& b) {
              return a.start_s < b.start_s;
            });
  std::vector<LaughSpan> merged;
  for (const LaughSpan& s : spans) {
    if (!merged.empty() && s.start_s <= merged.back().end_s) {
      merged.back().end_s = std::max(merged.back().end_s, s.end_s);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

std::vector<LaughSpan> detect_sound_spans(const AudioSegment& seg,
                                          double energy_threshold,
                                          double min_duration_s) {
  std::vector<LaughSpan> spans;
  if (seg.samples.empty()) return spans;
  const auto frame_len = static_cast<std::size_t>(
      std::llround(0.025 * seg.sample_rate));
  if (frame_len == 0) return spans;

  const double rate = static_cast<double>(seg.sample_rate);
  bool in_run = false;
  std::size_t run_start = 0;
  const std::size_t frames = (seg.samples.size() + frame_len - 1) / frame_len;
  for (std::size_t f = 0; f <= frames; ++f) {
    bool active = false;
    if (f < frames) {
      const std::size_t begin = f * frame_len;
      const std::size_t end =
          std::min(begin + frame_len, seg.samples.size());
      double acc = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        acc += seg.samples[i] * seg.samples[i];
      }
      active = acc / static_cast<double>(end - begin) > energy_threshold;
    }
    if (active && !in_run) {
      in_run = true;
      run_start = f;
    } else if (!active && in_run) {
      in_run = false;
      spans.push_back({static_cast<double>(run_start * frame_len) / rate,
                       static_cast<double>(f * frame_len) / rate});
    }
  }

  // Merge nearby runs first, then drop what is still too short.
  std::vector<LaughSpan> merged;
  for (const LaughSpan& s : spans) {
    if (!merged.empty() && s.start_s - merged.back().end_s < 0.1) {
      merged.back().end_s = s.end_s;
    } else {
      merged.push_back(s);
    }
  }
  std::vector<LaughSpan> kept;
  for (const LaughSpan& s : merged) {
    if (s.end_s - s.start_s >= min_duration_s) kept.push_back(s);
  }
  return kept;
}

std::vector<LaughSpan> load_laughter_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_laughter_csv: cannot open " + path);
  std::vector<LaughSpan> spans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) {
      line.pop_back();
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("load_laughter_csv: " + path + " line " +
                       std::to_string(line_no) + ": expected 'start,end'");
    }
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double start = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      const double end = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      if (end <= start) {
        throw ParseError("load_laughter_csv: " + path + " line " +
                         std::to_string(line_no) +
                         ": span ends at or before its start");
      }
      spans.push_back({start, end});
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw ParseError("load_laughter_csv: " + path + " line " +
                       std::to_string(line_no) + ": bad number in '" + line +
                       "'");
    }
  }
  return spans;
}

void label_punchlines(std::vector<Utterance>& utterances,
                      const std::vector<LaughSpan>& laughs) {
  const std::vector<LaughSpan> merged = merge_spans(laughs);
  for (Utterance& u : utterances) {
    u.is_punchline = false;
    for (const LaughSpan& l : merged) {
      if (l.start_s > u.end_s && l.start_s <= u.end_s + 1.0) {
        u.is_punchline = true;
        break;
      }
    }
  }
}

Utterance trim_laughter(const Utterance& u,
                        const std::vector<LaughSpan>& laughs) {
  Utterance out = u;
  if (u.audio.samples.empty()) return out;
  const std::vector<LaughSpan> merged = merge_spans(laughs);
  const double rate = static_cast<double>(u.audio.sample_rate);

  std::vector<double> kept;
  kept.reserve(u.audio.samples.size());
  for (std::size_t i = 0; i < u.audio.samples.size(); ++i) {
    const double t = u.start_s + static_cast<double>(i) / rate;
    bool inside = false;
    for (const LaughSpan& l : merged) {
      if (t >= l.start_s && t < l.end_s) {
        inside = true;
        break;
      }
      if (l.start_s > t) break;  // merged spans are sorted
    }
    if (!inside) kept.push_back(u.audio.samples[i]);
  }
  out.audio.samples = std::move(kept);
  if (out.audio.samples.empty()) {
    out.audio_usable = false;
  }
  return out;
}

CorpusSplit split_corpus(std::vector<EpisodeCorpus> episodes,
                         std::uint64_t seed) {
  std::sort(episodes.begin(), episodes.end(),
            [](const EpisodeCorpus& a, const EpisodeCorpus& b) {
              if (a.show != b.show) return a.show < b.show;
              if (a.season != b.season) return a.season < b.season;
              return a.episode < b.episode;
            });

  CorpusSplit out;
  Rng rng(seed);
  std::size_t at = 0;
  while (at < episodes.size()) {
    std::size_t end = at;
    while (end < episodes.size() && episodes[end].show == episodes[at].show &&
           episodes[end].season == episodes[at].season) {
      ++end;
    }
    std::vector<EpisodeCorpus> group(
        std::make_move_iterator(episodes.begin() +
                                static_cast<std::ptrdiff_t>(at)),
        std::make_move_iterator(episodes.begin() +
                                static_cast<std::ptrdiff_t>(end)));
    bool best_effort = false;
    Split<EpisodeCorpus> season =
        split_80_10_10(std::move(group), rng, &best_effort);
    out.best_effort = out.best_effort || best_effort;
    for (auto& e : season.train) out.episodes.train.push_back(std::move(e));
    for (auto& e : season.dev) out.episodes.dev.push_back(std::move(e));
    for (auto& e : season.test) out.episodes.test.push_back(std::move(e));
    at = end;
  }
  return out;
}

EpisodeCorpus build_episode(const EpisodeInputs& inputs,
                            const BuildOptions& opts) {
  EpisodeCorpus corpus;
  corpus.show = inputs.show;
  corpus.season = inputs.season;
  corpus.episode = inputs.episode;

  std::ifstream in(inputs.srt_path, std::ios::binary);
  if (!in) throw IoError("build_episode: cannot open " + inputs.srt_path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

  AudioSegment track;
  if (!inputs.wav_path.empty()) track = load_wav(inputs.wav_path);

  for (const TimedCaption& cap : parse_srt(bytes)) {
    Utterance u;
    u.index = corpus.utterances.size();
    u.start_s = cap.start_s;
    u.end_s = cap.end_s;
    u.speaker = cap.speaker;
    u.text = cap.text;
    u.tokens = tokenize(cap.text);
    if (!track.samples.empty()) {
      const auto lo = static_cast<std::size_t>(std::clamp<long long>(
          std::llround(cap.start_s * track.sample_rate), 0,
          static_cast<long long>(track.samples.size())));
      const auto hi = static_cast<std::size_t>(std::clamp<long long>(
          std::llround(cap.end_s * track.sample_rate),
          static_cast<long long>(lo),
          static_cast<long long>(track.samples.size())));
      u.audio.sample_rate = track.sample_rate;
      u.audio.samples.assign(track.samples.begin() +
                                 static_cast<std::ptrdiff_t>(lo),
                             track.samples.begin() +
                                 static_cast<std::ptrdiff_t>(hi));
    } else {
      u.audio_usable = false;
    }
    corpus.utterances.push_back(std::move(u));
  }

  std::vector<LaughSpan> laughs;
  if (!inputs.laughter_path.empty()) {
    laughs = load_laughter_csv(inputs.laughter_path);
  } else if (!track.samples.empty()) {
    laughs = detect_sound_spans(track, opts.energy_threshold,
                                opts.min_laugh_s);
  }
  laughs = merge_spans(laughs);

  label_punchlines(corpus.utterances, laughs);
  for (Utterance& u : corpus.utterances) {
    u = trim_laughter(u, laughs);
  }
  return corpus;
}

namespace {

std::string episode_stem(const EpisodeCorpus& e) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "s%02de%02d", e.season, e.episode);
  return e.show.empty() ? std::string(buf) : e.show + "_" + buf;
}

std::string format_time(double t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", t);
  return buf;
}

std::string sanitize_field(std::string s) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

void write_episode_records(const EpisodeCorpus& e, const fs::path& out_dir,
                           const std::string& stem) {
  const fs::path audio_dir = out_dir / "audio";
  std::ostringstream records;
  records << "index\tstart_s\tend_s\tspeaker\ttext\tis_punchline\taudio_path\n";
  for (const Utterance& u : e.utterances) {
    std::string audio_path;
    if (u.audio_usable && !u.audio.samples.empty()) {
      char name[96];
      std::snprintf(name, sizeof(name), "%s_%04zu.wav", stem.c_str(),
                    u.index);
      fs::create_directories(audio_dir);
      write_wav((audio_dir / name).string(), u.audio);
      audio_path = std::string("audio/") + name;
    }
    records << u.index << '\t' << format_time(u.start_s) << '\t'
            << format_time(u.end_s) << '\t' << sanitize_field(u.speaker)
            << '\t' << sanitize_field(u.text) << '\t'
            << (u.is_punchline ? 1 : 0) << '\t' << audio_path << '\n';
  }
  std::ofstream f(out_dir / (stem + ".tsv"), std::ios::trunc);
  if (!f) {
    throw IoError("write_corpus: cannot write " +
                  (out_dir / (stem + ".tsv")).string());
  }
  f << records.str();
}

}  // namespace

void write_corpus(const CorpusSplit& split, const std::string& out_dir) {
  const fs::path root(out_dir);
  fs::create_directories(root);
  std::ostringstream manifest;
  manifest << "split\tshow\tseason\tepisode\trecords_file\n";
  const auto emit = [&](const std::vector<EpisodeCorpus>& episodes,
                        const char* name) {
    for (const EpisodeCorpus& e : episodes) {
      const std::string stem = episode_stem(e);
      write_episode_records(e, root, stem);
      manifest << name << '\t' << sanitize_field(e.show) << '\t' << e.season
               << '\t' << e.episode << '\t' << stem << ".tsv" << '\n';
    }
  };
  emit(split.episodes.train, "train");
  emit(split.episodes.dev, "dev");
  emit(split.episodes.test, "test");
  std::ofstream f(root / "manifest.tsv", std::ios::trunc);
  if (!f) {
    throw IoError("write_corpus: cannot write " +
                  (root / "manifest.tsv").string());
  }
  f << manifest.str();
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<Utterance> load_episode_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_episode_records: cannot open " + path);
  const fs::path base = fs::path(path).parent_path();

  std::vector<Utterance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) continue;  // header
    if (line.empty()) continue;
    const std::vector<std::string> f = split_tsv(line);
    if (f.size() != 7) {
      throw ParseError("load_episode_records: " + path + " line " +
                       std::to_string(line_no) + ": expected 7 fields, got " +
                       std::to_string(f.size()));
    }
    try {
      Utterance u;
      u.index = static_cast<std::size_t>(std::stoull(f[0]));
      u.start_s = std::stod(f[1]);
      u.end_s = std::stod(f[2]);
      u.speaker = f[3];
      u.text = f[4];
      u.tokens = tokenize(u.text);
      u.is_punchline = f[5] == "1";
      if (!f[6].empty()) {
        u.audio = load_wav((base / f[6]).string());
      } else {
        u.audio_usable = false;
      }
      out.push_back(std::move(u));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("load_episode_records: " + path + " line " +
                       std::to_string(line_no) + ": bad field value");
    }
  }
  return out;
}

std::vector<ManifestRow> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_manifest: cannot open " + path);
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const std::vector<std::string> f = split_tsv(line);
    if (f.size() != 5) {
      throw ParseError("load_manifest: " + path + " line " +
                       std::to_string(line_no) + ": expected 5 fields");
    }
    try {
      rows.push_back({f[0], f[1], std::stoi(f[2]), std::stoi(f[3]), f[4]});
    } catch (const std::exception&) {
      throw ParseError("load_manifest: " + path + " line " +
                       std::to_string(line_no) + ": bad season/episode");
    }
  }
  return rows;
}

}  // namespace affect

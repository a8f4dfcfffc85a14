#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affect/humor.hpp"
#include "affect/srt.hpp"
#include "affect/wav.hpp"

namespace affect {

struct LaughSpan {
  double start_s = 0.0;
  double end_s = 0.0;
};

// Sorts by start and unions overlapping or touching spans.
std::vector<LaughSpan> merge_spans(std::vector<LaughSpan> spans);

// Maximal runs of 25 ms frames whose energy exceeds the threshold; runs
// separated by less than 100 ms are merged, and merged spans shorter than
// min_duration_s are discarded as detector noise.
std::vector<LaughSpan> detect_sound_spans(const AudioSegment& seg,
                                          double energy_threshold,
                                          double min_duration_s = 0.2);

// `start_seconds,end_seconds` per line; a non-numeric first line is treated
// as a header. Bad rows and end <= start raise ParseError with the line.
std::vector<LaughSpan> load_laughter_csv(const std::string& path);

// is_punchline := some laugh starts in (end_s, end_s + 1.0] — inclusive at
// the 1 s boundary; every other utterance is cleared. Duplicate/overlapping
// laughs are merged first, so the operation is idempotent.
void label_punchlines(std::vector<Utterance>& utterances,
                      const std::vector<LaughSpan>& laughs);

// Removes the samples of `u.audio` whose timeline positions fall inside any
// laugh span and concatenates the rest. An utterance whose audio is entirely
// consumed is flagged unusable but keeps its text. Caption times are
// unchanged; the audio duration shrinks with its sample count.
Utterance trim_laughter(const Utterance& u,
                        const std::vector<LaughSpan>& laughs);

struct EpisodeCorpus {
  std::string show;
  int season = 0;
  int episode = 0;
  std::vector<Utterance> utterances;
};

struct CorpusSplit {
  Split<EpisodeCorpus> episodes;
  bool best_effort = false;  // some season had too few episodes for 80/10/10
};

// Per-season 80/10/10 episode split: groups sorted by (show, season),
// episodes by number, one seeded shuffle stream across groups in that order;
// each season contributes floor(n/10) episodes to dev and test (1/1
// best-effort when 3 <= n < 10, all-train below that).
CorpusSplit split_corpus(std::vector<EpisodeCorpus> episodes,
                         std::uint64_t seed);

struct EpisodeInputs {
  std::string show;
  int season = 0;
  int episode = 0;
  std::string srt_path;
  std::string wav_path;       // optional; empty = text-only episode
  std::string laughter_path;  // optional CSV; empty = detect from the WAV
};

struct BuildOptions {
  double energy_threshold = 0.01;
  double min_laugh_s = 0.2;
};

// SRT → utterances (fixed tokenizer), audio sliced per caption from the
// episode WAV, laughter loaded or detected, punchlines labeled, laughter
// overlap trimmed from each utterance's audio.
EpisodeCorpus build_episode(const EpisodeInputs& inputs,
                            const BuildOptions& opts);

// Writes one record file per episode (tab-separated: index, start_s, end_s,
// speaker, text, is_punchline, audio_path), per-utterance WAVs under
// audio/, and manifest.tsv mapping episodes to splits. Deterministic bytes
// for identical inputs and seed.
void write_corpus(const CorpusSplit& split, const std::string& out_dir);

// Reads one record file back, loading utterance audio from the stored paths
// (relative paths resolve against the record file's directory).
std::vector<Utterance> load_episode_records(const std::string& path);

// Manifest rows as written by write_corpus.
struct ManifestRow {
  std::string split;  // train|dev|test
  std::string show;
  int season = 0;
  int episode = 0;
  std::string records_file;
};

std::vector<ManifestRow> load_manifest(const std::string& path);

}  // namespace affect

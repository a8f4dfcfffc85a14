// Command-line entry point: one binary with subcommands for corpus
// construction, training, evaluation, prediction, gradient verification, and
// persona analysis. Jobs are described by `key = value` config files; the
// only flags are paths and --seed. Exit codes: 0 success, 1 usage error,
// 2 invalid input or configuration, 3 failed gradient verification.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "affect/audio.hpp"
#include "affect/checkpoint.hpp"
#include "affect/config.hpp"
#include "affect/corpus.hpp"
#include "affect/emotion.hpp"
#include "affect/errors.hpp"
#include "affect/gradcheck.hpp"
#include "affect/humor.hpp"
#include "affect/persona.hpp"
#include "affect/sentiment.hpp"
#include "affect/text.hpp"
#include "affect/train.hpp"
#include "affect/wav.hpp"

namespace fs = std::filesystem;
using namespace affect;

namespace {

// ---- resolved-config assembly ----------------------------------------------

std::string double_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Resolved {
  std::map<std::string, std::string> kv;

  void put(const std::string& k, const std::string& v) { kv[k] = v; }
  void put_size(const std::string& k, std::size_t v) {
    kv[k] = std::to_string(v);
  }
  void put_u64(const std::string& k, std::uint64_t v) {
    kv[k] = std::to_string(v);
  }
  void put_double(const std::string& k, double v) { kv[k] = double_str(v); }
  void put_bool(const std::string& k, bool v) { kv[k] = v ? "true" : "false"; }
};

// Every job records what it actually ran with: sorted `key = value` lines to
// <out_dir>/resolved_config.txt and the same lines to stdout.
void emit_resolved(const Resolved& r, const std::string& out_dir) {
  echo_resolved_config(r.kv, out_dir);
  std::cout << "resolved configuration:\n";
  for (const auto& [k, v] : r.kv) std::cout << "  " << k << " = " << v << "\n";
}

// ---- small file helpers -------------------------------------------------------

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return lines;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f.good()) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool skippable(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t') return false;
  }
  return true;  // blank
}

int parse_int_field(const std::string& path, std::size_t lineno,
                    const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + " line " + std::to_string(lineno) +
                     ": cannot parse '" + s + "' as an integer");
  }
}

std::string file_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

// ---- shared output ---------------------------------------------------------------

std::string metrics_table(const std::string& label, const Metrics& m) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s%8s%8s%8s%8s\n", "", "A", "P", "R",
                "F1");
  out += line;
  std::snprintf(line, sizeof line, "%-8s%8.1f%8.1f%8.1f%8.1f\n", label.c_str(),
                100.0 * m.accuracy, 100.0 * m.precision, 100.0 * m.recall,
                100.0 * m.f1);
  out += line;
  return out;
}

void write_epoch_log(const std::string& out_dir,
                     const std::vector<EpochRecord>& log) {
  std::string content = "epoch,train_loss,dev_error,elapsed_ms\n";
  for (const EpochRecord& r : log) content += epoch_log_line(r) + "\n";
  write_text((fs::path(out_dir) / "epochs.csv").string(), content);
}

TrainConfig train_config_from(const JobConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.momentum = cfg.get_double("momentum", tc.momentum);
  tc.max_epochs = cfg.get_size("max_epochs", tc.max_epochs);
  tc.patience = cfg.get_size("patience", tc.patience);
  tc.batch_size = cfg.get_size("batch_size", tc.batch_size);
  tc.seed = seed;
  return tc;
}

void put_train_keys(Resolved& r, const TrainConfig& tc) {
  r.put_double("learning_rate", tc.learning_rate);
  r.put_double("momentum", tc.momentum);
  r.put_size("max_epochs", tc.max_epochs);
  r.put_size("patience", tc.patience);
  r.put_size("batch_size", tc.batch_size);
  r.put_u64("seed", tc.seed);
}

// ---- input loaders ------------------------------------------------------------------

// `category<TAB>wav_path`, paths relative to the list file.
struct SegmentRow {
  std::string category;
  std::string wav_path;
  AudioSegment segment;
};

std::vector<SegmentRow> load_segments_file(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  std::vector<SegmentRow> rows;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (skippable(line)) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected 'category<TAB>wav_path'");
    }
    SegmentRow row;
    row.category = fields[0];
    row.wav_path = resolve_path(dir, fields[1]);
    row.segment = load_wav(row.wav_path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError(path + ": no segments listed");
  return rows;
}

// `label<TAB>text[<TAB>wav_path]` with label 0 or 1.
struct SentimentRow {
  bool label = false;
  std::string text;
  std::string wav_path;
};

std::vector<SentimentRow> load_sentiment_file(const std::string& path,
                                              bool need_audio) {
  const std::string dir = fs::path(path).parent_path().string();
  std::vector<SentimentRow> rows;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (skippable(line)) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": expected 'label<TAB>text[<TAB>wav_path]'");
    }
    SentimentRow row;
    if (fields[0] == "1") {
      row.label = true;
    } else if (fields[0] == "0") {
      row.label = false;
    } else {
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": label must be 0 or 1, got '" + fields[0] + "'");
    }
    row.text = fields[1];
    if (fields.size() == 3 && !fields[2].empty()) {
      row.wav_path = resolve_path(dir, fields[2]);
    }
    if (need_audio && row.wav_path.empty()) {
      throw ParseError(path + " line " + std::to_string(lineno) +
                       ": a bichannel model needs a wav_path on every row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInputError(path + ": no utterances listed");
  return rows;
}

std::vector<SentimentExample> sentiment_examples(
    const std::vector<SentimentRow>& rows, const std::string& path,
    bool with_audio) {
  std::vector<SentimentExample> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    SentimentExample ex;
    ex.tokens = tokenize(rows[i].text);
    if (ex.tokens.empty()) {
      throw ParseError(path + ": utterance " + std::to_string(i + 1) +
                       " has no tokens after tokenization");
    }
    ex.label = rows[i].label;
    if (with_audio && !rows[i].wav_path.empty()) {
      ex.audio = load_wav(rows[i].wav_path);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// Episode list for build-corpus:
// `show<TAB>season<TAB>episode<TAB>srt[<TAB>wav[<TAB>laughter_csv]]`.
std::vector<EpisodeInputs> load_episode_list(const std::string& path) {
  const std::string dir = fs::path(path).parent_path().string();
  std::vector<EpisodeInputs> episodes;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    if (skippable(line)) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() < 4 || fields.size() > 6) {
      throw ParseError(
          path + " line " + std::to_string(lineno) +
          ": expected 'show<TAB>season<TAB>episode<TAB>srt[<TAB>wav"
          "[<TAB>laughter_csv]]'");
    }
    EpisodeInputs e;
    e.show = fields[0];
    e.season = parse_int_field(path, lineno, fields[1]);
    e.episode = parse_int_field(path, lineno, fields[2]);
    e.srt_path = resolve_path(dir, fields[3]);
    if (fields.size() >= 5 && !fields[4].empty()) {
      e.wav_path = resolve_path(dir, fields[4]);
    }
    if (fields.size() == 6 && !fields[5].empty()) {
      e.laughter_path = resolve_path(dir, fields[5]);
    }
    episodes.push_back(std::move(e));
  }
  if (episodes.empty()) throw EmptyInputError(path + ": no episodes listed");
  return episodes;
}

// A built corpus loaded back for humor training/eval/predict. Dialogs are
// stored per manifest row; HumorExample windows point into them.
struct LoadedCorpus {
  std::vector<ManifestRow> rows;
  std::vector<std::vector<Utterance>> dialogs;  // parallel to rows
};

LoadedCorpus load_corpus(const std::string& corpus_dir) {
  LoadedCorpus c;
  c.rows = load_manifest((fs::path(corpus_dir) / "manifest.tsv").string());
  c.dialogs.reserve(c.rows.size());
  for (const ManifestRow& row : c.rows) {
    c.dialogs.push_back(load_episode_records(
        (fs::path(corpus_dir) / row.records_file).string()));
  }
  return c;
}

Split<HumorExample> humor_split_examples(const LoadedCorpus& c,
                                         std::size_t k) {
  Split<HumorExample> split;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    std::vector<HumorExample>* bucket = nullptr;
    if (c.rows[i].split == "train") bucket = &split.train;
    else if (c.rows[i].split == "dev") bucket = &split.dev;
    else if (c.rows[i].split == "test") bucket = &split.test;
    else
      throw ParseError("manifest: unknown split '" + c.rows[i].split + "'");
    for (HumorExample& ex : make_humor_examples(c.dialogs[i], k)) {
      bucket->push_back(std::move(ex));
    }
  }
  return split;
}

// Speakers of the train split in first-appearance order.
std::vector<std::string> roster_from_train(const LoadedCorpus& c) {
  std::vector<std::string> roster;
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    if (c.rows[i].split != "train") continue;
    for (const Utterance& u : c.dialogs[i]) {
      if (u.speaker.empty()) continue;
      bool seen = false;
      for (const std::string& r : roster) {
        if (r == u.speaker) { seen = true; break; }
      }
      if (!seen) roster.push_back(u.speaker);
    }
  }
  return roster;
}

HumorVariant variant_from_name(const std::string& name) {
  if (name == "lstm") return HumorVariant::kLstm;
  if (name == "shifted") return HumorVariant::kShifted;
  throw ConfigError("unknown context variant '" + name +
                    "' (expected lstm or shifted)");
}

// ---- build-corpus -----------------------------------------------------------------

const std::vector<std::string> kBuildCorpusKeys = {
    "out_dir", "episodes_file", "seed", "energy_threshold", "min_laugh_s"};

int cmd_build_corpus(const std::string& config_path,
                     std::optional<std::uint64_t> seed_override) {
  const JobConfig cfg = JobConfig::from_file(config_path, kBuildCorpusKeys);
  const std::string out_dir = cfg.get_path("out_dir");
  const std::string episodes_file = cfg.get_path("episodes_file");
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.get_u64("seed", 1);
  BuildOptions opts;
  opts.energy_threshold =
      cfg.get_double("energy_threshold", opts.energy_threshold);
  opts.min_laugh_s = cfg.get_double("min_laugh_s", opts.min_laugh_s);

  Resolved r;
  r.put("out_dir", out_dir);
  r.put("episodes_file", episodes_file);
  r.put_u64("seed", seed);
  r.put_double("energy_threshold", opts.energy_threshold);
  r.put_double("min_laugh_s", opts.min_laugh_s);
  ensure_dir(out_dir);
  emit_resolved(r, out_dir);

  std::vector<EpisodeCorpus> episodes;
  for (const EpisodeInputs& inputs : load_episode_list(episodes_file)) {
    episodes.push_back(build_episode(inputs, opts));
  }
  std::size_t utterances = 0, punchlines = 0;
  for (const EpisodeCorpus& e : episodes) {
    utterances += e.utterances.size();
    for (const Utterance& u : e.utterances) punchlines += u.is_punchline;
  }
  const CorpusSplit split = split_corpus(std::move(episodes), seed);
  write_corpus(split, out_dir);

  char line[256];
  std::snprintf(line, sizeof line,
                "episodes: %zu (train %zu, dev %zu, test %zu)%s\n",
                split.episodes.train.size() + split.episodes.dev.size() +
                    split.episodes.test.size(),
                split.episodes.train.size(), split.episodes.dev.size(),
                split.episodes.test.size(),
                split.best_effort ? " [best-effort split: small season]" : "");
  std::cout << line;
  std::snprintf(line, sizeof line, "utterances: %zu, punchlines: %zu (%.1f%%)\n",
                utterances, punchlines,
                utterances ? 100.0 * double(punchlines) / double(utterances)
                           : 0.0);
  std::cout << line;
  std::cout << "corpus written to " << out_dir << "\n";
  return 0;
}

// ---- train ------------------------------------------------------------------------

const std::vector<std::string> kTrainKeys = {
    // common
    "out_dir", "model", "seed", "learning_rate", "momentum", "max_epochs",
    "patience", "batch_size", "checkpoint_out",
    // emotion
    "segments_file", "category", "window", "step", "hidden", "activation",
    "sample_rate",
    // sentiment
    "train_file", "embeddings_file", "heights", "maps", "bichannel",
    // humor
    "corpus_dir", "k", "variant", "use_audio", "use_speaker", "dropout",
    "lang_hidden", "lang_window", "audio_hidden", "audio_window",
    "lstm_hidden"};

std::vector<std::size_t> parse_height_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size() || v == 0) throw std::invalid_argument("bad");
      out.push_back(std::size_t(v));
    } catch (const std::exception&) {
      throw ConfigError("config key 'heights': cannot parse '" + item +
                        "' as a positive integer");
    }
  }
  if (out.empty()) throw ConfigError("config key 'heights': empty list");
  return out;
}

int train_emotion_job(const JobConfig& cfg, const std::string& out_dir,
                      const TrainConfig& tc, const std::string& ckpt_out,
                      Resolved& r) {
  EmotionCnnConfig ecfg;
  ecfg.window = cfg.get_size("window", ecfg.window);
  ecfg.step = cfg.get_size("step", ecfg.step);
  ecfg.hidden = cfg.get_size("hidden", ecfg.hidden);
  ecfg.activation = act_from_name(cfg.get_or("activation", "relu"));
  ecfg.sample_rate =
      std::uint32_t(cfg.get_size("sample_rate", ecfg.sample_rate));
  const std::string segments_file = cfg.get_path("segments_file");
  const std::string category = cfg.get("category");

  r.put("segments_file", segments_file);
  r.put("category", category);
  r.put_size("window", ecfg.window);
  r.put_size("step", ecfg.step);
  r.put_size("hidden", ecfg.hidden);
  r.put("activation", act_name(ecfg.activation));
  r.put_size("sample_rate", ecfg.sample_rate);
  emit_resolved(r, out_dir);

  std::vector<LabeledSegment> corpus;
  for (SegmentRow& row : load_segments_file(segments_file)) {
    LabeledSegment ls;
    ls.segment = row.segment.sample_rate == ecfg.sample_rate
                     ? std::move(row.segment)
                     : resample(row.segment, ecfg.sample_rate);
    ls.category = row.category;
    corpus.push_back(std::move(ls));
  }
  const Split<EmotionExample> split =
      make_emotion_task(corpus, category, tc.seed);
  std::cout << "emotion '" << category << "': " << split.train.size()
            << " train / " << split.dev.size() << " dev / "
            << split.test.size() << " test examples\n";

  Rng rng(tc.seed);
  EmotionModel model = build_emotion_model(ecfg, category, rng);
  const EmotionTrainOutcome outcome = train_emotion(model, split, tc);
  write_epoch_log(out_dir, outcome.train.log);

  char line[128];
  std::snprintf(line, sizeof line, "best epoch %zu (dev error %.4f)\n",
                outcome.train.best_epoch, outcome.train.best_dev_error);
  std::cout << line;
  const std::string table = metrics_table("test", outcome.test);
  std::cout << table;
  write_text((fs::path(out_dir) / "metrics.txt").string(), table);
  save_checkpoint(ckpt_out, checkpoint_from(model));
  std::cout << "checkpoint written to " << ckpt_out << "\n";
  return 0;
}

int train_sentiment_job(const JobConfig& cfg, const std::string& out_dir,
                        const TrainConfig& tc, const std::string& ckpt_out,
                        Resolved& r) {
  SentimentCnnConfig scfg;
  scfg.heights = parse_height_list(cfg.get_or("heights", "3,4,5"));
  scfg.maps = cfg.get_size("maps", scfg.maps);
  scfg.bichannel = cfg.get_bool("bichannel", scfg.bichannel);
  const std::string train_file = cfg.get_path("train_file");
  const std::string embeddings_file = cfg.get_path("embeddings_file");

  r.put("train_file", train_file);
  r.put("embeddings_file", embeddings_file);
  r.put("heights", cfg.get_or("heights", "3,4,5"));
  r.put_size("maps", scfg.maps);
  r.put_bool("bichannel", scfg.bichannel);
  emit_resolved(r, out_dir);

  const std::vector<SentimentRow> rows =
      load_sentiment_file(train_file, scfg.bichannel);
  std::vector<SentimentExample> examples =
      sentiment_examples(rows, train_file, scfg.bichannel);

  Rng rng(tc.seed);
  const Split<SentimentExample> split =
      split_80_10_10(std::move(examples), rng);
  std::cout << "sentiment: " << split.train.size() << " train / "
            << split.dev.size() << " dev / " << split.test.size()
            << " test utterances\n";

  EmbeddingTable table = load_embeddings(embeddings_file, OovPolicy::kZero);
  std::vector<std::string> extras;
  for (const SentimentExample& ex : split.train) {
    for (const std::string& tok : ex.tokens) {
      if (table.contains(tok)) continue;
      bool seen = false;
      for (const std::string& e : extras) {
        if (e == tok) { seen = true; break; }
      }
      if (!seen) extras.push_back(tok);
    }
  }
  SentimentModel model =
      build_sentiment_model(scfg, std::move(table), extras, rng);
  const SentimentTrainOutcome outcome = train_sentiment(model, split, tc);
  write_epoch_log(out_dir, outcome.train.log);

  char line[128];
  std::snprintf(line, sizeof line, "best epoch %zu (dev error %.4f)\n",
                outcome.train.best_epoch, outcome.train.best_dev_error);
  std::cout << line;
  const std::string table_str = metrics_table("test", outcome.test);
  std::cout << table_str;
  write_text((fs::path(out_dir) / "metrics.txt").string(), table_str);
  save_checkpoint(ckpt_out, checkpoint_from(model));
  std::cout << "checkpoint written to " << ckpt_out << "\n";
  return 0;
}

int train_humor_job(const JobConfig& cfg, const std::string& out_dir,
                    const TrainConfig& tc, const std::string& ckpt_out,
                    Resolved& r) {
  HumorNetConfig hcfg;
  hcfg.k = cfg.get_size("k", hcfg.k);
  hcfg.lang_hidden = cfg.get_size("lang_hidden", hcfg.lang_hidden);
  hcfg.lang_window = cfg.get_size("lang_window", hcfg.lang_window);
  hcfg.audio_hidden = cfg.get_size("audio_hidden", hcfg.audio_hidden);
  hcfg.audio_window = cfg.get_size("audio_window", hcfg.audio_window);
  hcfg.lstm_hidden = cfg.get_size("lstm_hidden", hcfg.lstm_hidden);
  hcfg.dropout = cfg.get_double("dropout", hcfg.dropout);
  hcfg.use_audio = cfg.get_bool("use_audio", hcfg.use_audio);
  hcfg.use_speaker = cfg.get_bool("use_speaker", hcfg.use_speaker);
  const HumorVariant variant =
      variant_from_name(cfg.get_or("variant", "lstm"));
  const std::string corpus_dir = cfg.get_path("corpus_dir");
  const std::string embeddings_file = cfg.get_path("embeddings_file");

  r.put("corpus_dir", corpus_dir);
  r.put("embeddings_file", embeddings_file);
  r.put_size("k", hcfg.k);
  r.put("variant", cfg.get_or("variant", "lstm"));
  r.put_size("lang_hidden", hcfg.lang_hidden);
  r.put_size("lang_window", hcfg.lang_window);
  r.put_size("audio_hidden", hcfg.audio_hidden);
  r.put_size("audio_window", hcfg.audio_window);
  r.put_size("lstm_hidden", hcfg.lstm_hidden);
  r.put_double("dropout", hcfg.dropout);
  r.put_bool("use_audio", hcfg.use_audio);
  r.put_bool("use_speaker", hcfg.use_speaker);
  emit_resolved(r, out_dir);

  const LoadedCorpus corpus = load_corpus(corpus_dir);
  const Split<HumorExample> split = humor_split_examples(corpus, hcfg.k);
  std::cout << "humor: " << split.train.size() << " train / "
            << split.dev.size() << " dev / " << split.test.size()
            << " test windows\n";

  EmbeddingTable table = load_embeddings(embeddings_file, OovPolicy::kHashed);
  Rng rng(tc.seed);
  HumorModel model =
      build_humor_model(hcfg, variant, std::move(table),
                        roster_from_train(corpus), rng, tc.seed);
  const HumorTrainOutcome outcome = train_humor(model, split, tc);
  write_epoch_log(out_dir, outcome.train.log);

  char line[128];
  std::snprintf(line, sizeof line, "best epoch %zu (dev error %.4f)\n",
                outcome.train.best_epoch, outcome.train.best_dev_error);
  std::cout << line;
  const std::string table_str = metrics_table("test", outcome.test);
  std::cout << table_str;
  write_text((fs::path(out_dir) / "metrics.txt").string(), table_str);
  save_checkpoint(ckpt_out, checkpoint_from(model));
  std::cout << "checkpoint written to " << ckpt_out << "\n";
  return 0;
}

int cmd_train(const std::string& config_path,
              std::optional<std::uint64_t> seed_override) {
  const JobConfig cfg = JobConfig::from_file(config_path, kTrainKeys);
  const std::string out_dir = cfg.get_path("out_dir");
  const std::string model_kind = cfg.get("model");
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.get_u64("seed", 1);
  const TrainConfig tc = train_config_from(cfg, seed);
  validate(tc);
  ensure_dir(out_dir);
  const std::string ckpt_out = cfg.get_path_or(
      "checkpoint_out", (fs::path(out_dir) / "model.ckpt").string());

  Resolved r;
  r.put("out_dir", out_dir);
  r.put("model", model_kind);
  r.put("checkpoint_out", ckpt_out);
  put_train_keys(r, tc);

  if (model_kind == "emotion") {
    return train_emotion_job(cfg, out_dir, tc, ckpt_out, r);
  }
  if (model_kind == "sentiment") {
    return train_sentiment_job(cfg, out_dir, tc, ckpt_out, r);
  }
  if (model_kind == "humor") {
    return train_humor_job(cfg, out_dir, tc, ckpt_out, r);
  }
  throw ConfigError("config key 'model': expected emotion, sentiment, or "
                    "humor, got '" +
                    model_kind + "'");
}

// ---- eval -------------------------------------------------------------------------

const std::vector<std::string> kEvalKeys = {
    "out_dir", "checkpoint", "seed",
    "segments_file",   // emotion
    "eval_file",       // sentiment
    "corpus_dir", "split"};  // humor

int cmd_eval(const std::string& config_path,
             std::optional<std::uint64_t> seed_override) {
  const JobConfig cfg = JobConfig::from_file(config_path, kEvalKeys);
  const std::string out_dir = cfg.get_path("out_dir");
  const std::string ckpt_path = cfg.get_path("checkpoint");
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.get_u64("seed", 1);
  ensure_dir(out_dir);

  Resolved r;
  r.put("out_dir", out_dir);
  r.put("checkpoint", ckpt_path);
  r.put_u64("seed", seed);

  const Checkpoint ck = load_checkpoint(ckpt_path);
  Metrics metrics;
  std::string detail;
  if (ck.kind == "emotion") {
    EmotionModel model = emotion_from_checkpoint(ck);
    const std::string segments_file = cfg.get_path("segments_file");
    r.put("segments_file", segments_file);
    emit_resolved(r, out_dir);
    std::vector<EmotionExample> examples;
    for (SegmentRow& row : load_segments_file(segments_file)) {
      EmotionExample ex;
      ex.item = row.segment.sample_rate == model.cfg.sample_rate
                    ? std::move(row.segment)
                    : resample(row.segment, model.cfg.sample_rate);
      ex.label = row.category == model.category;
      examples.push_back(std::move(ex));
    }
    metrics = evaluate(model, examples);
    detail = "emotion '" + model.category + "', " +
             std::to_string(examples.size()) + " segments";
  } else if (ck.kind == "sentiment") {
    SentimentModel model = sentiment_from_checkpoint(ck);
    const std::string eval_file = cfg.get_path("eval_file");
    r.put("eval_file", eval_file);
    emit_resolved(r, out_dir);
    const std::vector<SentimentRow> rows =
        load_sentiment_file(eval_file, model.cfg.bichannel);
    std::vector<SentimentExample> examples =
        sentiment_examples(rows, eval_file, model.cfg.bichannel);
    metrics = evaluate(model, examples);
    detail = "sentiment, " + std::to_string(examples.size()) + " utterances";
  } else if (ck.kind == "humor") {
    HumorModel model = humor_from_checkpoint(ck, seed);
    const std::string corpus_dir = cfg.get_path("corpus_dir");
    const std::string which = cfg.get_or("split", "test");
    r.put("corpus_dir", corpus_dir);
    r.put("split", which);
    emit_resolved(r, out_dir);
    const LoadedCorpus corpus = load_corpus(corpus_dir);
    const Split<HumorExample> split = humor_split_examples(corpus, model.cfg.k);
    const std::vector<HumorExample>* examples = &split.test;
    if (which == "train") examples = &split.train;
    else if (which == "dev") examples = &split.dev;
    else if (which != "test")
      throw ConfigError("config key 'split': expected train, dev, or test");
    metrics = evaluate(model, *examples);
    detail = "humor, " + std::to_string(examples->size()) + " windows (" +
             which + " split)";
  } else {
    throw ParseError("checkpoint holds unknown model kind '" + ck.kind + "'");
  }

  std::cout << "evaluated " << detail << "\n";
  const std::string table = metrics_table("eval", metrics);
  std::cout << table;
  write_text((fs::path(out_dir) / "metrics.txt").string(), table);
  return 0;
}

// ---- predict ----------------------------------------------------------------------

const std::vector<std::string> kPredictKeys = {
    "out_dir", "checkpoint", "seed",
    "wavs_file",       // emotion: one wav path per line
    "texts_file",      // sentiment: text[<TAB>wav_path] per line
    "corpus_dir", "split"};  // humor

int cmd_predict(const std::string& config_path,
                std::optional<std::uint64_t> seed_override) {
  const JobConfig cfg = JobConfig::from_file(config_path, kPredictKeys);
  const std::string out_dir = cfg.get_path("out_dir");
  const std::string ckpt_path = cfg.get_path("checkpoint");
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.get_u64("seed", 1);
  ensure_dir(out_dir);

  Resolved r;
  r.put("out_dir", out_dir);
  r.put("checkpoint", ckpt_path);
  r.put_u64("seed", seed);

  const Checkpoint ck = load_checkpoint(ckpt_path);
  std::string csv;
  std::size_t n = 0;
  char line[512];
  if (ck.kind == "emotion") {
    EmotionModel model = emotion_from_checkpoint(ck);
    const std::string wavs_file = cfg.get_path("wavs_file");
    r.put("wavs_file", wavs_file);
    emit_resolved(r, out_dir);
    const std::string dir = fs::path(wavs_file).parent_path().string();
    csv = "segment_id,category,probability,label\n";
    for (const std::string& raw : read_lines(wavs_file)) {
      if (skippable(raw)) continue;
      const std::string path = resolve_path(dir, raw);
      const AudioSegment seg = load_wav(path);
      const double p = predict_emotion(model, seg);
      std::snprintf(line, sizeof line, "%s,%s,%.6f,%d\n",
                    file_stem(path).c_str(), model.category.c_str(), p,
                    p >= 0.5 ? 1 : 0);
      csv += line;
      ++n;
    }
  } else if (ck.kind == "sentiment") {
    SentimentModel model = sentiment_from_checkpoint(ck);
    const std::string texts_file = cfg.get_path("texts_file");
    r.put("texts_file", texts_file);
    emit_resolved(r, out_dir);
    const std::string dir = fs::path(texts_file).parent_path().string();
    csv = "utterance_id,probability_positive\n";
    std::size_t id = 0;
    for (const std::string& raw : read_lines(texts_file)) {
      if (skippable(raw)) continue;
      ++id;
      const std::vector<std::string> fields = split_tabs(raw);
      const std::vector<std::string> tokens = tokenize(fields[0]);
      if (tokens.empty()) {
        throw ParseError(texts_file + ": utterance " + std::to_string(id) +
                         " has no tokens after tokenization");
      }
      double p = 0.0;
      if (model.cfg.bichannel) {
        if (fields.size() < 2 || fields[1].empty()) {
          throw ParseError(texts_file + ": utterance " + std::to_string(id) +
                           ": a bichannel model needs a wav_path column");
        }
        const AudioSegment seg = load_wav(resolve_path(dir, fields[1]));
        p = classify_sentiment_bichannel(model, tokens, seg);
      } else {
        p = classify_sentiment(model, tokens);
      }
      std::snprintf(line, sizeof line, "%zu,%.6f\n", id, p);
      csv += line;
      ++n;
    }
  } else if (ck.kind == "humor") {
    HumorModel model = humor_from_checkpoint(ck, seed);
    const std::string corpus_dir = cfg.get_path("corpus_dir");
    const std::string which = cfg.get_or("split", "test");
    r.put("corpus_dir", corpus_dir);
    r.put("split", which);
    emit_resolved(r, out_dir);
    if (which != "train" && which != "dev" && which != "test") {
      throw ConfigError("config key 'split': expected train, dev, or test");
    }
    const LoadedCorpus corpus = load_corpus(corpus_dir);
    csv = "episode,utterance_index,probability,label\n";
    for (std::size_t i = 0; i < corpus.rows.size(); ++i) {
      if (corpus.rows[i].split != which) continue;
      const std::string episode_id = file_stem(corpus.rows[i].records_file);
      for (const HumorExample& ex :
           make_humor_examples(corpus.dialogs[i], model.cfg.k)) {
        const double p = model.predict_positive(ex);
        std::snprintf(line, sizeof line, "%s,%zu,%.6f,%d\n",
                      episode_id.c_str(), ex.window.back()->index, p,
                      p >= 0.5 ? 1 : 0);
        csv += line;
        ++n;
      }
    }
  } else {
    throw ParseError("checkpoint holds unknown model kind '" + ck.kind + "'");
  }

  const std::string csv_path = (fs::path(out_dir) / "predictions.csv").string();
  write_text(csv_path, csv);
  std::cout << "wrote " << n << " predictions to " << csv_path << "\n";
  return 0;
}

// ---- gradcheck --------------------------------------------------------------------

const std::vector<std::string> kGradcheckKeys = {
    "out_dir", "epsilon", "threshold", "inject_fault", "seed"};

int cmd_gradcheck(const std::string& config_path,
                  std::optional<std::uint64_t> seed_override) {
  GradCheckOptions opt;
  std::string out_dir;
  std::uint64_t seed = 1;
  if (!config_path.empty()) {
    const JobConfig cfg = JobConfig::from_file(config_path, kGradcheckKeys);
    opt.epsilon = cfg.get_double("epsilon", opt.epsilon);
    opt.threshold = cfg.get_double("threshold", opt.threshold);
    opt.inject_fault = cfg.get_or("inject_fault", opt.inject_fault);
    out_dir = cfg.get_path_or("out_dir", "");
    seed = cfg.get_u64("seed", seed);
  }
  if (seed_override) seed = *seed_override;

  if (!out_dir.empty()) {
    Resolved r;
    r.put("out_dir", out_dir);
    r.put_double("epsilon", opt.epsilon);
    r.put_double("threshold", opt.threshold);
    r.put("inject_fault", opt.inject_fault);
    r.put_u64("seed", seed);
    ensure_dir(out_dir);
    emit_resolved(r, out_dir);
  }

  const GradCheckReport report = run_gradcheck(opt);
  const std::string rendered = report.render();
  std::cout << rendered;
  if (!out_dir.empty()) {
    write_text((fs::path(out_dir) / "gradcheck.txt").string(), rendered);
  }
  return report.pass ? 0 : 3;
}

// ---- persona ----------------------------------------------------------------------

const std::vector<std::string> kPersonaKeys = {
    "out_dir", "responses_file", "lexicons_dir", "weights_file", "seed"};

int cmd_persona(const std::string& config_path,
                std::optional<std::uint64_t> seed_override) {
  const JobConfig cfg = JobConfig::from_file(config_path, kPersonaKeys);
  const std::string out_dir = cfg.get_path("out_dir");
  const std::string responses_file = cfg.get_path("responses_file");
  const std::string lexicons_dir = cfg.get_path("lexicons_dir");
  const std::string weights_file = cfg.get_path_or("weights_file", "");
  const std::uint64_t seed =
      seed_override ? *seed_override : cfg.get_u64("seed", 1);
  ensure_dir(out_dir);

  Resolved r;
  r.put("out_dir", out_dir);
  r.put("responses_file", responses_file);
  r.put("lexicons_dir", lexicons_dir);
  r.put("weights_file", weights_file.empty() ? "(defaults)" : weights_file);
  r.put_u64("seed", seed);
  emit_resolved(r, out_dir);

  const CueLexicons lex = load_cue_lexicons(lexicons_dir);
  const MbtiWeights weights = weights_file.empty()
                                  ? default_mbti_weights()
                                  : load_mbti_weights(weights_file);
  const std::string dir = fs::path(responses_file).parent_path().string();

  std::string report;
  char line[512];
  std::vector<std::array<double, 4>> scores;
  std::size_t challenges = 0;
  std::size_t id = 0;
  for (const std::string& raw : read_lines(responses_file)) {
    if (skippable(raw)) continue;
    ++id;
    const std::vector<std::string> fields = split_tabs(raw);
    const std::string& text = fields[0];

    SpeechCueInput audio_in;
    const SpeechCueInput* audio = nullptr;
    if (fields.size() >= 2 && !fields[1].empty()) {
      const AudioSegment seg = load_wav(resolve_path(dir, fields[1]));
      audio_in.duration_s = seg.duration_s();
      audio_in.frames = frame_features(seg);
      audio = &audio_in;
    }

    const ChallengeLabel label = classify_challenge(text);
    if (label != ChallengeLabel::kNone) ++challenges;
    const CueVector cues = extract_cues(text, audio, lex);
    const std::array<double, 4> s = score_all_dimensions(cues, weights);
    scores.push_back(s);
    std::snprintf(line, sizeof line,
                  "response %zu: challenge=%s e_i=%+.3f n_s=%+.3f t_f=%+.3f "
                  "j_p=%+.3f\n",
                  id, challenge_label_name(label).c_str(), s[0], s[1], s[2],
                  s[3]);
    report += line;
  }
  if (id == 0) throw EmptyInputError(responses_file + ": no responses listed");

  const MbtiScore mbti = aggregate_personality(scores);
  std::snprintf(line, sizeof line, "responses: %zu, challenges: %zu (rate %.3f)\n",
                id, challenges, double(challenges) / double(id));
  report += line;
  std::snprintf(line, sizeof line,
                "personality: %s (e_i=%+.3f n_s=%+.3f t_f=%+.3f j_p=%+.3f)%s\n",
                mbti.type.c_str(), mbti.e_i, mbti.n_s, mbti.t_f, mbti.j_p,
                mbti.low_confidence ? " [low confidence]" : "");
  report += line;

  std::cout << report;
  write_text((fs::path(out_dir) / "report.txt").string(), report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "affect — conversational affect models: laughter-aligned corpus "
      "construction, emotion/sentiment/punchline training and inference, "
      "gradient verification, and persona analysis"};
  app.require_subcommand(1);

  struct SubSpec {
    std::string config;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::App* sub = nullptr;
  };
  std::map<std::string, SubSpec> specs;
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"build-corpus",
       "Build a laughter-aligned dialog corpus from subtitle/audio episodes"},
      {"train", "Train an emotion, sentiment, or humor model"},
      {"eval", "Evaluate a checkpoint and print accuracy/P/R/F1"},
      {"predict", "Write per-item probabilities for a checkpoint"},
      {"gradcheck",
       "Verify tape gradients against finite differences (exit 3 on failure)"},
      {"persona", "Challenge classification and personality profile report"},
  };
  for (const auto& [name, desc] : subs) {
    SubSpec& spec = specs[name];
    spec.sub = app.add_subcommand(name, desc);
    CLI::Option* cfg_opt =
        spec.sub->add_option("config", spec.config, "Job config file path");
    if (name != "gradcheck") cfg_opt->required();
    spec.seed_opt = spec.sub->add_option(
        "--seed", spec.seed, "Override the config's random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 1;
  }

  try {
    for (auto& [name, spec] : specs) {
      if (!spec.sub->parsed()) continue;
      std::optional<std::uint64_t> seed;
      if (spec.seed_opt->count() > 0) seed = spec.seed;
      if (name == "build-corpus") return cmd_build_corpus(spec.config, seed);
      if (name == "train") return cmd_train(spec.config, seed);
      if (name == "eval") return cmd_eval(spec.config, seed);
      if (name == "predict") return cmd_predict(spec.config, seed);
      if (name == "gradcheck") return cmd_gradcheck(spec.config, seed);
      if (name == "persona") return cmd_persona(spec.config, seed);
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

#include "affect/humor.hpp"

#include <algorithm>

#include "affect/errors.hpp"

namespace affect {

void validate(const HumorNetConfig& cfg) {
  if (cfg.lang_hidden == 0 || cfg.lang_window == 0 || cfg.audio_hidden == 0 ||
      cfg.audio_window == 0 || cfg.lstm_hidden == 0) {
    throw ConfigError("humor: all layer sizes must be >= 1");
  }
  if (cfg.k == 0) throw ConfigError("humor: context window k must be >= 1");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) {
    throw ConfigError("humor: dropout must lie in [0, 1)");
  }
}

Tensor ExtraFeatures::to_tensor() const {
  Tensor out = Tensor::zeros(
      {2 + length_deltas.size() + speaker_onehot.size() + 1});
  std::size_t at = 0;
  out.data[at++] = avg_word_length;
  out.data[at++] = sentence_length;
  for (double d : length_deltas) out.data[at++] = d;
  for (double s : speaker_onehot) out.data[at++] = s;
  out.data[at++] = speaking_rate;
  return out;
}

ExtraFeatures extra_features(const Utterance& u,
                             const std::vector<const Utterance*>& history,
                             const std::vector<std::string>& roster,
                             std::size_t k, bool use_speaker) {
  if (k == 0) throw ConfigError("extra_features: k must be >= 1");
  ExtraFeatures f;
  const double n_tokens = static_cast<double>(u.tokens.size());
  std::size_t chars = 0;
  for (const std::string& t : u.tokens) chars += t.size();
  f.avg_word_length =
      u.tokens.empty() ? 0.0 : static_cast<double>(chars) / n_tokens;
  f.sentence_length = n_tokens;

  f.length_deltas.assign(k - 1, 0.0);
  for (std::size_t i = 0; i < k - 1; ++i) {
    // nearest previous utterance first
    if (i < history.size()) {
      const Utterance* prev = history[history.size() - 1 - i];
      if (prev != nullptr) {
        f.length_deltas[i] =
            n_tokens - static_cast<double>(prev->tokens.size());
      }
    }
  }

  if (use_speaker) {
    f.speaker_onehot.assign(roster.size() + 1, 0.0);
    std::size_t slot = roster.size();  // OOV slot
    for (std::size_t i = 0; i < roster.size(); ++i) {
      if (roster[i] == u.speaker) {
        slot = i;
        break;
      }
    }
    f.speaker_onehot[slot] = 1.0;
  }

  const double duration = u.end_s - u.start_s;
  f.speaking_rate = u.tokens.empty() ? 0.0 : duration / n_tokens;
  return f;
}

NodePtr encode_language_node(const NgramConv& cnn,
                             const std::vector<std::string>& tokens,
                             const EmbeddingTable& table) {
  const NodePtr x = make_const(embed_sentence(table, tokens, cnn.h));
  return g_maxpool_rows(ngram_node(cnn, x));
}

Tensor encode_language(const NgramConv& cnn,
                       const std::vector<std::string>& tokens,
                       const EmbeddingTable& table) {
  return encode_language_node(cnn, tokens, table)->value;
}

NodePtr encode_audio_node(const AudioEncoder& enc, const AudioSegment& seg,
                          const Normalizer* norm) {
  std::vector<Tensor> frames = frame_features(seg);
  if (norm != nullptr) {
    for (Tensor& f : frames) f = norm->apply(f);
  }
  const std::size_t d = frames.front().numel();
  Tensor x = Tensor::zeros({std::max(frames.size(), enc.conv.h), d});
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t j = 0; j < d; ++j) x(t, j) = frames[t].data[j];
  }
  const NodePtr frames_node = make_const(std::move(x));
  const NodePtr h1 =
      g_rowwise_affine(enc.emb1.W, enc.emb1.b, frames_node, enc.emb1.f);
  const NodePtr h2 = g_rowwise_affine(enc.emb2.W, enc.emb2.b, h1, enc.emb2.f);
  return g_maxpool_rows(ngram_node(enc.conv, h2));
}

Tensor encode_audio(const AudioEncoder& enc, const AudioSegment& seg,
                    const Normalizer* norm) {
  return encode_audio_node(enc, seg, norm)->value;
}

HumorModel build_humor_model(const HumorNetConfig& cfg, HumorVariant variant,
                             EmbeddingTable table,
                             std::vector<std::string> roster, Rng& rng,
                             std::uint64_t dropout_seed) {
  validate(cfg);
  if (table.dim == 0) throw ConfigError("humor: embedding table has dimension 0");
  HumorModel m;
  m.cfg = cfg;
  m.variant = variant;
  m.table = std::move(table);
  m.table.oov = OovPolicy::kHashed;
  m.roster = std::move(roster);
  m.dropout_rng = Rng(dropout_seed);

  m.lang_conv = make_ngram_conv(cfg.lang_hidden, m.table.dim, cfg.lang_window,
                                cfg.lang_act, rng, "humor.lang_conv");
  if (cfg.use_audio) {
    m.audio_enc.emb1 = make_embedding_layer(cfg.audio_hidden, kFrameFeatureDim,
                                            cfg.audio_act, rng,
                                            "humor.audio_emb1");
    m.audio_enc.emb2 = make_embedding_layer(
        cfg.audio_hidden, cfg.audio_hidden, cfg.audio_act, rng,
        "humor.audio_emb2");
    m.audio_enc.conv =
        make_ngram_conv(cfg.audio_hidden, cfg.audio_hidden, cfg.audio_window,
                        cfg.audio_act, rng, "humor.audio_conv");
  }
  if (cfg.k > 1) {
    if (variant == HumorVariant::kLstm) {
      m.lstm = make_lstm_cell(cfg.lstm_hidden, cfg.lang_hidden, rng,
                              "humor.lstm");
    }
    Tensor s = Tensor::zeros({cfg.lang_hidden});
    for (double& v : s.data) v = rng.next_uniform(-0.05, 0.05);
    m.sentinel = make_param(std::move(s), "humor.sentinel");
  }

  const std::size_t context_dim =
      cfg.k == 1 ? cfg.lang_hidden
                 : (variant == HumorVariant::kLstm ? cfg.lstm_hidden
                                                   : cfg.k * cfg.lang_hidden);
  std::size_t head_in = context_dim;
  if (cfg.use_audio) head_in += cfg.audio_hidden;
  head_in += 2 + (cfg.k - 1) + 1;  // avg word length, length, deltas, rate
  if (cfg.use_speaker) head_in += m.roster.size() + 1;
  m.head = make_dense_head(2, head_in, rng, "humor.head");
  return m;
}

std::vector<NodePtr> HumorModel::params() const {
  std::vector<NodePtr> out;
  out.push_back(lang_conv.W);
  out.push_back(lang_conv.b);
  if (cfg.use_audio) {
    for (const NodePtr& p :
         {audio_enc.emb1.W, audio_enc.emb1.b, audio_enc.emb2.W,
          audio_enc.emb2.b, audio_enc.conv.W, audio_enc.conv.b}) {
      out.push_back(p);
    }
  }
  if (cfg.k > 1 && variant == HumorVariant::kLstm) {
    for (const NodePtr& p : lstm.params()) out.push_back(p);
  }
  if (sentinel) out.push_back(sentinel);
  out.push_back(head.W);
  out.push_back(head.b);
  return out;
}

namespace {

void check_window(const HumorModel& m,
                  const std::vector<const Utterance*>& window) {
  if (window.size() != m.cfg.k) {
    throw ConfigError("humor: window length " +
                      std::to_string(window.size()) + " != configured k " +
                      std::to_string(m.cfg.k));
  }
  if (window.back() == nullptr) {
    throw ConfigError("humor: the classified (last) slot cannot be padding");
  }
}

NodePtr slot_encoding(HumorModel& m, const Utterance* u) {
  if (u == nullptr || u->tokens.empty()) return m.sentinel;
  return encode_language_node(m.lang_conv, u->tokens, m.table);
}

NodePtr punchline_probs(HumorModel& m,
                        const std::vector<const Utterance*>& window,
                        bool training) {
  check_window(m, window);
  const Utterance& last = *window.back();
  if (last.tokens.empty()) {
    throw EmptyInputError("humor: last utterance has no tokens");
  }

  NodePtr context;
  if (m.cfg.k == 1) {
    context = encode_language_node(m.lang_conv, last.tokens, m.table);
  } else if (m.variant == HumorVariant::kLstm) {
    LstmState state{make_const(Tensor::zeros({m.cfg.lstm_hidden})),
                    make_const(Tensor::zeros({m.cfg.lstm_hidden}))};
    for (const Utterance* u : window) {
      state = lstm_step_node(m.lstm, slot_encoding(m, u), state);
    }
    context = state.h;
  } else {
    std::vector<NodePtr> encodings;
    encodings.reserve(m.cfg.k);
    for (const Utterance* u : window) encodings.push_back(slot_encoding(m, u));
    context = g_concat(encodings);
  }

  std::vector<NodePtr> parts = {context};
  if (m.cfg.use_audio) {
    if (last.audio_usable && !last.audio.samples.empty()) {
      parts.push_back(encode_audio_node(
          m.audio_enc, last.audio, m.frame_norm_ready ? &m.frame_norm : nullptr));
    } else {
      parts.push_back(make_const(Tensor::zeros({m.cfg.audio_hidden})));
    }
  }

  std::vector<const Utterance*> history(window.begin(), window.end() - 1);
  Tensor extras =
      extra_features(last, history, m.roster, m.cfg.k, m.cfg.use_speaker)
          .to_tensor();
  if (m.extras_norm_ready) extras = m.extras_norm.apply(extras);
  parts.push_back(make_const(std::move(extras)));

  NodePtr features = g_concat(parts);
  if (training && m.cfg.dropout > 0.0) {
    const DropoutSpec spec{m.cfg.dropout, DropoutMode::kTrain};
    features = g_dropout(
        features, dropout_mask(spec, features->value.shape, m.dropout_rng));
  }
  return g_softmax(head_logits(m.head, features));
}

}  // namespace

NodePtr HumorModel::loss_forward(const HumorExample& ex) {
  return g_cross_entropy(punchline_probs(*this, ex.window, true),
                         ex.label ? 1 : 0);
}

double HumorModel::predict_positive(const HumorExample& ex) {
  return punchline_probs(*this, ex.window, false)->value.data[1];
}

double classify_punchline(HumorModel& model,
                          const std::vector<const Utterance*>& window) {
  if (model.variant != HumorVariant::kLstm) {
    throw ConfigError("humor: model was built as the shifted variant");
  }
  return punchline_probs(model, window, false)->value.data[1];
}

double classify_punchline_shifted(HumorModel& model,
                                  const std::vector<const Utterance*>& window) {
  if (model.variant != HumorVariant::kShifted) {
    throw ConfigError("humor: model was built as the LSTM variant");
  }
  return punchline_probs(model, window, false)->value.data[1];
}

std::vector<const Utterance*> context_window(
    const std::vector<Utterance>& dialog, std::size_t t, std::size_t k) {
  if (t >= dialog.size()) {
    throw IndexError("context_window: utterance " + std::to_string(t) +
                     " out of range for dialog of " +
                     std::to_string(dialog.size()));
  }
  std::vector<const Utterance*> window(k, nullptr);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t back = k - 1 - i;
    if (t >= back) {
      const Utterance& u = dialog[t - back];
      if (!u.tokens.empty() || back == 0) window[i] = &u;
    }
  }
  return window;
}

std::vector<HumorExample> make_humor_examples(
    const std::vector<Utterance>& dialog, std::size_t k) {
  std::vector<HumorExample> out;
  for (std::size_t t = 0; t < dialog.size(); ++t) {
    if (dialog[t].tokens.empty()) continue;  // non-speech turn
    out.push_back({context_window(dialog, t, k), dialog[t].is_punchline});
  }
  return out;
}

HumorTrainOutcome train_humor(HumorModel& model,
                              const Split<HumorExample>& split,
                              const TrainConfig& tc) {
  if (model.cfg.use_audio) {
    std::vector<Tensor> all_frames;
    for (const HumorExample& ex : split.train) {
      const Utterance& last = *ex.window.back();
      if (!last.audio_usable || last.audio.samples.empty()) continue;
      for (Tensor& f : frame_features(last.audio)) {
        all_frames.push_back(std::move(f));
      }
    }
    if (all_frames.size() >= 2) {
      model.frame_norm = fit_normalizer(all_frames);
      model.frame_norm_ready = true;
    }
  }
  {
    std::vector<Tensor> all_extras;
    for (const HumorExample& ex : split.train) {
      std::vector<const Utterance*> history(ex.window.begin(),
                                            ex.window.end() - 1);
      all_extras.push_back(extra_features(*ex.window.back(), history,
                                          model.roster, model.cfg.k,
                                          model.cfg.use_speaker)
                               .to_tensor());
    }
    if (all_extras.size() >= 2) {
      model.extras_norm = fit_normalizer(all_extras);
      model.extras_norm_ready = true;
    }
  }
  HumorTrainOutcome outcome;
  outcome.train = train(model, split, tc);
  outcome.test = split.test.empty() ? Metrics{} : evaluate(model, split.test);
  return outcome;
}

CrossCorpusReport evaluate_cross_corpus(
    HumorModel& model, const std::vector<HumorExample>& test,
    const std::string& test_corpus,
    const std::vector<std::string>& train_corpora) {
  if (model.cfg.use_speaker) {
    throw ConfigError(
        "humor: cross-corpus evaluation requires the speaker feature "
        "disabled");
  }
  CrossCorpusReport report;
  report.metrics = evaluate(model, test);
  report.self_evaluation =
      std::find(train_corpora.begin(), train_corpora.end(), test_corpus) !=
      train_corpora.end();
  return report;
}

double punchline_within(const std::vector<Utterance>& dialog,
                        std::size_t gap) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < dialog.size(); ++i) {
    if (dialog[i].is_punchline) positions.push_back(i);
  }
  if (positions.size() < 2) return 0.0;
  std::size_t close = 0;
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] - positions[i - 1] <= gap) ++close;
  }
  return static_cast<double>(close) /
         static_cast<double>(positions.size() - 1);
}

}  // namespace affect

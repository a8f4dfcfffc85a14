#include "affect/sentiment.hpp"

#include <algorithm>

#include "affect/errors.hpp"

namespace affect {
namespace {

std::size_t max_height(const SentimentCnnConfig& cfg) {
  return *std::max_element(cfg.heights.begin(), cfg.heights.end());
}

// Fine-tuned channel sentence matrix: in-vocabulary tokens are rows of the
// trainable matrix, unseen tokens become hash-seeded constants, and zero rows
// pad the sentence up to the largest filter height.
NodePtr ft_sentence_matrix(const SentimentModel& m,
                           const std::vector<std::string>& tokens) {
  const std::size_t d = m.static_table.dim;
  const std::size_t rows = std::max(tokens.size(), max_height(m.cfg));
  std::vector<NodePtr> row_nodes;
  row_nodes.reserve(rows);
  for (const std::string& token : tokens) {
    const auto it = m.ft_index.find(token);
    if (it != m.ft_index.end()) {
      row_nodes.push_back(g_row(m.ft_matrix, it->second));
    } else {
      row_nodes.push_back(make_const(hashed_vector(token, d)));
    }
  }
  if (row_nodes.size() < rows) {
    const NodePtr zero = make_const(Tensor::zeros({d}));
    while (row_nodes.size() < rows) row_nodes.push_back(zero);
  }
  return g_stack_rows(row_nodes);
}

void pooled_channel(const std::vector<NgramConv>& convs, const NodePtr& X,
                    std::vector<NodePtr>& out) {
  for (const NgramConv& conv : convs) {
    out.push_back(g_maxpool_rows(ngram_node(conv, X)));
  }
}

NodePtr audio_channel(const SentimentModel& m, const AudioSegment& seg) {
  std::vector<Tensor> frames = frame_features(seg);
  if (m.frame_norm_ready) {
    for (Tensor& f : frames) f = m.frame_norm.apply(f);
  }
  const std::size_t d = frames.front().numel();
  Tensor x = Tensor::zeros({std::max(frames.size(), m.audio_conv.h), d});
  for (std::size_t t = 0; t < frames.size(); ++t) {
    for (std::size_t j = 0; j < d; ++j) x(t, j) = frames[t].data[j];
  }
  return g_maxpool_rows(ngram_node(m.audio_conv, make_const(std::move(x))));
}

NodePtr sentiment_probs(SentimentModel& m,
                        const std::vector<std::string>& tokens,
                        const AudioSegment* seg) {
  if (tokens.empty()) throw EmptyInputError("sentiment: empty sentence");
  const NodePtr static_x =
      make_const(embed_sentence(m.static_table, tokens, max_height(m.cfg)));
  std::vector<NodePtr> pooled;
  pooled.reserve(2 * m.cfg.heights.size() + 1);
  pooled_channel(m.static_convs, static_x, pooled);
  pooled_channel(m.ft_convs, ft_sentence_matrix(m, tokens), pooled);
  if (seg != nullptr) pooled.push_back(audio_channel(m, *seg));
  return g_softmax(head_logits(m.head, g_concat(pooled)));
}

}  // namespace

void validate(const SentimentCnnConfig& cfg) {
  if (cfg.heights.empty()) {
    throw ConfigError("sentiment: at least one filter height required");
  }
  for (std::size_t h : cfg.heights) {
    if (h == 0) throw ConfigError("sentiment: filter heights must be >= 1");
  }
  if (cfg.maps == 0) throw ConfigError("sentiment: maps per height must be >= 1");
}

SentimentModel build_sentiment_model(const SentimentCnnConfig& cfg,
                                     EmbeddingTable static_table,
                                     const std::vector<std::string>& extra_vocab,
                                     Rng& rng) {
  validate(cfg);
  if (static_table.dim == 0) {
    throw ConfigError("sentiment: embedding table has dimension 0");
  }
  SentimentModel m;
  m.cfg = cfg;
  m.static_table = std::move(static_table);
  m.static_table.oov = OovPolicy::kZero;

  m.ft_tokens = m.static_table.tokens;
  for (const std::string& t : m.ft_tokens) {
    m.ft_index.emplace(t, m.ft_index.size());
  }
  for (const std::string& t : extra_vocab) {
    if (m.ft_index.count(t)) continue;
    m.ft_index.emplace(t, m.ft_tokens.size());
    m.ft_tokens.push_back(t);
  }

  const std::size_t d = m.static_table.dim;
  Tensor ft = Tensor::zeros({m.ft_tokens.size(), d});
  for (std::size_t i = 0; i < m.ft_tokens.size(); ++i) {
    const Tensor row = i < m.static_table.vectors.size()
                           ? m.static_table.vectors[i]
                           : hashed_vector(m.ft_tokens[i], d);
    for (std::size_t j = 0; j < d; ++j) ft(i, j) = row.data[j];
  }
  m.ft_matrix = make_param(std::move(ft), "sentiment.ft_matrix");

  for (std::size_t h : cfg.heights) {
    const std::string tag = std::to_string(h);
    m.static_convs.push_back(make_ngram_conv(cfg.maps, d, h, Act::kTanh, rng,
                                             "sentiment.static_conv" + tag));
    m.ft_convs.push_back(make_ngram_conv(cfg.maps, d, h, Act::kTanh, rng,
                                         "sentiment.ft_conv" + tag));
  }
  std::size_t head_in = 2 * cfg.heights.size() * cfg.maps;
  if (cfg.bichannel) {
    m.audio_conv = make_ngram_conv(cfg.maps, kFrameFeatureDim, 3, Act::kRelu,
                                   rng, "sentiment.audio_conv");
    head_in += cfg.maps;
  }
  m.head = make_dense_head(2, head_in, rng, "sentiment.head");
  return m;
}

std::vector<NodePtr> SentimentModel::params() const {
  std::vector<NodePtr> out = {ft_matrix};
  for (const NgramConv& c : static_convs) {
    out.push_back(c.W);
    out.push_back(c.b);
  }
  for (const NgramConv& c : ft_convs) {
    out.push_back(c.W);
    out.push_back(c.b);
  }
  if (cfg.bichannel) {
    out.push_back(audio_conv.W);
    out.push_back(audio_conv.b);
  }
  out.push_back(head.W);
  out.push_back(head.b);
  return out;
}

NodePtr SentimentModel::loss_forward(const SentimentExample& ex) {
  if (cfg.bichannel && (ex.tokens.empty() || ex.audio.samples.empty())) {
    throw ConfigError("sentiment: bichannel example needs text and audio");
  }
  const AudioSegment* seg = cfg.bichannel ? &ex.audio : nullptr;
  return g_cross_entropy(sentiment_probs(*this, ex.tokens, seg),
                         ex.label ? 1 : 0);
}

double SentimentModel::predict_positive(const SentimentExample& ex) {
  if (cfg.bichannel && (ex.tokens.empty() || ex.audio.samples.empty())) {
    throw ConfigError("sentiment: bichannel example needs text and audio");
  }
  const AudioSegment* seg = cfg.bichannel ? &ex.audio : nullptr;
  return sentiment_probs(*this, ex.tokens, seg)->value.data[1];
}

double classify_sentiment(SentimentModel& model,
                          const std::vector<std::string>& tokens) {
  if (model.cfg.bichannel) {
    throw ConfigError("sentiment: bichannel model requires audio input");
  }
  return sentiment_probs(model, tokens, nullptr)->value.data[1];
}

double classify_sentiment_bichannel(SentimentModel& model,
                                    const std::vector<std::string>& tokens,
                                    const AudioSegment& seg) {
  if (!model.cfg.bichannel) {
    throw ConfigError("sentiment: model was built without an audio channel");
  }
  if (tokens.empty() || seg.samples.empty()) {
    throw ConfigError("sentiment: bichannel classification needs text and audio");
  }
  return sentiment_probs(model, tokens, &seg)->value.data[1];
}

SentimentTrainOutcome train_sentiment(SentimentModel& model,
                                      const Split<SentimentExample>& split,
                                      const TrainConfig& tc) {
  if (model.cfg.bichannel) {
    std::vector<Tensor> all_frames;
    for (const SentimentExample& ex : split.train) {
      if (ex.audio.samples.empty()) {
        throw ConfigError("sentiment: bichannel training example without audio");
      }
      for (Tensor& f : frame_features(ex.audio)) {
        all_frames.push_back(std::move(f));
      }
    }
    model.frame_norm = fit_normalizer(all_frames);
    model.frame_norm_ready = true;
  }
  SentimentTrainOutcome outcome;
  outcome.train = train(model, split, tc);
  outcome.test = split.test.empty() ? Metrics{} : evaluate(model, split.test);
  return outcome;
}

double lexicon_polarity(const std::vector<std::string>& tokens,
                        const std::unordered_set<std::string>& positive,
                        const std::unordered_set<std::string>& negative) {
  double pos = 0.0, neg = 0.0;
  for (const std::string& t : tokens) {
    if (positive.count(t)) pos += 1.0;
    if (negative.count(t)) neg += 1.0;
  }
  return (pos - neg) / std::max(pos + neg, 1.0);
}

}  // namespace affect

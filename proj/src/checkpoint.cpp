#include "affect/checkpoint.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <utility>

#include "affect/errors.hpp"

namespace affect {

namespace {

constexpr char kMagic[8] = {'A', 'F', 'F', 'E', 'C', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

// ---- little-endian encoding over a byte buffer -----------------------------

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof bits);
  put_u64(out, bits);
}

void put_string(std::string& out, const std::string& s) {
  if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("checkpoint: string too long to serialize");
  }
  put_u32(out, std::uint32_t(s.size()));
  out.append(s);
}

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (buf.size() - pos < n) throw ParseError("checkpoint: truncated file");
  }
  std::uint32_t take_u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t(std::uint8_t(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::uint64_t take_u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= std::uint64_t(std::uint8_t(buf[pos + i])) << (8 * i);
    }
    pos += 8;
    return v;
  }
  double take_f64() {
    const std::uint64_t bits = take_u64();
    double v = 0.0;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string take_string() {
    const std::uint32_t n = take_u32();
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

// ---- hyperparameter value formatting ---------------------------------------

std::string double_string(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("checkpoint hyperparameter '" + key +
                     "': cannot parse '" + s + "' as a number");
  }
}

std::size_t parse_size(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return std::size_t(v);
  } catch (const std::exception&) {
    throw ParseError("checkpoint hyperparameter '" + key +
                     "': cannot parse '" + s + "' as an integer");
  }
}

std::string heights_string(const std::vector<std::size_t>& heights) {
  std::string out;
  for (std::size_t h : heights) {
    if (!out.empty()) out.push_back(',');
    out += std::to_string(h);
  }
  return out;
}

std::vector<std::size_t> parse_heights(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item =
        s.substr(start, comma == std::string::npos ? comma : comma - start);
    out.push_back(parse_size("heights", item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// ---- tensor <-> serialized form ---------------------------------------------

void put_tensor(std::string& out, const Tensor& t) {
  if (t.shape.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ConfigError("checkpoint: tensor rank too large");
  }
  put_u32(out, std::uint32_t(t.shape.size()));
  std::size_t numel = 1;
  for (std::size_t d : t.shape) {
    put_u64(out, d);
    numel *= d;
  }
  if (numel != t.data.size() && !(t.shape.empty() && t.data.size() == 1)) {
    throw ConfigError("checkpoint: tensor shape disagrees with payload");
  }
  for (double v : t.data) put_f64(out, v);
}

Tensor take_tensor(ByteReader& r) {
  const std::uint32_t ndim = r.take_u32();
  Tensor t;
  t.shape.reserve(ndim);
  std::size_t numel = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    const std::uint64_t d = r.take_u64();
    // Guard the multiplication before trusting a corrupt dimension.
    if (d != 0 && numel > (r.buf.size() / 8) / d) {
      throw ParseError("checkpoint: truncated file");
    }
    t.shape.push_back(std::size_t(d));
    numel *= std::size_t(d);
  }
  r.need(numel * 8);
  t.data.reserve(numel);
  for (std::size_t i = 0; i < numel; ++i) t.data.push_back(r.take_f64());
  return t;
}

// ---- layer reconstruction helpers --------------------------------------------

NodePtr param_from(const Checkpoint& ck, const std::string& name) {
  return make_param(ck.tensor_at(name), name);
}

void expect_mat(const Checkpoint& ck, const std::string& name,
                std::size_t rows, std::size_t cols) {
  const Tensor& t = ck.tensor_at(name);
  if (t.rank() != 2 || t.rows() != rows || t.cols() != cols) {
    throw ParseError("checkpoint tensor '" + name + "' has shape " +
                     shape_str(t) + ", expected (" + std::to_string(rows) +
                     "x" + std::to_string(cols) + ")");
  }
}

void expect_vec(const Checkpoint& ck, const std::string& name, std::size_t n) {
  const Tensor& t = ck.tensor_at(name);
  if (t.rank() != 1 || t.numel() != n) {
    throw ParseError("checkpoint tensor '" + name + "' has shape " +
                     shape_str(t) + ", expected (" + std::to_string(n) + ")");
  }
}

NgramConv ngram_from(const Checkpoint& ck, const std::string& name,
                     std::size_t maps, std::size_t d_in, std::size_t h,
                     Act f) {
  expect_mat(ck, name + ".W", maps, h * d_in);
  expect_vec(ck, name + ".b", maps);
  NgramConv c;
  c.W = param_from(ck, name + ".W");
  c.b = param_from(ck, name + ".b");
  c.h = h;
  c.f = f;
  return c;
}

EmbeddingLayer embedding_layer_from(const Checkpoint& ck,
                                    const std::string& name, std::size_t d_out,
                                    std::size_t d_in, Act f) {
  expect_mat(ck, name + ".W", d_out, d_in);
  expect_vec(ck, name + ".b", d_out);
  EmbeddingLayer l;
  l.W = param_from(ck, name + ".W");
  l.b = param_from(ck, name + ".b");
  l.f = f;
  return l;
}

DenseHead head_from(const Checkpoint& ck, const std::string& name,
                    std::size_t classes, std::size_t d_in) {
  expect_mat(ck, name + ".W", classes, d_in);
  expect_vec(ck, name + ".b", classes);
  DenseHead h;
  h.W = param_from(ck, name + ".W");
  h.b = param_from(ck, name + ".b");
  return h;
}

void put_layer(Checkpoint& ck, const std::string& name, const NodePtr& W,
               const NodePtr& b) {
  ck.tensors.emplace_back(name + ".W", W->value);
  ck.tensors.emplace_back(name + ".b", b->value);
}

void put_normalizer(Checkpoint& ck, const std::string& prefix,
                    const Normalizer& n) {
  ck.tensors.emplace_back(prefix + ".mean", n.mean);
  ck.tensors.emplace_back(prefix + ".std", n.std_dev);
}

Normalizer normalizer_from(const Checkpoint& ck, const std::string& prefix) {
  Normalizer n;
  n.mean = ck.tensor_at(prefix + ".mean");
  n.std_dev = ck.tensor_at(prefix + ".std");
  if (!n.mean.same_shape(n.std_dev)) {
    throw ParseError("checkpoint: '" + prefix +
                     "' mean and std shapes disagree");
  }
  return n;
}

// Matrix whose rows are the table vectors, (V x d); V may be zero.
Tensor table_matrix(const EmbeddingTable& table) {
  Tensor m = Tensor::zeros({table.vectors.size(), table.dim});
  for (std::size_t i = 0; i < table.vectors.size(); ++i) {
    for (std::size_t j = 0; j < table.dim; ++j) {
      m(i, j) = table.vectors[i].data[j];
    }
  }
  return m;
}

EmbeddingTable table_from(const Checkpoint& ck, const std::string& list_name,
                          const std::string& tensor_name, std::size_t dim,
                          OovPolicy oov) {
  const std::vector<std::string>& tokens = ck.list_at(list_name);
  expect_mat(ck, tensor_name, tokens.size(), dim);
  const Tensor& m = ck.tensor_at(tensor_name);
  EmbeddingTable table;
  table.dim = dim;
  table.oov = oov;
  table.tokens = tokens;
  table.vectors.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Tensor row = Tensor::zeros({dim});
    for (std::size_t j = 0; j < dim; ++j) row(j) = m(i, j);
    table.vectors.push_back(std::move(row));
    if (!table.index.emplace(tokens[i], i).second) {
      throw ParseError("checkpoint list '" + list_name +
                       "' repeats token '" + tokens[i] + "'");
    }
  }
  return table;
}

void check_kind(const Checkpoint& ck, const std::string& expected) {
  if (ck.kind != expected) {
    throw ConfigError("checkpoint holds a '" + ck.kind + "' model, expected '" +
                      expected + "'");
  }
}

}  // namespace

// ---- Checkpoint accessors -----------------------------------------------------

void Checkpoint::set_hyper(const std::string& key, const std::string& value) {
  hyper.emplace_back(key, value);
}

void Checkpoint::set_hyper_double(const std::string& key, double value) {
  set_hyper(key, double_string(value));
}

void Checkpoint::set_hyper_size(const std::string& key, std::size_t value) {
  set_hyper(key, std::to_string(value));
}

void Checkpoint::set_hyper_bool(const std::string& key, bool value) {
  set_hyper(key, value ? "1" : "0");
}

const std::string& Checkpoint::hyper_at(const std::string& key) const {
  for (const auto& [k, v] : hyper) {
    if (k == key) return v;
  }
  throw ParseError("checkpoint missing hyperparameter '" + key + "'");
}

double Checkpoint::hyper_double(const std::string& key) const {
  return parse_double(key, hyper_at(key));
}

std::size_t Checkpoint::hyper_size(const std::string& key) const {
  return parse_size(key, hyper_at(key));
}

bool Checkpoint::hyper_bool(const std::string& key) const {
  const std::string& v = hyper_at(key);
  if (v == "1") return true;
  if (v == "0") return false;
  throw ParseError("checkpoint hyperparameter '" + key + "': expected 0 or 1, got '" +
                   v + "'");
}

const std::vector<std::string>& Checkpoint::list_at(
    const std::string& name) const {
  for (const auto& [k, v] : string_lists) {
    if (k == name) return v;
  }
  throw ParseError("checkpoint missing string list '" + name + "'");
}

const Tensor& Checkpoint::tensor_at(const std::string& name) const {
  for (const auto& [k, v] : tensors) {
    if (k == name) return v;
  }
  throw ParseError("checkpoint missing tensor '" + name + "'");
}

// ---- file io -------------------------------------------------------------------

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::string out;
  out.append(kMagic, sizeof kMagic);
  put_u32(out, ck.version);
  put_string(out, ck.kind);

  put_u32(out, std::uint32_t(ck.hyper.size()));
  for (const auto& [k, v] : ck.hyper) {
    put_string(out, k);
    put_string(out, v);
  }
  put_u32(out, std::uint32_t(ck.string_lists.size()));
  for (const auto& [name, items] : ck.string_lists) {
    put_string(out, name);
    put_u32(out, std::uint32_t(items.size()));
    for (const std::string& item : items) put_string(out, item);
  }
  put_u32(out, std::uint32_t(ck.tensors.size()));
  for (const auto& [name, t] : ck.tensors) {
    put_string(out, name);
    put_tensor(out, t);
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(out.data(), std::streamsize(out.size()));
  f.flush();
  if (!f.good()) throw IoError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(f)),
                  std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read from '" + path + "' failed");

  ByteReader r{buf};
  r.need(sizeof kMagic);
  if (std::memcmp(buf.data(), kMagic, sizeof kMagic) != 0) {
    throw ParseError("'" + path + "' is not a model checkpoint (bad magic)");
  }
  r.pos = sizeof kMagic;

  Checkpoint ck;
  ck.version = r.take_u32();
  if (ck.version != kVersion) {
    throw UnsupportedError("checkpoint format version " +
                           std::to_string(ck.version) +
                           " is not supported (this build reads version 1)");
  }
  ck.kind = r.take_string();

  const std::uint32_t n_hyper = r.take_u32();
  ck.hyper.reserve(n_hyper);
  for (std::uint32_t i = 0; i < n_hyper; ++i) {
    std::string k = r.take_string();
    std::string v = r.take_string();
    ck.hyper.emplace_back(std::move(k), std::move(v));
  }
  const std::uint32_t n_lists = r.take_u32();
  ck.string_lists.reserve(n_lists);
  for (std::uint32_t i = 0; i < n_lists; ++i) {
    std::string name = r.take_string();
    const std::uint32_t n_items = r.take_u32();
    std::vector<std::string> items;
    items.reserve(std::min<std::size_t>(n_items, buf.size()));
    for (std::uint32_t j = 0; j < n_items; ++j) items.push_back(r.take_string());
    ck.string_lists.emplace_back(std::move(name), std::move(items));
  }
  const std::uint32_t n_tensors = r.take_u32();
  ck.tensors.reserve(std::min<std::size_t>(n_tensors, buf.size()));
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.take_string();
    Tensor t = take_tensor(r);
    ck.tensors.emplace_back(std::move(name), std::move(t));
  }
  if (r.pos != buf.size()) {
    throw ParseError("'" + path + "' has trailing bytes after the checkpoint");
  }
  return ck;
}

// ---- emotion -------------------------------------------------------------------

Checkpoint checkpoint_from(const EmotionModel& model) {
  Checkpoint ck;
  ck.kind = "emotion";
  ck.set_hyper("category", model.category);
  ck.set_hyper_size("window", model.cfg.window);
  ck.set_hyper_size("step", model.cfg.step);
  ck.set_hyper_size("hidden", model.cfg.hidden);
  ck.set_hyper("activation", act_name(model.cfg.activation));
  ck.set_hyper_size("sample_rate", model.cfg.sample_rate);
  ck.set_hyper_double("norm_mean", model.norm_mean);
  ck.set_hyper_double("norm_std", model.norm_std);
  put_layer(ck, "conv", model.conv.W, model.conv.b);
  put_layer(ck, "head", model.head.W, model.head.b);
  return ck;
}

EmotionModel emotion_from_checkpoint(const Checkpoint& ck) {
  check_kind(ck, "emotion");
  EmotionCnnConfig cfg;
  cfg.window = ck.hyper_size("window");
  cfg.step = ck.hyper_size("step");
  cfg.hidden = ck.hyper_size("hidden");
  cfg.activation = act_from_name(ck.hyper_at("activation"));
  cfg.sample_rate = std::uint32_t(ck.hyper_size("sample_rate"));
  validate(cfg);

  EmotionModel m;
  m.cfg = cfg;
  m.category = ck.hyper_at("category");
  m.conv = embedding_layer_from(ck, "conv", cfg.hidden, cfg.window,
                                cfg.activation);
  m.head = head_from(ck, "head", 2, cfg.hidden);
  m.norm_mean = ck.hyper_double("norm_mean");
  m.norm_std = ck.hyper_double("norm_std");
  return m;
}

// ---- sentiment -----------------------------------------------------------------

Checkpoint checkpoint_from(const SentimentModel& model) {
  Checkpoint ck;
  ck.kind = "sentiment";
  ck.set_hyper("heights", heights_string(model.cfg.heights));
  ck.set_hyper_size("maps", model.cfg.maps);
  ck.set_hyper_bool("bichannel", model.cfg.bichannel);
  ck.set_hyper_size("dim", model.static_table.dim);
  ck.set_hyper_bool("frame_norm_ready", model.frame_norm_ready);
  ck.string_lists.emplace_back("static_tokens", model.static_table.tokens);
  ck.string_lists.emplace_back("ft_tokens", model.ft_tokens);
  ck.tensors.emplace_back("static_matrix", table_matrix(model.static_table));
  ck.tensors.emplace_back("sentiment.ft_matrix", model.ft_matrix->value);
  for (std::size_t i = 0; i < model.cfg.heights.size(); ++i) {
    const std::string tag = std::to_string(model.cfg.heights[i]);
    put_layer(ck, "sentiment.static_conv" + tag, model.static_convs[i].W,
              model.static_convs[i].b);
    put_layer(ck, "sentiment.ft_conv" + tag, model.ft_convs[i].W,
              model.ft_convs[i].b);
  }
  if (model.cfg.bichannel) {
    put_layer(ck, "sentiment.audio_conv", model.audio_conv.W,
              model.audio_conv.b);
  }
  if (model.frame_norm_ready) {
    put_normalizer(ck, "frame_norm", model.frame_norm);
  }
  put_layer(ck, "sentiment.head", model.head.W, model.head.b);
  return ck;
}

SentimentModel sentiment_from_checkpoint(const Checkpoint& ck) {
  check_kind(ck, "sentiment");
  SentimentCnnConfig cfg;
  cfg.heights = parse_heights(ck.hyper_at("heights"));
  cfg.maps = ck.hyper_size("maps");
  cfg.bichannel = ck.hyper_bool("bichannel");
  validate(cfg);
  const std::size_t d = ck.hyper_size("dim");
  if (d == 0) throw ParseError("checkpoint: sentiment dimension is 0");

  SentimentModel m;
  m.cfg = cfg;
  m.static_table =
      table_from(ck, "static_tokens", "static_matrix", d, OovPolicy::kZero);
  m.ft_tokens = ck.list_at("ft_tokens");
  for (const std::string& t : m.ft_tokens) {
    if (!m.ft_index.emplace(t, m.ft_index.size()).second) {
      throw ParseError("checkpoint list 'ft_tokens' repeats token '" + t + "'");
    }
  }
  expect_mat(ck, "sentiment.ft_matrix", m.ft_tokens.size(), d);
  m.ft_matrix = param_from(ck, "sentiment.ft_matrix");
  for (std::size_t h : cfg.heights) {
    const std::string tag = std::to_string(h);
    m.static_convs.push_back(ngram_from(ck, "sentiment.static_conv" + tag,
                                        cfg.maps, d, h, Act::kTanh));
    m.ft_convs.push_back(
        ngram_from(ck, "sentiment.ft_conv" + tag, cfg.maps, d, h, Act::kTanh));
  }
  std::size_t head_in = 2 * cfg.heights.size() * cfg.maps;
  if (cfg.bichannel) {
    m.audio_conv = ngram_from(ck, "sentiment.audio_conv", cfg.maps,
                              kFrameFeatureDim, 3, Act::kRelu);
    head_in += cfg.maps;
  }
  m.frame_norm_ready = ck.hyper_bool("frame_norm_ready");
  if (m.frame_norm_ready) m.frame_norm = normalizer_from(ck, "frame_norm");
  m.head = head_from(ck, "sentiment.head", 2, head_in);
  return m;
}

// ---- humor ---------------------------------------------------------------------

Checkpoint checkpoint_from(const HumorModel& model) {
  Checkpoint ck;
  ck.kind = "humor";
  ck.set_hyper_size("k", model.cfg.k);
  ck.set_hyper("variant",
               model.variant == HumorVariant::kLstm ? "lstm" : "shifted");
  ck.set_hyper_size("lang_hidden", model.cfg.lang_hidden);
  ck.set_hyper_size("lang_window", model.cfg.lang_window);
  ck.set_hyper("lang_act", act_name(model.cfg.lang_act));
  ck.set_hyper_size("audio_hidden", model.cfg.audio_hidden);
  ck.set_hyper_size("audio_window", model.cfg.audio_window);
  ck.set_hyper("audio_act", act_name(model.cfg.audio_act));
  ck.set_hyper_size("lstm_hidden", model.cfg.lstm_hidden);
  ck.set_hyper_double("dropout", model.cfg.dropout);
  ck.set_hyper_bool("use_audio", model.cfg.use_audio);
  ck.set_hyper_bool("use_speaker", model.cfg.use_speaker);
  ck.set_hyper_size("dim", model.table.dim);
  ck.set_hyper_bool("frame_norm_ready", model.frame_norm_ready);
  ck.set_hyper_bool("extras_norm_ready", model.extras_norm_ready);
  ck.string_lists.emplace_back("vocab", model.table.tokens);
  ck.string_lists.emplace_back("roster", model.roster);
  ck.tensors.emplace_back("embedding_matrix", table_matrix(model.table));
  put_layer(ck, "humor.lang_conv", model.lang_conv.W, model.lang_conv.b);
  if (model.cfg.use_audio) {
    put_layer(ck, "humor.audio_emb1", model.audio_enc.emb1.W,
              model.audio_enc.emb1.b);
    put_layer(ck, "humor.audio_emb2", model.audio_enc.emb2.W,
              model.audio_enc.emb2.b);
    put_layer(ck, "humor.audio_conv", model.audio_enc.conv.W,
              model.audio_enc.conv.b);
  }
  if (model.cfg.k > 1) {
    if (model.variant == HumorVariant::kLstm) {
      for (const NodePtr& p : model.lstm.params()) {
        ck.tensors.emplace_back(p->name, p->value);
      }
    }
    ck.tensors.emplace_back("humor.sentinel", model.sentinel->value);
  }
  if (model.frame_norm_ready) put_normalizer(ck, "frame_norm", model.frame_norm);
  if (model.extras_norm_ready) {
    put_normalizer(ck, "extras_norm", model.extras_norm);
  }
  put_layer(ck, "humor.head", model.head.W, model.head.b);
  return ck;
}

HumorModel humor_from_checkpoint(const Checkpoint& ck,
                                 std::uint64_t dropout_seed) {
  check_kind(ck, "humor");
  HumorNetConfig cfg;
  cfg.k = ck.hyper_size("k");
  cfg.lang_hidden = ck.hyper_size("lang_hidden");
  cfg.lang_window = ck.hyper_size("lang_window");
  cfg.lang_act = act_from_name(ck.hyper_at("lang_act"));
  cfg.audio_hidden = ck.hyper_size("audio_hidden");
  cfg.audio_window = ck.hyper_size("audio_window");
  cfg.audio_act = act_from_name(ck.hyper_at("audio_act"));
  cfg.lstm_hidden = ck.hyper_size("lstm_hidden");
  cfg.dropout = ck.hyper_double("dropout");
  cfg.use_audio = ck.hyper_bool("use_audio");
  cfg.use_speaker = ck.hyper_bool("use_speaker");
  validate(cfg);
  const std::string& variant_name = ck.hyper_at("variant");
  HumorVariant variant;
  if (variant_name == "lstm") {
    variant = HumorVariant::kLstm;
  } else if (variant_name == "shifted") {
    variant = HumorVariant::kShifted;
  } else {
    throw ParseError("checkpoint: unknown context variant '" + variant_name +
                     "'");
  }
  const std::size_t d = ck.hyper_size("dim");
  if (d == 0) throw ParseError("checkpoint: humor embedding dimension is 0");

  HumorModel m;
  m.cfg = cfg;
  m.variant = variant;
  m.table = table_from(ck, "vocab", "embedding_matrix", d, OovPolicy::kHashed);
  m.roster = ck.list_at("roster");
  m.dropout_rng = Rng(dropout_seed);

  m.lang_conv = ngram_from(ck, "humor.lang_conv", cfg.lang_hidden, d,
                           cfg.lang_window, cfg.lang_act);
  if (cfg.use_audio) {
    m.audio_enc.emb1 = embedding_layer_from(
        ck, "humor.audio_emb1", cfg.audio_hidden, kFrameFeatureDim,
        cfg.audio_act);
    m.audio_enc.emb2 = embedding_layer_from(
        ck, "humor.audio_emb2", cfg.audio_hidden, cfg.audio_hidden,
        cfg.audio_act);
    m.audio_enc.conv = ngram_from(ck, "humor.audio_conv", cfg.audio_hidden,
                                  cfg.audio_hidden, cfg.audio_window,
                                  cfg.audio_act);
  }
  if (cfg.k > 1) {
    if (variant == HumorVariant::kLstm) {
      const std::size_t nh = cfg.lstm_hidden;
      const std::size_t nx = cfg.lang_hidden;
      auto gate_mat = [&](const char* name, std::size_t cols) {
        expect_mat(ck, std::string("humor.lstm.") + name, nh, cols);
        return param_from(ck, std::string("humor.lstm.") + name);
      };
      auto gate_vec = [&](const char* name) {
        expect_vec(ck, std::string("humor.lstm.") + name, nh);
        return param_from(ck, std::string("humor.lstm.") + name);
      };
      m.lstm.Wix = gate_mat("Wix", nx);
      m.lstm.Wih = gate_mat("Wih", nh);
      m.lstm.bi = gate_vec("bi");
      m.lstm.Wfx = gate_mat("Wfx", nx);
      m.lstm.Wfh = gate_mat("Wfh", nh);
      m.lstm.bf = gate_vec("bf");
      m.lstm.Wox = gate_mat("Wox", nx);
      m.lstm.Woh = gate_mat("Woh", nh);
      m.lstm.bo = gate_vec("bo");
      m.lstm.Wsx = gate_mat("Wsx", nx);
      m.lstm.Wsh = gate_mat("Wsh", nh);
      m.lstm.bs = gate_vec("bs");
      m.lstm.hidden = nh;
    }
    expect_vec(ck, "humor.sentinel", cfg.lang_hidden);
    m.sentinel = param_from(ck, "humor.sentinel");
  }
  m.frame_norm_ready = ck.hyper_bool("frame_norm_ready");
  if (m.frame_norm_ready) m.frame_norm = normalizer_from(ck, "frame_norm");
  m.extras_norm_ready = ck.hyper_bool("extras_norm_ready");
  if (m.extras_norm_ready) m.extras_norm = normalizer_from(ck, "extras_norm");

  const std::size_t context_dim =
      cfg.k == 1 ? cfg.lang_hidden
                 : (variant == HumorVariant::kLstm ? cfg.lstm_hidden
                                                   : cfg.k * cfg.lang_hidden);
  std::size_t head_in = context_dim;
  if (cfg.use_audio) head_in += cfg.audio_hidden;
  head_in += 2 + (cfg.k - 1) + 1;
  if (cfg.use_speaker) head_in += m.roster.size() + 1;
  m.head = head_from(ck, "humor.head", 2, head_in);
  return m;
}

}  // namespace affect

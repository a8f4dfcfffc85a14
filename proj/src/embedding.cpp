#include "affect/embedding.hpp"

#include <fstream>
#include <sstream>

#include "affect/errors.hpp"
#include "affect/rng.hpp"

namespace affect {

Tensor EmbeddingTable::lookup(const std::string& token) const {
  const auto it = index.find(token);
  if (it != index.end()) return vectors[it->second];
  if (oov == OovPolicy::kHashed) return hashed_vector(token, dim);
  return Tensor::zeros({dim});
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Tensor hashed_vector(const std::string& token, std::size_t dim) {
  Rng rng(fnv1a(token));
  Tensor out = Tensor::zeros({dim});
  for (double& v : out.data) v = rng.next_uniform(-0.25, 0.25);
  return out;
}

EmbeddingTable load_embeddings(const std::string& path, OovPolicy oov) {
  std::ifstream in(path);
  if (!in) throw IoError("load_embeddings: cannot open " + path);

  EmbeddingTable table;
  table.oov = oov;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token)) continue;  // blank line

    std::vector<double> values;
    std::string field;
    while (ss >> field) {
      try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument(field);
        values.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("load_embeddings: " + path + " line " +
                         std::to_string(line_no) + ": bad value '" + field +
                         "'");
      }
    }
    if (values.empty()) {
      throw ParseError("load_embeddings: " + path + " line " +
                       std::to_string(line_no) + ": no vector for token '" +
                       token + "'");
    }
    if (table.dim == 0) {
      table.dim = values.size();
    } else if (values.size() != table.dim) {
      throw ParseError("load_embeddings: " + path + " line " +
                       std::to_string(line_no) + ": dimension " +
                       std::to_string(values.size()) + " != " +
                       std::to_string(table.dim));
    }
    if (table.contains(token)) {
      throw ParseError("load_embeddings: " + path + " line " +
                       std::to_string(line_no) + ": duplicate token '" +
                       token + "'");
    }
    table.index.emplace(token, table.tokens.size());
    table.tokens.push_back(token);
    Tensor vec = Tensor::zeros({table.dim});
    vec.data = std::move(values);
    table.vectors.push_back(std::move(vec));
  }
  if (table.tokens.empty()) {
    throw ParseError("load_embeddings: " + path + " contains no entries");
  }
  return table;
}

Tensor embed_sentence(const EmbeddingTable& table,
                      const std::vector<std::string>& tokens,
                      std::size_t min_rows) {
  if (tokens.empty()) throw EmptyInputError("embed_sentence: empty sentence");
  const std::size_t rows = std::max(tokens.size(), min_rows);
  Tensor out = Tensor::zeros({rows, table.dim});
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const Tensor vec = table.lookup(tokens[t]);
    for (std::size_t j = 0; j < table.dim; ++j) out(t, j) = vec.data[j];
  }
  return out;
}

}  // namespace affect

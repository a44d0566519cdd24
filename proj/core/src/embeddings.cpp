#include "e2t/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace e2t {

Tensor random_embedding_matrix(std::size_t vocab_size, std::size_t dim, Rng& rng) {
  Tensor m({vocab_size, dim});
  const double bound = std::sqrt(6.0 / static_cast<double>(vocab_size + dim));
  double* p = m.mut();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = rng.uniform(-bound, bound);
  return m;
}

EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                std::size_t dim, Rng& rng) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file " + path);
  EmbeddingMatrix out;
  out.matrix = random_embedding_matrix(vocab.size(), dim, rng);
  double* m = out.matrix.mut();

  std::string line;
  std::size_t line_no = 0;
  std::vector<bool> seen(vocab.size(), false);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<double> values;
    values.reserve(dim);
    double v;
    while (ls >> v) values.push_back(v);
    if (values.size() != dim) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(dim) + " values, found " +
                               std::to_string(values.size()));
    }
    if (!vocab.contains(token)) continue;
    const int id = vocab.id(token);
    if (id < 4) continue;  // reserved rows keep their random init
    if (!seen[id]) {
      seen[id] = true;
      ++out.matched;
    }
    for (std::size_t j = 0; j < dim; ++j) m[static_cast<std::size_t>(id) * dim + j] = values[j];
  }
  const std::size_t real_tokens = vocab.size() - 4;
  out.coverage = real_tokens == 0
                     ? 0.0
                     : static_cast<double>(out.matched) / static_cast<double>(real_tokens);
  return out;
}

}  // namespace e2t

#pragma once

#include <string>

#include "e2t/rng.hpp"
#include "e2t/tensor.hpp"
#include "e2t/vocab.hpp"

namespace e2t {

struct EmbeddingMatrix {
  Tensor matrix;          // vocab size x dim
  double coverage = 0.0;  // matched non-reserved tokens / non-reserved vocab
  std::size_t matched = 0;
};

// Reads a text embedding file (token followed by `dim` decimal floats per
// line). Vocabulary rows present in the file are copied; the rest keep their
// random initialization. A line whose value count differs from `dim` raises
// an error with the line number.
EmbeddingMatrix load_embeddings(const std::string& path, const Vocabulary& vocab,
                                std::size_t dim, Rng& rng);

// Scaled uniform init in +/- sqrt(6/(fan_in+fan_out)); used for embedding
// rows not covered by a pretrained file.
Tensor random_embedding_matrix(std::size_t vocab_size, std::size_t dim, Rng& rng);

}  // namespace e2t

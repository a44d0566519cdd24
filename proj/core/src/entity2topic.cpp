#include "e2t/entity2topic.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace e2t {

std::vector<std::size_t> top_k_indices(const std::vector<double>& scores, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k_indices: k must be positive");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, scores.size()));
  std::sort(order.begin(), order.end());
  return order;
}

Tensor sparse_mask(const std::vector<std::size_t>& keep, std::size_t m) {
  if (keep.empty()) throw std::invalid_argument("sparse_mask: empty index set");
  Tensor mask = Tensor::full({m}, kNegInf);
  double* p = mask.mut();
  for (std::size_t i : keep) {
    if (i >= m) throw std::invalid_argument("sparse_mask: index out of range");
    p[i] = 0.0;
  }
  return mask;
}

}  // namespace e2t

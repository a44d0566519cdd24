#pragma once

#include <vector>

#include "e2t/tensor.hpp"

namespace e2t {

// Dense math shared by the differentiation graph (forward values) and the
// plain inference path. Shape mismatches throw std::invalid_argument.

Tensor k_add(const Tensor& a, const Tensor& b);
Tensor k_mul(const Tensor& a, const Tensor& b);
Tensor k_one_minus(const Tensor& a);
Tensor k_scale(const Tensor& a, double c);
Tensor k_sigmoid(const Tensor& a);
Tensor k_tanh(const Tensor& a);

// softmax/log-softmax over a vector, computed with max subtraction
Tensor k_softmax(const Tensor& v);
Tensor k_log_softmax(const Tensor& v);

Tensor k_matvec(const Tensor& m, const Tensor& x);    // (r x c) * (c) -> (r)
Tensor k_matvec_t(const Tensor& m, const Tensor& a);  // (r x c)^T * (r) -> (c)
Tensor k_matmul_nt(const Tensor& a, const Tensor& b); // (n x k) * (m x k)^T -> (n x m)
Tensor k_add_row_broadcast(const Tensor& m, const Tensor& v);

Tensor k_concat(const std::vector<const Tensor*>& parts);
Tensor k_stack_rows(const std::vector<const Tensor*>& rows);
Tensor k_row(const Tensor& m, std::size_t r);
Tensor k_pick(const Tensor& v, std::size_t i);
Tensor k_dot(const Tensor& u, const Tensor& v);
Tensor k_sum(const Tensor& v);
Tensor k_mean(const Tensor& v);

}  // namespace e2t

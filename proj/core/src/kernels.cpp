#include "e2t/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace e2t {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

void require_vector(const Tensor& v, const char* op) {
  if (v.rank() != 1) {
    throw std::invalid_argument(std::string(op) + ": expected a vector, got " +
                                shape_str(v.shape()));
  }
}

void require_matrix(const Tensor& m, const char* op) {
  if (m.rank() != 2) {
    throw std::invalid_argument(std::string(op) + ": expected a matrix, got " +
                                shape_str(m.shape()));
  }
}

}  // namespace

Tensor k_add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = pa[i] + pb[i];
  return out;
}

Tensor k_mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = pa[i] * pb[i];
  return out;
}

Tensor k_one_minus(const Tensor& a) {
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = 1.0 - pa[i];
  return out;
}

Tensor k_scale(const Tensor& a, double c) {
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = c * pa[i];
  return out;
}

Tensor k_sigmoid(const Tensor& a) {
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = 1.0 / (1.0 + std::exp(-pa[i]));
  return out;
}

Tensor k_tanh(const Tensor& a) {
  Tensor out(a.shape());
  double* o = out.mut();
  const double* pa = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = std::tanh(pa[i]);
  return out;
}

Tensor k_softmax(const Tensor& v) {
  require_vector(v, "softmax");
  if (v.size() == 0) throw std::invalid_argument("empty distribution");
  const double* p = v.data();
  double mx = p[0];
  for (std::size_t i = 1; i < v.size(); ++i) mx = std::max(mx, p[i]);
  Tensor out(v.shape());
  double* o = out.mut();
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    o[i] = std::exp(p[i] - mx);
    sum += o[i];
  }
  for (std::size_t i = 0; i < v.size(); ++i) o[i] /= sum;
  return out;
}

Tensor k_log_softmax(const Tensor& v) {
  require_vector(v, "log_softmax");
  if (v.size() == 0) throw std::invalid_argument("empty distribution");
  const double* p = v.data();
  double mx = p[0];
  for (std::size_t i = 1; i < v.size(); ++i) mx = std::max(mx, p[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += std::exp(p[i] - mx);
  const double lse = mx + std::log(sum);
  Tensor out(v.shape());
  double* o = out.mut();
  for (std::size_t i = 0; i < v.size(); ++i) o[i] = p[i] - lse;
  return out;
}

Tensor k_matvec(const Tensor& m, const Tensor& x) {
  require_matrix(m, "matvec");
  require_vector(x, "matvec");
  if (m.cols() != x.size()) {
    throw std::invalid_argument("matvec: " + shape_str(m.shape()) + " * " +
                                shape_str(x.shape()));
  }
  Tensor out({m.rows()});
  double* o = out.mut();
  const double* pm = m.data();
  const double* px = x.data();
  const std::size_t c = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    const double* rowp = pm + r * c;
    for (std::size_t j = 0; j < c; ++j) acc += rowp[j] * px[j];
    o[r] = acc;
  }
  return out;
}

Tensor k_matvec_t(const Tensor& m, const Tensor& a) {
  require_matrix(m, "matvec_t");
  require_vector(a, "matvec_t");
  if (m.rows() != a.size()) {
    throw std::invalid_argument("matvec_t: " + shape_str(m.shape()) + "^T * " +
                                shape_str(a.shape()));
  }
  Tensor out({m.cols()});
  double* o = out.mut();
  const double* pm = m.data();
  const double* pa = a.data();
  const std::size_t c = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double w = pa[r];
    const double* rowp = pm + r * c;
    for (std::size_t j = 0; j < c; ++j) o[j] += w * rowp[j];
  }
  return out;
}

Tensor k_matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("matmul_nt: inner dims " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
  }
  const std::size_t n = a.rows(), m = b.rows(), k = a.cols();
  Tensor out({n, m});
  double* o = out.mut();
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double acc = 0.0;
      const double* ra = pa + i * k;
      const double* rb = pb + j * k;
      for (std::size_t t = 0; t < k; ++t) acc += ra[t] * rb[t];
      o[i * m + j] = acc;
    }
  }
  return out;
}

Tensor k_add_row_broadcast(const Tensor& m, const Tensor& v) {
  require_matrix(m, "add_row_broadcast");
  require_vector(v, "add_row_broadcast");
  if (m.cols() != v.size()) {
    throw std::invalid_argument("add_row_broadcast: " + shape_str(m.shape()) +
                                " + " + shape_str(v.shape()));
  }
  Tensor out(m.shape());
  double* o = out.mut();
  const double* pm = m.data();
  const double* pv = v.data();
  const std::size_t c = m.cols();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t j = 0; j < c; ++j) o[r * c + j] = pm[r * c + j] + pv[j];
  }
  return out;
}

Tensor k_concat(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat: no inputs");
  std::size_t total = 0;
  for (const Tensor* p : parts) {
    require_vector(*p, "concat");
    total += p->size();
  }
  Tensor out({total});
  double* o = out.mut();
  std::size_t off = 0;
  for (const Tensor* p : parts) {
    std::copy(p->data(), p->data() + p->size(), o + off);
    off += p->size();
  }
  return out;
}

Tensor k_stack_rows(const std::vector<const Tensor*>& rows) {
  if (rows.empty()) throw std::invalid_argument("stack_rows: no inputs");
  const std::size_t d = rows[0]->size();
  for (const Tensor* r : rows) {
    require_vector(*r, "stack_rows");
    if (r->size() != d) throw std::invalid_argument("stack_rows: ragged rows");
  }
  Tensor out({rows.size(), d});
  double* o = out.mut();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i]->data(), rows[i]->data() + d, o + i * d);
  }
  return out;
}

Tensor k_row(const Tensor& m, std::size_t r) {
  require_matrix(m, "row");
  if (r >= m.rows()) {
    throw std::invalid_argument("row: index " + std::to_string(r) + " out of range for " +
                                shape_str(m.shape()));
  }
  Tensor out({m.cols()});
  std::copy(m.data() + r * m.cols(), m.data() + (r + 1) * m.cols(), out.mut());
  return out;
}

Tensor k_pick(const Tensor& v, std::size_t i) {
  require_vector(v, "pick");
  if (i >= v.size()) {
    throw std::invalid_argument("pick: index " + std::to_string(i) + " out of range");
  }
  return Tensor::scalar(v.at(i));
}

Tensor k_dot(const Tensor& u, const Tensor& v) {
  require_vector(u, "dot");
  require_same_shape(u, v, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u.at(i) * v.at(i);
  return Tensor::scalar(acc);
}

Tensor k_sum(const Tensor& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += v.at(i);
  return Tensor::scalar(acc);
}

Tensor k_mean(const Tensor& v) {
  if (v.size() == 0) throw std::invalid_argument("mean: empty input");
  return Tensor::scalar(k_sum(v).scalar_value() / static_cast<double>(v.size()));
}

}  // namespace e2t

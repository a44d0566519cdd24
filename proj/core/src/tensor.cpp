#include "e2t/tensor.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace e2t {

std::size_t shape_size(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << 'x';
    os << s[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor() : shape_{}, data_(std::make_shared<std::vector<double>>(1, 0.0)) {}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)),
      data_(std::make_shared<std::vector<double>>(shape_size(shape_), 0.0)) {
  for (std::size_t d : shape_) {
    if (d == 0) throw std::invalid_argument("tensor dimension must be positive");
  }
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)),
      data_(std::make_shared<std::vector<double>>(std::move(values))) {
  for (std::size_t d : shape_) {
    if (d == 0) throw std::invalid_argument("tensor dimension must be positive");
  }
  if (data_->size() != shape_size(shape_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_->size()) +
                                " does not match shape " + shape_str(shape_));
  }
}

Tensor Tensor::scalar(double v) { return Tensor({}, {v}); }

Tensor Tensor::zeros(Shape shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(Shape shape, double v) {
  Tensor t(std::move(shape));
  std::fill(t.data_->begin(), t.data_->end(), v);
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw std::logic_error("rows(): tensor is not rank 2");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw std::logic_error("cols(): tensor is not rank 2");
  return shape_[1];
}

double* Tensor::mut() {
  if (data_.use_count() > 1) {
    data_ = std::make_shared<std::vector<double>>(*data_);
  }
  return data_->data();
}

double Tensor::at2(std::size_t r, std::size_t c) const {
  return (*data_)[r * shape_[1] + c];
}

double Tensor::scalar_value() const {
  if (size() != 1) {
    throw std::logic_error("scalar_value(): tensor has " + std::to_string(size()) +
                           " elements");
  }
  return (*data_)[0];
}

bool Tensor::all_finite() const {
  for (double v : *data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace e2t

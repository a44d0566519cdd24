#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace e2t {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

// Dense tensor of 64-bit floats, row-major. Rank 0 is a scalar. Copies share
// storage; the first writer detaches, so produced values stay immutable while
// handles to them are alive.
class Tensor {
 public:
  Tensor();                                   // scalar 0
  explicit Tensor(Shape shape);               // zeros
  Tensor(Shape shape, std::vector<double> values);

  static Tensor scalar(double v);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double v);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor vector(std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_->size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t rows() const;
  std::size_t cols() const;

  const double* data() const { return data_->data(); }
  double* mut();  // detaches shared storage before granting write access

  double at(std::size_t i) const { return (*data_)[i]; }
  double at2(std::size_t r, std::size_t c) const;
  double scalar_value() const;

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;

 private:
  Shape shape_;
  std::shared_ptr<std::vector<double>> data_;
};

}  // namespace e2t

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uvg {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles.
class Array {
 public:
  Array() = default;
  explicit Array(Shape shape, double fill = 0.0);
  Array(Shape shape, std::vector<double> values);
  Array(Shape shape, std::initializer_list<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& vector() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // 2-D access.
  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

  /// Row `r` of the leading axis, flattened over the remaining axes.
  std::span<double> row(std::size_t r);
  std::span<const double> row(std::size_t r) const;
  std::size_t row_size() const;

  /// Same data, new shape. Throws InvalidArgument when sizes differ.
  Array reshaped(Shape shape) const;

  /// Rows [begin, end) of the leading axis.
  Array slice_rows(std::size_t begin, std::size_t end) const;

  void fill(double v);

  /// Throws NumericError naming `what` if any entry is NaN or infinite.
  void check_finite(std::string_view what) const;

  bool operator==(const Array& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Throws InvalidArgument unless `a` and `b` have the same shape.
void require_same_shape(const Array& a, const Array& b, std::string_view what);

// Elementwise helpers over equal-shaped arrays.
Array operator+(const Array& a, const Array& b);
Array operator-(const Array& a, const Array& b);
Array operator*(double s, const Array& a);
/// alpha * a + beta * b
Array axpby(double alpha, const Array& a, double beta, const Array& b);

double max_abs_diff(const Array& a, const Array& b);

/// Stack equally-shaped arrays along a new leading axis.
Array stack_rows(const std::vector<Array>& rows);

}  // namespace uvg

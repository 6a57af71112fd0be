#include "uvg/array.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "uvg/error.hpp"

namespace uvg {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Array::Array(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Array::Array(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != shape_size(shape_)) {
    throw InvalidArgument("array data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_string(shape_));
  }
}

Array::Array(Shape shape, std::initializer_list<double> values)
    : Array(std::move(shape), std::vector<double>(values)) {}

std::size_t Array::row_size() const {
  return shape_.empty() || shape_[0] == 0 ? 0 : data_.size() / shape_[0];
}

std::span<double> Array::row(std::size_t r) {
  const std::size_t n = row_size();
  return std::span<double>(data_).subspan(r * n, n);
}

std::span<const double> Array::row(std::size_t r) const {
  const std::size_t n = row_size();
  return std::span<const double>(data_).subspan(r * n, n);
}

Array Array::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw InvalidArgument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Array(std::move(shape), data_);
}

Array Array::slice_rows(std::size_t begin, std::size_t end) const {
  if (shape_.empty() || begin > end || end > shape_[0]) {
    throw InvalidArgument("row slice out of range");
  }
  Shape s = shape_;
  s[0] = end - begin;
  const std::size_t n = row_size();
  return Array(std::move(s), std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(begin * n),
                                                 data_.begin() + static_cast<std::ptrdiff_t>(end * n)));
}

void Array::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Array::check_finite(std::string_view what) const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in " + std::string(what));
  }
}

void require_same_shape(const Array& a, const Array& b, std::string_view what) {
  if (a.shape() != b.shape()) {
    throw InvalidArgument(std::string(what) + ": shape mismatch " + shape_string(a.shape()) +
                          " vs " + shape_string(b.shape()));
  }
}

Array operator+(const Array& a, const Array& b) {
  require_same_shape(a, b, "add");
  Array out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Array operator-(const Array& a, const Array& b) {
  require_same_shape(a, b, "subtract");
  Array out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Array operator*(double s, const Array& a) {
  Array out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

Array axpby(double alpha, const Array& a, double beta, const Array& b) {
  require_same_shape(a, b, "axpby");
  Array out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
  return out;
}

double max_abs_diff(const Array& a, const Array& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Array stack_rows(const std::vector<Array>& rows) {
  if (rows.empty()) throw InvalidArgument("stack_rows: no rows");
  Shape s{rows.size()};
  s.insert(s.end(), rows[0].shape().begin(), rows[0].shape().end());
  std::vector<double> data;
  data.reserve(shape_size(s));
  for (const Array& r : rows) {
    require_same_shape(r, rows[0], "stack_rows");
    data.insert(data.end(), r.values().begin(), r.values().end());
  }
  return Array(std::move(s), std::move(data));
}

}  // namespace uvg

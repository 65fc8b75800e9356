#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace forgetlab {

/// Dense row-major tensor of 64-bit floats. The universal value carrier:
/// batches, parameters, gradients, activation matrices, kernels.
///
/// Internal arithmetic constructs tensors without finiteness checks;
/// `from_data` is the validated entry point for external values.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);  // zero-filled

  static Tensor from_data(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor identity(std::size_t n);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const;
  bool empty() const { return data_.empty(); }
  std::string shape_str() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& operator()(std::size_t i);
  double operator()(std::size_t i) const;
  double& operator()(std::size_t i, std::size_t j);
  double operator()(std::size_t i, std::size_t j) const;
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l);
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;

  Tensor reshaped(std::vector<std::size_t> shape) const;
  Tensor transposed() const;  // rank-2 only
  /// Gather along the first axis.
  Tensor take_rows(const std::vector<std::size_t>& rows) const;
  /// Contiguous slice [begin, end) along the first axis.
  Tensor slice_rows(std::size_t begin, std::size_t end) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);
  Tensor operator+(const Tensor& other) const;
  Tensor operator-(const Tensor& other) const;
  Tensor operator*(double s) const;

  /// this += alpha * other
  void axpy(double alpha, const Tensor& other);
  void fill(double value);
  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// FNV-1a over shape and raw data bytes; used for probe/dataset fingerprints.
  std::uint64_t content_hash() const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;

  void require_rank(std::size_t r) const;
  static std::size_t checked_size(const std::vector<std::size_t>& shape);
};

Tensor matmul(const Tensor& a, const Tensor& b);
double frobenius_norm(const Tensor& x);
double dot(const Tensor& a, const Tensor& b);

std::uint64_t fnv1a64(const void* bytes, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b);

}  // namespace forgetlab

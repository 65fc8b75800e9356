#include "forgetlab/tensor.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <sstream>

#include "forgetlab/error.hpp"

namespace forgetlab {

namespace {

std::string shape_to_string(const std::vector<std::size_t>& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << "x";
    os << s[i];
  }
  os << ")";
  return os.str();
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajorMatrix>;
using MutMap = Eigen::Map<RowMajorMatrix>;

}  // namespace

std::size_t Tensor::checked_size(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw DimensionError("tensor shape must have at least one extent");
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw DimensionError("tensor extents must be positive, got shape " + shape_to_string(shape));
    n *= e;
  }
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
  data_.assign(checked_size(shape_), 0.0);
}

Tensor Tensor::from_data(std::vector<std::size_t> shape, std::vector<double> data) {
  std::size_t n = checked_size(shape);
  if (n != data.size()) {
    throw DimensionError("data length " + std::to_string(data.size()) + " does not match shape " +
                         shape_to_string(shape));
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw DataError("non-finite value in tensor data");
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::move(data);
  return t;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw DimensionError("axis " + std::to_string(axis) + " out of range for " + shape_str());
  return shape_[axis];
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

void Tensor::require_rank(std::size_t r) const {
  if (shape_.size() != r) {
    throw DimensionError("expected rank-" + std::to_string(r) + " tensor, got " + shape_str());
  }
}

double& Tensor::operator()(std::size_t i) {
  require_rank(1);
  return data_[i];
}
double Tensor::operator()(std::size_t i) const {
  require_rank(1);
  return data_[i];
}
double& Tensor::operator()(std::size_t i, std::size_t j) {
  require_rank(2);
  return data_[i * shape_[1] + j];
}
double Tensor::operator()(std::size_t i, std::size_t j) const {
  require_rank(2);
  return data_[i * shape_[1] + j];
}
double& Tensor::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
  require_rank(4);
  return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
}
double Tensor::operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
  require_rank(4);
  return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  std::size_t n = checked_size(shape);
  if (n != data_.size()) {
    throw DimensionError("cannot reshape " + shape_str() + " to " + shape_to_string(shape));
  }
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = data_;
  return t;
}

Tensor Tensor::transposed() const {
  require_rank(2);
  Tensor t({shape_[1], shape_[0]});
  ConstMap a(data_.data(), static_cast<Eigen::Index>(shape_[0]), static_cast<Eigen::Index>(shape_[1]));
  MutMap b(t.data(), static_cast<Eigen::Index>(shape_[1]), static_cast<Eigen::Index>(shape_[0]));
  b = a.transpose();
  return t;
}

Tensor Tensor::take_rows(const std::vector<std::size_t>& rows) const {
  if (shape_.empty()) throw DimensionError("take_rows on empty tensor");
  std::size_t row_len = data_.size() / shape_[0];
  std::vector<std::size_t> out_shape = shape_;
  out_shape[0] = rows.size();
  Tensor t(out_shape);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= shape_[0]) throw DimensionError("row index out of range");
    std::memcpy(t.data() + r * row_len, data_.data() + rows[r] * row_len, row_len * sizeof(double));
  }
  return t;
}

Tensor Tensor::slice_rows(std::size_t begin, std::size_t end) const {
  if (shape_.empty() || begin >= end || end > shape_[0]) {
    throw DimensionError("invalid row slice [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                         shape_str());
  }
  std::size_t row_len = data_.size() / shape_[0];
  std::vector<std::size_t> out_shape = shape_;
  out_shape[0] = end - begin;
  Tensor t(out_shape);
  std::memcpy(t.data(), data_.data() + begin * row_len, (end - begin) * row_len * sizeof(double));
  return t;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (!same_shape(other)) throw DimensionError("shape mismatch " + shape_str() + " vs " + other.shape_str());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (!same_shape(other)) throw DimensionError("shape mismatch " + shape_str() + " vs " + other.shape_str());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Tensor Tensor::operator+(const Tensor& other) const {
  Tensor t = *this;
  t += other;
  return t;
}

Tensor Tensor::operator-(const Tensor& other) const {
  Tensor t = *this;
  t -= other;
  return t;
}

Tensor Tensor::operator*(double s) const {
  Tensor t = *this;
  t *= s;
  return t;
}

void Tensor::axpy(double alpha, const Tensor& other) {
  if (!same_shape(other)) throw DimensionError("shape mismatch " + shape_str() + " vs " + other.shape_str());
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

void Tensor::fill(double value) {
  for (double& v : data_) v = value;
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::uint64_t Tensor::content_hash() const {
  std::uint64_t h = fnv1a64(shape_.data(), shape_.size() * sizeof(std::size_t));
  return fnv1a64(data_.data(), data_.size() * sizeof(double), h);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul shape mismatch: " + a.shape_str() + " x " + b.shape_str());
  }
  Tensor out({a.dim(0), b.dim(1)});
  ConstMap ma(a.data(), static_cast<Eigen::Index>(a.dim(0)), static_cast<Eigen::Index>(a.dim(1)));
  ConstMap mb(b.data(), static_cast<Eigen::Index>(b.dim(0)), static_cast<Eigen::Index>(b.dim(1)));
  MutMap mo(out.data(), static_cast<Eigen::Index>(out.dim(0)), static_cast<Eigen::Index>(out.dim(1)));
  mo.noalias() = ma * mb;
  return out;
}

double frobenius_norm(const Tensor& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

double dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw DimensionError("dot size mismatch: " + a.shape_str() + " vs " + b.shape_str());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::uint64_t fnv1a64(const void* bytes, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) { return fnv1a64(s.data(), s.size(), seed); }

std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the xor-combination
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace forgetlab

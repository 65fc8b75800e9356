#include "forgetlab/nn/loss.hpp"

#include <cmath>

#include "forgetlab/error.hpp"

namespace forgetlab::nn {

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw DimensionError("softmax expects rank-2 logits, got " + logits.shape_str());
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  Tensor p(logits.shape());
  for (std::size_t i = 0; i < n; ++i) {
    double mx = logits(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, logits(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double e = std::exp(logits(i, j) - mx);
      p(i, j) = e;
      z += e;
    }
    for (std::size_t j = 0; j < k; ++j) p(i, j) /= z;
  }
  return p;
}

LossResult softmax_cross_entropy(const Tensor& logits, const Labels& labels) {
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (labels.count() != n) {
    throw DimensionError("label count " + std::to_string(labels.count()) + " does not match batch " +
                         std::to_string(n));
  }
  if (labels.is_soft && labels.soft.dim(1) != k) {
    throw DimensionError("soft label width " + std::to_string(labels.soft.dim(1)) + " does not match logits " +
                         logits.shape_str());
  }

  LossResult out;
  out.dlogits = Tensor(logits.shape());
  double total = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = logits(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, logits(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(logits(i, j) - mx);
    double logz = std::log(z) + mx;

    if (labels.is_soft) {
      for (std::size_t j = 0; j < k; ++j) {
        double y = labels.soft(i, j);
        double p = std::exp(logits(i, j) - logz);
        total += y * (logz - logits(i, j));
        out.dlogits(i, j) = (p - y) * inv_n;
      }
    } else {
      int y = labels.hard[i];
      if (y < 0 || static_cast<std::size_t>(y) >= k) {
        throw DataError("label " + std::to_string(y) + " out of range for " + std::to_string(k) + " classes");
      }
      total += logz - logits(i, static_cast<std::size_t>(y));
      for (std::size_t j = 0; j < k; ++j) {
        double p = std::exp(logits(i, j) - logz);
        out.dlogits(i, j) = (p - ((static_cast<std::size_t>(y) == j) ? 1.0 : 0.0)) * inv_n;
      }
    }
  }
  out.loss = total * inv_n;
  return out;
}

}  // namespace forgetlab::nn

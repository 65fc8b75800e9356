#pragma once

#include "forgetlab/labels.hpp"
#include "forgetlab/tensor.hpp"

namespace forgetlab::nn {

/// Mean softmax cross-entropy over the batch, with the gradient w.r.t. the
/// logits. Accepts hard or soft targets.
struct LossResult {
  double loss = 0.0;
  Tensor dlogits;
};

LossResult softmax_cross_entropy(const Tensor& logits, const Labels& labels);

/// Row-wise softmax probabilities.
Tensor softmax(const Tensor& logits);

}  // namespace forgetlab::nn

#include "forgetlab/nn/train.hpp"

#include <cmath>
#include <limits>

#include "forgetlab/error.hpp"

namespace forgetlab::nn {

std::vector<double> run_epochs(const data::Dataset& train, std::size_t epochs, std::size_t batch_size,
                               Rng& shuffle_rng, const StepFn& step, const EpochHook& on_epoch) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<double> losses;
  losses.reserve(epochs);
  const std::size_t n = train.count();
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    auto order = shuffle_rng.permutation(n);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      std::size_t end = std::min(n, start + batch_size);
      std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      Tensor x = train.inputs.take_rows(rows);
      Labels y = train.labels.take(rows);
      total += step(x, y);
      ++batches;
    }
    double mean = batches ? total / static_cast<double>(batches) : 0.0;
    losses.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return losses;
}

std::vector<int> predict(Model& model, const data::Dataset& ds, std::size_t batch_size) {
  std::vector<int> out;
  out.reserve(ds.count());
  for (std::size_t start = 0; start < ds.count(); start += batch_size) {
    std::size_t end = std::min(ds.count(), start + batch_size);
    Tensor x = ds.inputs.slice_rows(start, end);
    Tensor logits = model.forward(x).logits;
    for (std::size_t i = 0; i < logits.dim(0); ++i) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < logits.dim(1); ++j) {
        if (logits(i, j) > logits(i, best)) best = j;
      }
      out.push_back(static_cast<int>(best));
    }
  }
  return out;
}

namespace {
int true_label(const data::Dataset& ds, std::size_t i) {
  if (!ds.labels.is_soft) return ds.labels.hard[i];
  std::size_t best = 0;
  for (std::size_t j = 1; j < ds.labels.soft.dim(1); ++j) {
    if (ds.labels.soft(i, j) > ds.labels.soft(i, best)) best = j;
  }
  return static_cast<int>(best);
}
}  // namespace

double accuracy(Model& model, const data::Dataset& ds, std::size_t batch_size) {
  auto preds = predict(model, ds, batch_size);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == true_label(ds, i)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

std::vector<double> per_class_true_positive(Model& model, const data::Dataset& ds, std::size_t batch_size) {
  auto preds = predict(model, ds, batch_size);
  std::size_t k = ds.class_count();
  std::vector<double> hits(k, 0.0), totals(k, 0.0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    int y = true_label(ds, i);
    totals[static_cast<std::size_t>(y)] += 1.0;
    if (preds[i] == y) hits[static_cast<std::size_t>(y)] += 1.0;
  }
  std::vector<double> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c] = totals[c] > 0.0 ? hits[c] / totals[c] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace forgetlab::nn

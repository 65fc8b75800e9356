#pragma once

#include <functional>
#include <vector>

#include "forgetlab/data/dataset.hpp"
#include "forgetlab/nn/model.hpp"
#include "forgetlab/rng.hpp"

namespace forgetlab::nn {

using StepFn = std::function<double(const Tensor& x, const Labels& y)>;
using EpochHook = std::function<void(std::size_t epoch, double mean_loss)>;

/// Shuffled mini-batch epochs; data order reshuffled once per epoch from
/// `shuffle_rng`. Returns the mean loss per epoch.
std::vector<double> run_epochs(const data::Dataset& train, std::size_t epochs, std::size_t batch_size,
                               Rng& shuffle_rng, const StepFn& step, const EpochHook& on_epoch = {});

/// Argmax predictions, evaluated in batches.
std::vector<int> predict(Model& model, const data::Dataset& ds, std::size_t batch_size = 256);

double accuracy(Model& model, const data::Dataset& ds, std::size_t batch_size = 256);

/// Per-class true-positive fraction; NaN marks classes absent from the
/// evaluation set (undefined, not zero).
std::vector<double> per_class_true_positive(Model& model, const data::Dataset& ds, std::size_t batch_size = 256);

}  // namespace forgetlab::nn

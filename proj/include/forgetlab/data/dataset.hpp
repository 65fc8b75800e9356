#pragma once

#include <string>
#include <vector>

#include "forgetlab/labels.hpp"
#include "forgetlab/tensor.hpp"

namespace forgetlab::data {

/// Immutable-by-convention labeled examples. Inputs are (n x input shape);
/// labels are hard ints or soft rows.
struct Dataset {
  Tensor inputs;
  Labels labels;
  std::vector<std::string> class_names;
  std::string split;  // "train" | "test"

  std::size_t count() const { return inputs.empty() ? 0 : inputs.dim(0); }
  std::size_t class_count() const;
  void validate() const;
  std::uint64_t fingerprint() const;

  Dataset take(const std::vector<std::size_t>& rows) const;
};

enum class HeadMode { multi_head, single_head };

std::string to_string(HeadMode m);

/// Two sequential tasks, each with a train/test pair.
struct TaskPair {
  Dataset train1, test1, train2, test2;
  HeadMode head_mode = HeadMode::multi_head;
  std::string description;
};

/// Per-channel (rank-4) or per-feature (rank-2) normalization constants.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

NormStats compute_norm_stats(const Dataset& ds);
Dataset standardize(const Dataset& ds, const NormStats& stats);

}  // namespace forgetlab::data

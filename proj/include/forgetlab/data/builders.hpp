#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forgetlab/data/cifar.hpp"
#include "forgetlab/data/dataset.hpp"
#include "forgetlab/rng.hpp"

namespace forgetlab::data {

Tensor concat_rows(const Tensor& a, const Tensor& b);

/// Split a base dataset's classes into two disjoint sequential tasks with
/// per-task label indices 0..k-1 (multi-head). Standardization constants come
/// from the task-1 train subset and are reused everywhere.
TaskPair make_split_task(const Dataset& train_base, const Dataset& test_base, const std::vector<int>& classes1,
                         const std::vector<int>& classes2, bool standardize_inputs = true);

/// Single-head superclass task whose inputs shift between subclass sets.
struct SuperclassShiftSpec {
  std::vector<std::string> superclasses;              // shared label space, in order
  std::vector<std::vector<std::string>> subclasses1;  // per superclass, task-1 fine classes
  std::vector<std::vector<std::string>> subclasses2;
};

TaskPair make_superclass_shift_task(const Cifar100Data& train, const Cifar100Data& test,
                                    const SuperclassShiftSpec& spec, bool standardize_inputs = true);

/// Append a pool of foreign images under one new "other" label.
Dataset add_other_category(const Dataset& task1, const Dataset& pool);

/// Convex combination of two same-shape datasets under a seeded random
/// pairing; labels become soft rows.
Dataset mixup_interpolate(const Dataset& d1, const Dataset& d2, double lambda, Rng& rng);
/// Pairing-explicit variant: pairs (i, pairing[i]).
Dataset mixup_with_pairing(const Dataset& d1, const Dataset& d2, double lambda,
                           const std::vector<std::size_t>& pairing);

/// Gaussian-cluster classification tasks with controllable inter-task
/// similarity. Class means live in a low-dimensional latent subspace spanned
/// by a shared basis; task 2 reuses that subspace (shifted means), an
/// orthogonal one, or the exact task-1 means.
struct SynthTaskConfig {
  std::size_t dims = 32;  // flat input dimension (ignored in image mode)
  bool image = false;
  std::size_t channels = 3;
  std::size_t height = 16;
  std::size_t width = 16;

  std::size_t classes = 4;
  std::size_t modes_per_class = 2;  // 2 = antipodal pair per class
  std::size_t train_per_class = 96;
  std::size_t test_per_class = 48;

  double separation = 3.0;
  double noise = 1.0;
  std::size_t latent_dim = 8;

  enum class Relation { identical, shifted, orthogonal };
  Relation relation = Relation::shifted;
  double task_shift = 1.0;  // 0 under 'shifted' reproduces task-1 means

  HeadMode head_mode = HeadMode::multi_head;

  std::size_t input_dim() const { return image ? channels * height * width : dims; }
  void validate() const;
};

SynthTaskConfig::Relation synth_relation_from_string(const std::string& s);
std::string to_string(SynthTaskConfig::Relation r);

TaskPair synth_cluster_task(const SynthTaskConfig& cfg, Rng& rng);

}  // namespace forgetlab::data

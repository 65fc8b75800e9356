#pragma once

#include <string>
#include <vector>

#include "forgetlab/data/dataset.hpp"

namespace forgetlab::data {

/// CIFAR-10 binary batch: records of 1 label byte + 3072 pixel bytes
/// (32x32x3, channel-major R,G,B). Pixels are scaled to [0,1]; labels keep
/// the file's class indices. Standardization is applied later, at task
/// assembly, with constants from the task-1 train split.
Dataset load_cifar10(const std::string& path, const std::string& split);

/// CIFAR-100 binary batch: coarse label byte + fine label byte + 3072 pixels.
struct Cifar100Data {
  Tensor inputs;  // n x 3 x 32 x 32, [0,1]
  std::vector<int> coarse;
  std::vector<int> fine;
  std::string split;

  std::size_t count() const { return inputs.empty() ? 0 : inputs.dim(0); }
};

Cifar100Data load_cifar100(const std::string& path, const std::string& split);

const std::vector<std::string>& cifar10_class_names();
const std::vector<std::string>& cifar100_fine_names();
const std::vector<std::string>& cifar100_coarse_names();

int cifar10_class_index(const std::string& name);
int cifar100_fine_index(const std::string& name);
int cifar100_coarse_index(const std::string& name);

}  // namespace forgetlab::data

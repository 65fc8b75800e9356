#pragma once

#include <vector>

#include "forgetlab/tensor.hpp"

namespace forgetlab {

/// Classification targets: hard integer labels or a soft row-stochastic
/// matrix (one row per example), e.g. for mixup-interpolated data.
struct Labels {
  std::vector<int> hard;
  Tensor soft;  // n x k when is_soft
  bool is_soft = false;

  static Labels from_hard(std::vector<int> ys) {
    Labels l;
    l.hard = std::move(ys);
    return l;
  }
  static Labels from_soft(Tensor rows) {
    Labels l;
    l.soft = std::move(rows);
    l.is_soft = true;
    return l;
  }

  std::size_t count() const { return is_soft ? soft.dim(0) : hard.size(); }

  Labels take(const std::vector<std::size_t>& rows) const {
    Labels out;
    out.is_soft = is_soft;
    if (is_soft) {
      out.soft = soft.take_rows(rows);
    } else {
      out.hard.reserve(rows.size());
      for (auto r : rows) out.hard.push_back(hard[r]);
    }
    return out;
  }
};

}  // namespace forgetlab

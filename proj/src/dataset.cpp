#include "forgetlab/data/dataset.hpp"

#include <cmath>

#include "forgetlab/error.hpp"

namespace forgetlab::data {

std::size_t Dataset::class_count() const {
  if (labels.is_soft) return labels.soft.dim(1);
  if (!class_names.empty()) return class_names.size();
  int mx = -1;
  for (int y : labels.hard) mx = std::max(mx, y);
  return static_cast<std::size_t>(mx + 1);
}

void Dataset::validate() const {
  if (inputs.empty()) throw DataError("dataset has no examples");
  if (labels.count() != count()) {
    throw DataError("dataset has " + std::to_string(count()) + " inputs but " + std::to_string(labels.count()) +
                    " labels");
  }
  if (labels.is_soft) {
    for (std::size_t i = 0; i < labels.soft.dim(0); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < labels.soft.dim(1); ++j) s += labels.soft(i, j);
      if (std::abs(s - 1.0) > 1e-9) throw DataError("soft label row " + std::to_string(i) + " does not sum to 1");
    }
  } else {
    std::size_t k = class_count();
    for (int y : labels.hard) {
      if (y < 0 || static_cast<std::size_t>(y) >= k) {
        throw DataError("hard label " + std::to_string(y) + " out of range [0, " + std::to_string(k) + ")");
      }
    }
  }
  if (split != "train" && split != "test") throw DataError("dataset split must be 'train' or 'test'");
}

std::uint64_t Dataset::fingerprint() const {
  std::uint64_t h = inputs.content_hash();
  if (labels.is_soft) {
    h = hash_mix(h, labels.soft.content_hash());
  } else {
    h = fnv1a64(labels.hard.data(), labels.hard.size() * sizeof(int), h);
  }
  return h;
}

Dataset Dataset::take(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.inputs = inputs.take_rows(rows);
  out.labels = labels.take(rows);
  out.class_names = class_names;
  out.split = split;
  return out;
}

std::string to_string(HeadMode m) { return m == HeadMode::multi_head ? "multi-head" : "single-head"; }

NormStats compute_norm_stats(const Dataset& ds) {
  const Tensor& x = ds.inputs;
  NormStats st;
  std::size_t groups = (x.rank() == 4) ? x.dim(1) : x.dim(1);
  st.mean.assign(groups, 0.0);
  st.stddev.assign(groups, 0.0);

  if (x.rank() == 4) {
    std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
    std::vector<double> cnt(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double* p = x.data() + (i * c + ch) * plane;
        for (std::size_t k = 0; k < plane; ++k) {
          st.mean[ch] += p[k];
          cnt[ch] += 1.0;
        }
      }
    }
    for (std::size_t ch = 0; ch < c; ++ch) st.mean[ch] /= cnt[ch];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double* p = x.data() + (i * c + ch) * plane;
        for (std::size_t k = 0; k < plane; ++k) {
          double d = p[k] - st.mean[ch];
          st.stddev[ch] += d * d;
        }
      }
    }
    for (std::size_t ch = 0; ch < c; ++ch) {
      st.stddev[ch] = std::sqrt(st.stddev[ch] / cnt[ch]);
      if (st.stddev[ch] < 1e-12) st.stddev[ch] = 1.0;
    }
  } else if (x.rank() == 2) {
    std::size_t n = x.dim(0), d = x.dim(1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) st.mean[j] += x(i, j);
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double dd = x(i, j) - st.mean[j];
        st.stddev[j] += dd * dd;
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      st.stddev[j] = std::sqrt(st.stddev[j] / static_cast<double>(n));
      if (st.stddev[j] < 1e-12) st.stddev[j] = 1.0;
    }
  } else {
    throw DimensionError("normalization expects rank-2 or rank-4 inputs, got " + x.shape_str());
  }
  return st;
}

Dataset standardize(const Dataset& ds, const NormStats& stats) {
  Dataset out = ds;
  Tensor& x = out.inputs;
  if (x.rank() == 4) {
    std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
    if (stats.mean.size() != c) throw DimensionError("normalization stats do not match channel count");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        double* p = x.data() + (i * c + ch) * plane;
        for (std::size_t k = 0; k < plane; ++k) p[k] = (p[k] - stats.mean[ch]) / stats.stddev[ch];
      }
    }
  } else if (x.rank() == 2) {
    std::size_t n = x.dim(0), d = x.dim(1);
    if (stats.mean.size() != d) throw DimensionError("normalization stats do not match feature count");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) x(i, j) = (x(i, j) - stats.mean[j]) / stats.stddev[j];
  } else {
    throw DimensionError("standardize expects rank-2 or rank-4 inputs");
  }
  return out;
}

}  // namespace forgetlab::data

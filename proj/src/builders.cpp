#include "forgetlab/data/builders.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <set>

#include "forgetlab/error.hpp"

namespace forgetlab::data {

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  auto sa = a.shape(), sb = b.shape();
  if (sa.size() != sb.size()) throw DimensionError("concat rank mismatch");
  for (std::size_t i = 1; i < sa.size(); ++i) {
    if (sa[i] != sb[i]) throw DimensionError("concat shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
  sa[0] += sb[0];
  Tensor out(sa);
  std::memcpy(out.data(), a.data(), a.size() * sizeof(double));
  std::memcpy(out.data() + a.size(), b.data(), b.size() * sizeof(double));
  return out;
}

namespace {

Dataset filter_relabel(const Dataset& base, const std::vector<int>& classes, const std::string& split) {
  std::map<int, int> remap;
  for (std::size_t i = 0; i < classes.size(); ++i) remap[classes[i]] = static_cast<int>(i);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < base.count(); ++i) {
    if (remap.count(base.labels.hard[i])) rows.push_back(i);
  }
  if (rows.empty()) throw ConfigError("class selection matches no examples");
  Dataset out = base.take(rows);
  for (auto& y : out.labels.hard) y = remap.at(y);
  out.class_names.clear();
  for (int c : classes) {
    out.class_names.push_back(c < static_cast<int>(base.class_names.size()) ? base.class_names[c]
                                                                            : "class" + std::to_string(c));
  }
  out.split = split;
  return out;
}

}  // namespace

TaskPair make_split_task(const Dataset& train_base, const Dataset& test_base, const std::vector<int>& classes1,
                         const std::vector<int>& classes2, bool standardize_inputs) {
  if (classes1.empty() || classes2.empty()) throw ConfigError("split task needs non-empty class lists");
  std::set<int> s1(classes1.begin(), classes1.end()), s2(classes2.begin(), classes2.end());
  if (s1.size() != classes1.size() || s2.size() != classes2.size()) {
    throw ConfigError("split task class lists contain duplicates");
  }
  for (int c : classes1) {
    if (s2.count(c)) throw ConfigError("split task class lists overlap on class " + std::to_string(c));
  }
  std::size_t base_classes = train_base.class_count();
  for (int c : classes1) {
    if (c < 0 || static_cast<std::size_t>(c) >= base_classes) throw ConfigError("class index out of range");
  }
  for (int c : classes2) {
    if (c < 0 || static_cast<std::size_t>(c) >= base_classes) throw ConfigError("class index out of range");
  }

  TaskPair tp;
  tp.train1 = filter_relabel(train_base, classes1, "train");
  tp.test1 = filter_relabel(test_base, classes1, "test");
  tp.train2 = filter_relabel(train_base, classes2, "train");
  tp.test2 = filter_relabel(test_base, classes2, "test");
  tp.head_mode = HeadMode::multi_head;
  tp.description = "split task";

  if (standardize_inputs) {
    NormStats stats = compute_norm_stats(tp.train1);
    tp.train1 = standardize(tp.train1, stats);
    tp.test1 = standardize(tp.test1, stats);
    tp.train2 = standardize(tp.train2, stats);
    tp.test2 = standardize(tp.test2, stats);
  }
  return tp;
}

namespace {

Dataset superclass_subset(const Cifar100Data& src, const SuperclassShiftSpec& spec,
                          const std::vector<std::vector<std::string>>& subclasses, const std::string& split,
                          const std::map<int, int>& fine_to_coarse) {
  // fine index -> task label
  std::map<int, int> fine_to_label;
  for (std::size_t s = 0; s < spec.superclasses.size(); ++s) {
    int coarse = cifar100_coarse_index(spec.superclasses[s]);
    for (const auto& fname : subclasses[s]) {
      int fine = cifar100_fine_index(fname);
      auto it = fine_to_coarse.find(fine);
      if (it == fine_to_coarse.end()) {
        throw ConfigError("subclass '" + fname + "' does not appear in the provided data");
      }
      if (it->second != coarse) {
        throw ConfigError("subclass '" + fname + "' does not belong to superclass '" + spec.superclasses[s] + "'");
      }
      fine_to_label[fine] = static_cast<int>(s);
    }
  }

  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < src.count(); ++i) {
    auto it = fine_to_label.find(src.fine[i]);
    if (it != fine_to_label.end()) {
      rows.push_back(i);
      labels.push_back(it->second);
    }
  }
  if (rows.empty()) throw ConfigError("superclass selection matches no examples");

  Dataset out;
  out.inputs = src.inputs.take_rows(rows);
  out.labels = Labels::from_hard(std::move(labels));
  out.class_names = spec.superclasses;
  out.split = split;
  return out;
}

}  // namespace

TaskPair make_superclass_shift_task(const Cifar100Data& train, const Cifar100Data& test,
                                    const SuperclassShiftSpec& spec, bool standardize_inputs) {
  if (spec.superclasses.empty()) throw ConfigError("superclass shift needs at least one superclass");
  if (spec.subclasses1.size() != spec.superclasses.size() || spec.subclasses2.size() != spec.superclasses.size()) {
    throw ConfigError("subclass lists must align with the superclass list");
  }

  // observed fine->coarse pairing; the data defines membership
  std::map<int, int> fine_to_coarse;
  for (std::size_t i = 0; i < train.count(); ++i) {
    auto [it, inserted] = fine_to_coarse.emplace(train.fine[i], train.coarse[i]);
    if (!inserted && it->second != train.coarse[i]) {
      throw FormatError("fine label " + std::to_string(train.fine[i]) + " maps to multiple coarse labels");
    }
  }
  for (std::size_t i = 0; i < test.count(); ++i) fine_to_coarse.emplace(test.fine[i], test.coarse[i]);

  TaskPair tp;
  tp.train1 = superclass_subset(train, spec, spec.subclasses1, "train", fine_to_coarse);
  tp.test1 = superclass_subset(test, spec, spec.subclasses1, "test", fine_to_coarse);
  tp.train2 = superclass_subset(train, spec, spec.subclasses2, "train", fine_to_coarse);
  tp.test2 = superclass_subset(test, spec, spec.subclasses2, "test", fine_to_coarse);
  tp.head_mode = HeadMode::single_head;
  tp.description = "superclass distribution shift";

  if (standardize_inputs) {
    NormStats stats = compute_norm_stats(tp.train1);
    tp.train1 = standardize(tp.train1, stats);
    tp.test1 = standardize(tp.test1, stats);
    tp.train2 = standardize(tp.train2, stats);
    tp.test2 = standardize(tp.test2, stats);
  }
  return tp;
}

Dataset add_other_category(const Dataset& task1, const Dataset& pool) {
  if (!task1.class_names.empty() && !pool.class_names.empty()) {
    std::set<std::string> used;
    std::set<int> pool_present(pool.labels.hard.begin(), pool.labels.hard.end());
    for (const auto& n : task1.class_names) used.insert(n);
    for (int c : pool_present) {
      if (c >= 0 && static_cast<std::size_t>(c) < pool.class_names.size() && used.count(pool.class_names[c])) {
        throw ConfigError("pool class '" + pool.class_names[c] + "' overlaps the task classes");
      }
    }
  }
  if (pool.count() > 0 && !pool.inputs.empty()) {
    auto st = task1.inputs.shape();
    auto sp = pool.inputs.shape();
    st[0] = sp[0] = 0;
    if (st != sp) throw DimensionError("pool input shape does not match task inputs");
  }

  Dataset out;
  int other = static_cast<int>(task1.class_count());
  out.inputs = pool.count() > 0 ? concat_rows(task1.inputs, pool.inputs) : task1.inputs;
  out.labels.hard = task1.labels.hard;
  out.labels.hard.insert(out.labels.hard.end(), pool.count(), other);
  out.class_names = task1.class_names;
  out.class_names.push_back("other");
  out.split = task1.split;
  return out;
}

Dataset mixup_with_pairing(const Dataset& d1, const Dataset& d2, double lambda,
                           const std::vector<std::size_t>& pairing) {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("mixup lambda must be in [0, 1]");
  auto s1 = d1.inputs.shape(), s2 = d2.inputs.shape();
  s1[0] = s2[0] = 0;
  if (s1 != s2) throw DimensionError("mixup input shapes differ");
  std::size_t k1 = d1.class_count(), k2 = d2.class_count();
  if (k1 != k2) throw DimensionError("mixup label spaces differ (" + std::to_string(k1) + " vs " + std::to_string(k2) + ")");
  std::size_t n = pairing.size();
  if (n > d1.count()) throw DimensionError("pairing longer than first dataset");

  auto soft_row = [](const Dataset& d, std::size_t i, std::size_t k, std::vector<double>& row) {
    std::fill(row.begin(), row.end(), 0.0);
    if (d.labels.is_soft) {
      for (std::size_t j = 0; j < k; ++j) row[j] = d.labels.soft(i, j);
    } else {
      row[static_cast<std::size_t>(d.labels.hard[i])] = 1.0;
    }
  };

  std::size_t per = d1.inputs.size() / d1.count();
  std::vector<std::size_t> shape = d1.inputs.shape();
  shape[0] = n;
  Dataset out;
  out.inputs = Tensor(shape);
  out.labels.is_soft = true;
  out.labels.soft = Tensor({n, k1});
  std::vector<double> row1(k1), row2(k1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = pairing[i];
    if (j >= d2.count()) throw DimensionError("pairing index out of range");
    const double* x1 = d1.inputs.data() + i * per;
    const double* x2 = d2.inputs.data() + j * per;
    double* dst = out.inputs.data() + i * per;
    for (std::size_t p = 0; p < per; ++p) dst[p] = lambda * x2[p] + (1.0 - lambda) * x1[p];
    soft_row(d1, i, k1, row1);
    soft_row(d2, j, k1, row2);
    for (std::size_t c = 0; c < k1; ++c) out.labels.soft(i, c) = lambda * row2[c] + (1.0 - lambda) * row1[c];
  }
  out.class_names = d1.class_names;
  out.split = "train";
  return out;
}

Dataset mixup_interpolate(const Dataset& d1, const Dataset& d2, double lambda, Rng& rng) {
  std::size_t n = std::min(d1.count(), d2.count());
  std::vector<std::size_t> pairing = rng.permutation(d2.count());
  pairing.resize(n);
  return mixup_with_pairing(d1, d2, lambda, pairing);
}

// ----------------------------------------------------------------- synth

void SynthTaskConfig::validate() const {
  if (classes < 2) throw ConfigError("synth task needs at least 2 classes");
  if (modes_per_class == 0 || modes_per_class > 2) throw ConfigError("synth modes_per_class must be 1 or 2");
  if (train_per_class == 0 || test_per_class == 0) throw ConfigError("synth per-class counts must be positive");
  if (latent_dim == 0 || latent_dim * 2 > input_dim()) {
    throw ConfigError("synth latent_dim must satisfy 2*latent_dim <= input dimension");
  }
  if (separation <= 0.0 || noise < 0.0) throw ConfigError("synth separation must be positive, noise non-negative");
  if (task_shift < 0.0) throw ConfigError("synth task_shift must be non-negative");
}

SynthTaskConfig::Relation synth_relation_from_string(const std::string& s) {
  if (s == "identical") return SynthTaskConfig::Relation::identical;
  if (s == "shifted") return SynthTaskConfig::Relation::shifted;
  if (s == "orthogonal") return SynthTaskConfig::Relation::orthogonal;
  throw ConfigError("unknown synth relation '" + s + "' (expected identical | shifted | orthogonal)");
}

std::string to_string(SynthTaskConfig::Relation r) {
  switch (r) {
    case SynthTaskConfig::Relation::identical:
      return "identical";
    case SynthTaskConfig::Relation::shifted:
      return "shifted";
    case SynthTaskConfig::Relation::orthogonal:
      return "orthogonal";
  }
  return "?";
}

namespace {

// Orthonormal columns via modified Gram-Schmidt over smooth seed vectors.
// In image mode the seeds are low-frequency 2-D cosine patterns, so cluster
// means look like smooth textures and convolutional stages can share filters
// across tasks.
std::vector<std::vector<double>> make_basis(const SynthTaskConfig& cfg, std::size_t count, Rng& rng) {
  std::size_t d = cfg.input_dim();
  std::vector<std::vector<double>> cols;
  std::size_t attempts = 0;
  std::size_t freq_index = 0;
  while (cols.size() < count) {
    if (++attempts > count * 20) throw NumericError("failed to build an orthonormal basis");
    std::vector<double> v(d);
    if (cfg.image) {
      std::size_t fy = freq_index % 4, fx = (freq_index / 4) % 4;
      ++freq_index;
      double phase_y = rng.uniform(0.0, 2.0 * M_PI), phase_x = rng.uniform(0.0, 2.0 * M_PI);
      std::vector<double> cw(cfg.channels);
      for (auto& c : cw) c = rng.normal();
      std::size_t i = 0;
      for (std::size_t ch = 0; ch < cfg.channels; ++ch) {
        for (std::size_t y = 0; y < cfg.height; ++y) {
          for (std::size_t x = 0; x < cfg.width; ++x, ++i) {
            double ay = std::cos(2.0 * M_PI * fy * (static_cast<double>(y) / cfg.height) + phase_y);
            double ax = std::cos(2.0 * M_PI * fx * (static_cast<double>(x) / cfg.width) + phase_x);
            v[i] = cw[ch] * ay * ax;
          }
        }
      }
    } else {
      for (auto& e : v) e = rng.normal();
    }
    // orthogonalize against accepted columns
    for (const auto& u : cols) {
      double proj = 0.0;
      for (std::size_t i = 0; i < d; ++i) proj += v[i] * u[i];
      for (std::size_t i = 0; i < d; ++i) v[i] -= proj * u[i];
    }
    double norm = 0.0;
    for (double e : v) norm += e * e;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;
    for (auto& e : v) e /= norm;
    cols.push_back(std::move(v));
  }
  return cols;
}

std::vector<double> unit_latent(std::size_t dim, Rng& rng) {
  std::vector<double> z(dim);
  double norm = 0.0;
  for (auto& e : z) {
    e = rng.normal();
    norm += e * e;
  }
  norm = std::sqrt(std::max(norm, 1e-12));
  for (auto& e : z) e /= norm;
  return z;
}

Dataset sample_clusters(const SynthTaskConfig& cfg, const std::vector<std::vector<double>>& means,
                        std::size_t per_class, const std::string& split, Rng& rng) {
  std::size_t d = cfg.input_dim();
  std::size_t n = cfg.classes * per_class;
  std::vector<std::size_t> shape =
      cfg.image ? std::vector<std::size_t>{n, cfg.channels, cfg.height, cfg.width} : std::vector<std::size_t>{n, d};
  Dataset out;
  out.inputs = Tensor(shape);
  out.labels.hard.resize(n);
  std::size_t row = 0;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    for (std::size_t s = 0; s < per_class; ++s, ++row) {
      std::size_t mode = (cfg.modes_per_class == 1) ? 0 : (s % 2);
      double sign = (mode == 0) ? 1.0 : -1.0;
      const auto& mean = means[c];
      double* dst = out.inputs.data() + row * d;
      for (std::size_t i = 0; i < d; ++i) dst[i] = sign * mean[i] + cfg.noise * rng.normal();
      out.labels.hard[row] = static_cast<int>(c);
    }
  }
  for (std::size_t c = 0; c < cfg.classes; ++c) out.class_names.push_back("c" + std::to_string(c));
  out.split = split;
  return out;
}

}  // namespace

TaskPair synth_cluster_task(const SynthTaskConfig& cfg, Rng& rng) {
  cfg.validate();
  Rng basis_rng = rng.scope("basis");
  Rng latent_rng = rng.scope("latents");
  Rng sample_rng = rng.scope("samples");

  auto basis = make_basis(cfg, 2 * cfg.latent_dim, basis_rng);
  std::size_t d = cfg.input_dim();

  auto lift = [&](const std::vector<double>& z, std::size_t offset) {
    std::vector<double> x(d, 0.0);
    for (std::size_t k = 0; k < cfg.latent_dim; ++k) {
      const auto& col = basis[offset + k];
      for (std::size_t i = 0; i < d; ++i) x[i] += cfg.separation * z[k] * col[i];
    }
    return x;
  };

  std::vector<std::vector<double>> means1, means2;
  std::vector<std::vector<double>> latents1;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    latents1.push_back(unit_latent(cfg.latent_dim, latent_rng));
    means1.push_back(lift(latents1.back(), 0));
  }
  switch (cfg.relation) {
    case SynthTaskConfig::Relation::identical:
      means2 = means1;
      break;
    case SynthTaskConfig::Relation::shifted:
      for (std::size_t c = 0; c < cfg.classes; ++c) {
        auto delta = unit_latent(cfg.latent_dim, latent_rng);
        std::vector<double> z(cfg.latent_dim);
        double norm = 0.0;
        for (std::size_t k = 0; k < cfg.latent_dim; ++k) {
          z[k] = latents1[c][k] + cfg.task_shift * delta[k];
          norm += z[k] * z[k];
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (auto& e : z) e /= norm;
        means2.push_back(lift(z, 0));
      }
      break;
    case SynthTaskConfig::Relation::orthogonal:
      for (std::size_t c = 0; c < cfg.classes; ++c) {
        means2.push_back(lift(unit_latent(cfg.latent_dim, latent_rng), cfg.latent_dim));
      }
      break;
  }

  TaskPair tp;
  Rng r1 = sample_rng.scope("task1"), r2 = sample_rng.scope("task2");
  tp.train1 = sample_clusters(cfg, means1, cfg.train_per_class, "train", r1);
  tp.test1 = sample_clusters(cfg, means1, cfg.test_per_class, "test", r1);
  tp.train2 = sample_clusters(cfg, means2, cfg.train_per_class, "train", r2);
  tp.test2 = sample_clusters(cfg, means2, cfg.test_per_class, "test", r2);
  tp.head_mode = cfg.head_mode;
  tp.description = "synthetic clusters (" + to_string(cfg.relation) + ")";
  return tp;
}

}  // namespace forgetlab::data

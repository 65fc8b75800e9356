#include "forgetlab/nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "forgetlab/error.hpp"
#include "forgetlab/nn/loss.hpp"

namespace forgetlab::nn {

void OptimizerConfig::validate() const {
  if (lr <= 0.0) throw ConfigError("optimizer field 'lr' must be positive");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("optimizer field 'momentum' must be in [0, 1)");
  if (weight_decay < 0.0) throw ConfigError("optimizer field 'weight_decay' must be non-negative");
  if (batch_size == 0) throw ConfigError("optimizer field 'batch_size' must be positive");
}

void apply_sgd_update(Tensor& param, const Tensor& grad, Tensor& velocity, const OptimizerConfig& opt) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = opt.momentum * velocity[i] + grad[i];
    param[i] -= opt.lr * velocity[i] + opt.lr * opt.weight_decay * param[i];
  }
}

// ---------------------------------------------------------------- Stage

Tensor Stage::forward(const Tensor& x, bool remember) {
  if (wiring == StageWiring::sequential) {
    Tensor cur = x;
    for (auto& layer : layers) cur = layer->forward(cur, remember);
    return cur;
  }
  // conv_residual: conv, relu, conv (+identity skip), relu, pool
  Tensor a = layers[0]->forward(x, remember);
  Tensor h = layers[1]->forward(a, remember);
  Tensor pre = layers[2]->forward(h, remember);
  pre += h;
  Tensor r = layers[3]->forward(pre, remember);
  return layers[4]->forward(r, remember);
}

Tensor Stage::backward(const Tensor& grad) {
  if (wiring == StageWiring::sequential) {
    Tensor cur = grad;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) cur = (*it)->backward(cur);
    return cur;
  }
  Tensor gr = layers[4]->backward(grad);
  Tensor gpre = layers[3]->backward(gr);
  Tensor gh = layers[2]->backward(gpre);
  gh += gpre;  // skip path
  Tensor ga = layers[1]->backward(gh);
  return layers[0]->backward(ga);
}

void Stage::visit_params(const std::string& prefix, const ParamVisitor& fn) {
  std::map<std::string, int> counts;
  for (auto& layer : layers) {
    std::string kind = layer->kind();
    int ordinal = counts[kind]++;
    std::string base = prefix + "/" + kind + std::to_string(ordinal);
    layer->visit_params([&](const std::string& pname, Tensor& p, Tensor& g, Tensor& v) {
      fn(base + "/" + pname, p, g, v);
    });
  }
}

Stage Stage::clone() const {
  Stage out;
  out.name = name;
  out.trainable = trainable;
  out.wiring = wiring;
  out.layers.reserve(layers.size());
  for (const auto& layer : layers) out.layers.push_back(layer->clone());
  return out;
}

// ---------------------------------------------------------------- Model

namespace {

Stage build_stage(const ArchSpec& spec, std::size_t index, Rng& rng) {
  auto widths = spec.scaled_widths();
  auto fc = spec.scaled_fc_widths();
  Stage st;
  st.name = "stage" + std::to_string(index + 1);

  if (spec.kind == ArchKind::mlp) {
    std::size_t in = (index == 0) ? spec.input_dim : widths[index - 1];
    st.layers.push_back(std::make_unique<DenseLayer>(in, widths[index], rng));
    st.layers.push_back(std::make_unique<ReluLayer>());
    return st;
  }

  if (index < widths.size()) {
    std::size_t in_c = (index == 0) ? spec.in_channels : widths[index - 1];
    std::size_t out_c = widths[index];
    st.wiring = (spec.kind == ArchKind::conv_residual) ? StageWiring::conv_residual : StageWiring::sequential;
    st.layers.push_back(std::make_unique<Conv2dLayer>(in_c, out_c, spec.kernel, rng));
    st.layers.push_back(std::make_unique<ReluLayer>());
    st.layers.push_back(std::make_unique<Conv2dLayer>(out_c, out_c, spec.kernel, rng));
    st.layers.push_back(std::make_unique<ReluLayer>());
    st.layers.push_back(std::make_unique<MaxPool2dLayer>());
    return st;
  }

  // dense stage after the conv stack
  std::size_t fc_index = index - widths.size();
  std::size_t conv_out = widths.back() * (spec.in_height >> widths.size()) * (spec.in_width >> widths.size());
  std::size_t in = (fc_index == 0) ? conv_out : fc[fc_index - 1];
  if (fc_index == 0) st.layers.push_back(std::make_unique<FlattenLayer>());
  st.layers.push_back(std::make_unique<DenseLayer>(in, fc[fc_index], rng));
  st.layers.push_back(std::make_unique<ReluLayer>());
  return st;
}

}  // namespace

Model::Model(ArchSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.validate();
  for (std::size_t i = 0; i < spec_.stage_count(); ++i) stages_.push_back(build_stage(spec_, i, rng));
}

Model build_model(const ArchSpec& spec, Rng& rng) { return Model(spec, rng); }

std::vector<std::string> Model::stage_names() const {
  std::vector<std::string> out;
  out.reserve(stages_.size());
  for (const auto& s : stages_) out.push_back(s.name);
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  const_cast<Model*>(this)->visit_params([&](const std::string&, Tensor& p, Tensor&, Tensor&) { n += p.size(); });
  return n;
}

void Model::attach_head(const std::string& id, std::size_t n_classes, Rng& rng) {
  if (heads_.count(id)) throw StateError("head '" + id + "' already attached");
  if (n_classes == 0) throw ConfigError("head needs at least one class");
  std::size_t nf = head_features();
  Head h;
  h.w = rng.normal_tensor({nf, n_classes}, 0.0, 1.0 / std::sqrt(static_cast<double>(nf)));
  h.b = Tensor::zeros({n_classes});
  h.w_grad = Tensor::zeros(h.w.shape());
  h.b_grad = Tensor::zeros(h.b.shape());
  h.w_vel = Tensor::zeros(h.w.shape());
  h.b_vel = Tensor::zeros(h.b.shape());
  heads_.emplace(id, std::move(h));

  if (task_specific_top_ > 0) {
    // fresh private copies of the top stages for the new task
    std::vector<Stage> priv;
    for (std::size_t i = shared_count(); i < spec_.stage_count(); ++i) {
      priv.push_back(build_stage(spec_, i, rng));
    }
    task_stages_.emplace(id, std::move(priv));
  }
  if (active_head_.empty()) active_head_ = id;
}

void Model::set_active_head(const std::string& id) {
  if (!heads_.count(id)) throw StateError("no head named '" + id + "'");
  active_head_ = id;
}

std::vector<std::string> Model::head_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : heads_) out.push_back(id);
  return out;
}

std::size_t Model::head_classes(const std::string& id) const {
  auto it = heads_.find(id);
  if (it == heads_.end()) throw StateError("no head named '" + id + "'");
  return it->second.classes();
}

std::size_t Model::shared_count() const { return stages_.size(); }

std::vector<Stage*> Model::active_pipeline(const std::string& head_id) {
  std::vector<Stage*> out;
  for (auto& s : stages_) out.push_back(&s);
  if (task_specific_top_ > 0) {
    auto it = task_stages_.find(head_id);
    if (it == task_stages_.end()) throw StateError("no task-specific stages for head '" + head_id + "'");
    for (auto& s : it->second) out.push_back(&s);
  }
  return out;
}

Tensor Model::flatten_rows(const Tensor& t) {
  if (t.rank() == 2) return t;
  return t.reshaped({t.dim(0), t.size() / t.dim(0)});
}

Tensor Model::forward_features(std::vector<Stage*>& pipeline, const Tensor& batch, bool remember,
                               std::map<std::string, Tensor>* capture, const std::vector<std::string>* wanted) {
  Tensor cur = batch;
  for (Stage* stage : pipeline) {
    cur = stage->forward(cur, remember);
    if (capture && wanted &&
        std::find(wanted->begin(), wanted->end(), stage->name) != wanted->end()) {
      (*capture)[stage->name] = flatten_rows(cur);
    }
  }
  return flatten_rows(cur);
}

ForwardResult Model::forward(const Tensor& batch, const std::vector<std::string>& capture) {
  if (active_head_.empty()) throw StateError("forward requires an active head");
  auto pipeline = active_pipeline(active_head_);
  for (const auto& want : capture) {
    bool known = false;
    for (Stage* s : pipeline) known = known || (s->name == want);
    if (!known) throw StateError("unknown stage '" + want + "'");
  }
  ForwardResult out;
  Tensor features = forward_features(pipeline, batch, false, &out.activations, &capture);
  Head& head = heads_.at(active_head_);
  out.logits = matmul(features, head.w);
  for (std::size_t i = 0; i < out.logits.dim(0); ++i)
    for (std::size_t j = 0; j < out.logits.dim(1); ++j) out.logits(i, j) += head.b(j);
  return out;
}

double Model::train_step(const Tensor& batch, const Labels& labels, const OptimizerConfig& opt,
                         const PenaltyTerm* penalty) {
  if (active_head_.empty()) throw StateError("train_step requires an active head");
  HeadRoute route;
  route.head = active_head_;
  route.rows.resize(batch.dim(0));
  for (std::size_t i = 0; i < route.rows.size(); ++i) route.rows[i] = i;
  route.labels = labels;
  return step_impl(batch, {route}, &opt, penalty);
}

double Model::train_step_routed(const Tensor& batch, const std::vector<HeadRoute>& routes, const OptimizerConfig& opt,
                                const PenaltyTerm* penalty) {
  return step_impl(batch, routes, &opt, penalty);
}

double Model::compute_grads(const Tensor& batch, const Labels& labels, const PenaltyTerm* penalty) {
  if (active_head_.empty()) throw StateError("compute_grads requires an active head");
  HeadRoute route;
  route.head = active_head_;
  route.rows.resize(batch.dim(0));
  for (std::size_t i = 0; i < route.rows.size(); ++i) route.rows[i] = i;
  route.labels = labels;
  return step_impl(batch, {route}, nullptr, penalty);
}

double Model::step_impl(const Tensor& batch, const std::vector<HeadRoute>& routes, const OptimizerConfig* opt,
                        const PenaltyTerm* penalty) {
  if (routes.empty()) throw StateError("training step needs at least one head route");
  const bool updating = opt != nullptr;
  if (updating) opt->validate();

  // distinct heads in a routed step require a shared pipeline
  if (routes.size() > 1 && task_specific_top_ > 0) {
    for (const auto& r : routes) {
      if (r.head != routes.front().head) {
        throw StateError("routed steps across heads are not supported on task-specific models");
      }
    }
  }

  std::size_t total_rows = 0;
  for (const auto& r : routes) {
    if (!heads_.count(r.head)) throw StateError("no head named '" + r.head + "'");
    std::size_t classes = heads_.at(r.head).classes();
    if (r.labels.count() != r.rows.size()) throw DataError("route labels do not match route rows");
    if (!r.labels.is_soft) {
      for (int y : r.labels.hard) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
          throw DataError("label " + std::to_string(y) + " out of range for head '" + r.head + "'");
        }
      }
    }
    for (std::size_t row : r.rows) {
      if (row >= batch.dim(0)) throw DataError("route row out of range");
    }
    total_rows += r.rows.size();
  }
  if (total_rows == 0) throw DataError("empty training step");

  visit_params([](const std::string&, Tensor&, Tensor& g, Tensor&) { g.fill(0.0); });

  auto pipeline = active_pipeline(routes.front().head);
  std::size_t lowest_trainable = pipeline.size();
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    if (pipeline[i]->trainable) {
      lowest_trainable = i;
      break;
    }
  }
  bool any_head_trainable = false;
  for (const auto& r : routes) any_head_trainable = any_head_trainable || heads_.at(r.head).trainable;
  const bool need_body_backward = lowest_trainable < pipeline.size();
  const bool need_backward = updating && (need_body_backward || any_head_trainable);
  const bool remember = need_backward || !updating;  // compute_grads always backpropagates

  Tensor pre_flatten;  // last stage output, needed to reshape the feature grad
  Tensor cur = batch;
  for (Stage* stage : pipeline) cur = stage->forward(cur, remember);
  pre_flatten = cur;
  Tensor features = flatten_rows(cur);

  double loss = 0.0;
  Tensor dfeatures(features.shape());
  const double inv_total = 1.0 / static_cast<double>(total_rows);

  for (const auto& r : routes) {
    Head& head = heads_.at(r.head);
    Tensor feats_r = features.take_rows(r.rows);
    Tensor logits = matmul(feats_r, head.w);
    for (std::size_t i = 0; i < logits.dim(0); ++i)
      for (std::size_t j = 0; j < logits.dim(1); ++j) logits(i, j) += head.b(j);

    LossResult lr = softmax_cross_entropy(logits, r.labels);
    double weight = static_cast<double>(r.rows.size()) * inv_total;
    loss += lr.loss * weight;

    if (remember || updating) {
      // rescale from per-route mean to global mean
      lr.dlogits *= static_cast<double>(r.rows.size()) * inv_total;
      head.w_grad += matmul(feats_r.transposed(), lr.dlogits);
      for (std::size_t i = 0; i < lr.dlogits.dim(0); ++i)
        for (std::size_t j = 0; j < lr.dlogits.dim(1); ++j) head.b_grad(j) += lr.dlogits(i, j);
      Tensor dfeat_r = matmul(lr.dlogits, head.w.transposed());
      for (std::size_t i = 0; i < r.rows.size(); ++i) {
        for (std::size_t j = 0; j < dfeatures.dim(1); ++j) dfeatures(r.rows[i], j) += dfeat_r(i, j);
      }
    }
  }

  if (penalty) loss += penalty->value(*this);

  const std::size_t backward_floor = updating ? lowest_trainable : 0;
  if ((need_backward || !updating) && pipeline.size() > 0 && backward_floor < pipeline.size()) {
    Tensor g = dfeatures.reshaped(pre_flatten.shape());
    for (std::size_t i = pipeline.size(); i-- > backward_floor;) {
      g = pipeline[i]->backward(g);
      if (i == backward_floor) break;
    }
  }

  if (penalty) penalty->accumulate(*this);

  if (updating) {
    std::vector<std::string> head_ids;
    for (const auto& r : routes) head_ids.push_back(r.head);
    sgd_update(*opt, head_ids);
  }
  return loss;
}

void Model::sgd_update(const OptimizerConfig& opt, const std::vector<std::string>& heads_in_step) {
  auto apply = [&opt](Tensor& p, Tensor& g, Tensor& v) { apply_sgd_update(p, g, v, opt); };

  for (auto& stage : stages_) {
    if (!stage.trainable) continue;
    stage.visit_params(stage.name, [&](const std::string&, Tensor& p, Tensor& g, Tensor& v) { apply(p, g, v); });
  }
  if (task_specific_top_ > 0) {
    for (const auto& id : heads_in_step) {
      auto it = task_stages_.find(id);
      if (it == task_stages_.end()) continue;
      for (auto& stage : it->second) {
        if (!stage.trainable) continue;
        stage.visit_params(stage.name, [&](const std::string&, Tensor& p, Tensor& g, Tensor& v) { apply(p, g, v); });
      }
    }
  }
  for (const auto& id : heads_in_step) {
    Head& h = heads_.at(id);
    if (!h.trainable) continue;
    apply(h.w, h.w_grad, h.w_vel);
    apply(h.b, h.b_grad, h.b_vel);
  }
}

void Model::set_trainability(const std::function<bool(const std::string&)>& predicate) {
  for (auto& stage : stages_) stage.trainable = predicate(stage.name);
  for (auto& [id, priv] : task_stages_) {
    for (auto& stage : priv) stage.trainable = predicate("task/" + id + "/" + stage.name);
  }
  for (auto& [id, head] : heads_) head.trainable = predicate("head/" + id);
}

void Model::set_stage_trainable(const std::string& stage, bool trainable) {
  for (auto& s : stages_) {
    if (s.name == stage) {
      s.trainable = trainable;
      return;
    }
  }
  throw StateError("unknown stage '" + stage + "'");
}

void Model::set_head_trainable(const std::string& id, bool trainable) {
  auto it = heads_.find(id);
  if (it == heads_.end()) throw StateError("no head named '" + id + "'");
  it->second.trainable = trainable;
}

void Model::set_all_trainable(bool trainable) {
  for (auto& s : stages_) s.trainable = trainable;
  for (auto& [id, priv] : task_stages_)
    for (auto& s : priv) s.trainable = trainable;
  for (auto& [id, head] : heads_) head.trainable = trainable;
}

void Model::freeze_bottom_stages(std::size_t k) {
  if (k > stages_.size()) throw StateError("cannot freeze " + std::to_string(k) + " of " + std::to_string(stages_.size()) + " stages");
  for (std::size_t i = 0; i < stages_.size(); ++i) stages_[i].trainable = (i >= k);
}

bool Model::stage_trainable(const std::string& stage) const {
  for (const auto& s : stages_) {
    if (s.name == stage) return s.trainable;
  }
  throw StateError("unknown stage '" + stage + "'");
}

void Model::visit_params(const ParamVisitor& fn) {
  for (auto& stage : stages_) stage.visit_params(stage.name, fn);
  for (auto& [id, priv] : task_stages_) {
    for (auto& stage : priv) stage.visit_params("task/" + id + "/" + stage.name, fn);
  }
  for (auto& [id, head] : heads_) {
    fn("head/" + id + "/w", head.w, head.w_grad, head.w_vel);
    fn("head/" + id + "/b", head.b, head.b_grad, head.b_vel);
  }
}

void Model::visit_body_params(const ParamVisitor& fn) {
  for (auto& stage : stages_) stage.visit_params(stage.name, fn);
  for (auto& [id, priv] : task_stages_) {
    for (auto& stage : priv) stage.visit_params("task/" + id + "/" + stage.name, fn);
  }
}

void Model::reset_optimizer_state() {
  visit_params([](const std::string&, Tensor&, Tensor&, Tensor& v) { v.fill(0.0); });
}

const Tensor* ParamSnapshot::find(const std::string& name) const {
  for (const auto& [n, t] : entries) {
    if (n == name) return &t;
  }
  return nullptr;
}

ParamSnapshot Model::snapshot(const std::string& label) const {
  ParamSnapshot snap;
  snap.label = label;
  snap.fingerprint = fingerprint();
  const_cast<Model*>(this)->visit_params(
      [&](const std::string& name, Tensor& p, Tensor&, Tensor&) { snap.entries.emplace_back(name, p); });
  return snap;
}

void Model::restore(const ParamSnapshot& snap, const std::vector<std::string>& subset) {
  if (snap.fingerprint != fingerprint()) {
    throw CompatibilityError("snapshot fingerprint does not match model architecture");
  }
  std::map<std::string, Tensor*> params;
  visit_params([&](const std::string& name, Tensor& p, Tensor&, Tensor&) { params[name] = &p; });

  auto selected = [&subset](const std::string& name) {
    if (subset.empty()) return true;
    for (const auto& prefix : subset) {
      if (name == prefix || name.rfind(prefix + "/", 0) == 0) return true;
    }
    return false;
  };

  std::size_t matched = 0;
  for (const auto& [name, value] : snap.entries) {
    if (!selected(name)) continue;
    auto it = params.find(name);
    if (it == params.end()) throw CompatibilityError("snapshot entry '" + name + "' has no matching parameter");
    if (!it->second->same_shape(value)) throw CompatibilityError("snapshot entry '" + name + "' shape mismatch");
    *it->second = value;
    ++matched;
  }
  if (!subset.empty() && matched == 0) throw CompatibilityError("snapshot restore subset matched nothing");
}

void Model::make_task_specific(std::size_t n_top_stages) {
  if (task_specific_top_ > 0) throw StateError("model is already task-specific");
  if (n_top_stages > stages_.size()) {
    throw StateError("cannot make " + std::to_string(n_top_stages) + " of " + std::to_string(stages_.size()) +
                     " stages task-specific");
  }
  task_specific_top_ = n_top_stages;
  if (n_top_stages == 0) return;
  if (heads_.empty()) throw StateError("attach at least one head before making stages task-specific");

  std::vector<Stage> top;
  for (std::size_t i = stages_.size() - n_top_stages; i < stages_.size(); ++i) top.push_back(stages_[i].clone());
  stages_.resize(stages_.size() - n_top_stages);

  bool first = true;
  for (const auto& [id, _] : heads_) {
    if (first) {
      task_stages_.emplace(id, std::move(top));
      first = false;
    } else {
      std::vector<Stage> copy;
      for (const auto& s : task_stages_.begin()->second) copy.push_back(s.clone());
      task_stages_.emplace(id, std::move(copy));
    }
  }
}

}  // namespace forgetlab::nn

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forgetlab/labels.hpp"
#include "forgetlab/nn/arch.hpp"
#include "forgetlab/nn/layers.hpp"
#include "forgetlab/rng.hpp"
#include "forgetlab/tensor.hpp"

namespace forgetlab::nn {

/// SGD with momentum and decoupled weight decay:
///   v <- beta v + g;  p <- p - lr v - lr wd p
struct OptimizerConfig {
  double lr = 0.02;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  std::size_t batch_size = 64;

  void validate() const;
};

/// One momentum-SGD update with decoupled weight decay.
void apply_sgd_update(Tensor& param, const Tensor& grad, Tensor& velocity, const OptimizerConfig& opt);

enum class StageWiring { sequential, conv_residual };

struct Stage {
  std::string name;
  bool trainable = true;
  StageWiring wiring = StageWiring::sequential;
  std::vector<std::unique_ptr<Layer>> layers;

  Tensor forward(const Tensor& x, bool remember);
  Tensor backward(const Tensor& grad);
  void visit_params(const std::string& prefix, const ParamVisitor& fn);
  Stage clone() const;
};

struct Head {
  Tensor w, b, w_grad, b_grad, w_vel, b_vel;
  bool trainable = true;
  std::size_t classes() const { return b.size(); }
};

/// Additive loss term (e.g. a quadratic anchor penalty). `value` is the
/// penalty at the current parameters; `accumulate` adds its gradient into the
/// model's gradient buffers after the data backward pass.
class PenaltyTerm {
 public:
  virtual ~PenaltyTerm() = default;
  virtual double value(const class Model& model) const = 0;
  virtual void accumulate(class Model& model) const = 0;
};

struct ParamSnapshot {
  std::string label;
  std::uint64_t fingerprint = 0;
  std::vector<std::pair<std::string, Tensor>> entries;

  const Tensor* find(const std::string& name) const;
};

/// One example subset of a batch routed through one head.
struct HeadRoute {
  std::string head;
  std::vector<std::size_t> rows;
  Labels labels;
};

struct ForwardResult {
  Tensor logits;
  std::map<std::string, Tensor> activations;  // stage -> (n x features)
};

class Model {
 public:
  Model(ArchSpec spec, Rng& rng);

  const ArchSpec& spec() const { return spec_; }
  std::uint64_t fingerprint() const { return spec_.fingerprint(); }
  std::vector<std::string> stage_names() const;
  std::size_t stage_count() const { return stages_.size(); }
  std::size_t head_features() const { return spec_.head_features(); }
  std::size_t parameter_count() const;

  void attach_head(const std::string& id, std::size_t n_classes, Rng& rng);
  bool has_head(const std::string& id) const { return heads_.count(id) > 0; }
  void set_active_head(const std::string& id);
  const std::string& active_head() const { return active_head_; }
  std::vector<std::string> head_ids() const;
  std::size_t head_classes(const std::string& id) const;

  /// Evaluation forward: no caches, optional per-stage activation capture
  /// (post-stage outputs flattened to n x features).
  ForwardResult forward(const Tensor& batch, const std::vector<std::string>& capture = {});

  /// One optimizer step on a single-head batch; returns the pre-step loss.
  double train_step(const Tensor& batch, const Labels& labels, const OptimizerConfig& opt,
                    const PenaltyTerm* penalty = nullptr);
  /// One optimizer step where each route's rows pass through its own head.
  double train_step_routed(const Tensor& batch, const std::vector<HeadRoute>& routes, const OptimizerConfig& opt,
                           const PenaltyTerm* penalty = nullptr);

  /// Forward + backward filling gradient buffers without updating parameters;
  /// used for Fisher estimation and gradient checks. Returns the loss.
  double compute_grads(const Tensor& batch, const Labels& labels, const PenaltyTerm* penalty = nullptr);

  /// Trainability by component name: stage names, or "head/<id>".
  void set_trainability(const std::function<bool(const std::string&)>& predicate);
  void set_stage_trainable(const std::string& stage, bool trainable);
  void set_head_trainable(const std::string& id, bool trainable);
  void set_all_trainable(bool trainable);
  /// Freeze stages 1..k (from the input side); unfreeze the rest of the body.
  void freeze_bottom_stages(std::size_t k);
  bool stage_trainable(const std::string& stage) const;

  ParamSnapshot snapshot(const std::string& label) const;
  /// Restore components by prefix (stage names, "head/<id>", "task/<id>/stageK").
  /// Empty subset restores every entry.
  void restore(const ParamSnapshot& snap, const std::vector<std::string>& subset = {});

  /// Duplicate the top n stages per existing head id; forward then routes
  /// through the active head's private top stages. New heads attached later
  /// get freshly initialized private stages.
  void make_task_specific(std::size_t n_top_stages);
  /// Zero every momentum buffer (the new-optimizer-per-task idiom).
  void reset_optimizer_state();
  bool is_task_specific() const { return task_specific_top_ > 0; }
  std::size_t task_specific_top() const { return task_specific_top_; }

  /// All parameters: stages in order, task-specific stages, then heads.
  void visit_params(const ParamVisitor& fn);
  /// Shared + task-specific body parameters (no heads).
  void visit_body_params(const ParamVisitor& fn);

 private:
  ArchSpec spec_;
  std::vector<Stage> stages_;
  std::map<std::string, std::vector<Stage>> task_stages_;
  std::size_t task_specific_top_ = 0;
  std::map<std::string, Head> heads_;
  std::string active_head_;

  std::size_t shared_count() const;
  std::vector<Stage*> active_pipeline(const std::string& head_id);
  Tensor forward_features(std::vector<Stage*>& pipeline, const Tensor& batch, bool remember,
                          std::map<std::string, Tensor>* capture, const std::vector<std::string>* wanted);
  double step_impl(const Tensor& batch, const std::vector<HeadRoute>& routes, const OptimizerConfig* opt,
                   const PenaltyTerm* penalty);
  static Tensor flatten_rows(const Tensor& t);
  void sgd_update(const OptimizerConfig& opt, const std::vector<std::string>& heads_in_step);
};

Model build_model(const ArchSpec& spec, Rng& rng);

}  // namespace forgetlab::nn

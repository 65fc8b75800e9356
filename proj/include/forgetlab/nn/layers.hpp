#pragma once

#include <functional>
#include <memory>
#include <string>

#include "forgetlab/rng.hpp"
#include "forgetlab/tensor.hpp"

namespace forgetlab::nn {

/// Visitor over (name, parameter, gradient, momentum buffer).
using ParamVisitor = std::function<void(const std::string&, Tensor&, Tensor&, Tensor&)>;

class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  /// remember=true caches what backward needs.
  virtual Tensor forward(const Tensor& x, bool remember) = 0;
  /// Consumes the cache from the last remembered forward; writes param grads.
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual void visit_params(const ParamVisitor&) {}
  virtual std::unique_ptr<Layer> clone() const = 0;
};

class DenseLayer final : public Layer {
 public:
  DenseLayer(std::size_t in, std::size_t out, Rng& rng);

  std::string kind() const override { return "dense"; }
  Tensor forward(const Tensor& x, bool remember) override;
  Tensor backward(const Tensor& grad_out) override;
  void visit_params(const ParamVisitor& fn) override;
  std::unique_ptr<Layer> clone() const override;

  Tensor w, b, w_grad, b_grad, w_vel, b_vel;

 private:
  Tensor input_;
};

class ReluLayer final : public Layer {
 public:
  std::string kind() const override { return "relu"; }
  Tensor forward(const Tensor& x, bool remember) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override;

 private:
  std::vector<bool> mask_;
  std::vector<std::size_t> shape_;
};

/// 3x3 convolution, unit stride, pad = kernel/2 (shape preserving).
class Conv2dLayer final : public Layer {
 public:
  Conv2dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng);

  std::string kind() const override { return "conv"; }
  Tensor forward(const Tensor& x, bool remember) override;
  Tensor backward(const Tensor& grad_out) override;
  void visit_params(const ParamVisitor& fn) override;
  std::unique_ptr<Layer> clone() const override;

  Tensor w, b, w_grad, b_grad, w_vel, b_vel;  // w: (oc, ic, k, k)

 private:
  std::size_t in_c_, out_c_, k_;
  Tensor input_;

  Tensor im2col(const Tensor& x) const;
};

/// (n, c, h, w) -> (n, c*h*w); passthrough on rank-2 input.
class FlattenLayer final : public Layer {
 public:
  std::string kind() const override { return "flatten"; }
  Tensor forward(const Tensor& x, bool remember) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override;

 private:
  std::vector<std::size_t> in_shape_;
};

/// 2x2 max pooling with stride 2; extents must be even.
class MaxPool2dLayer final : public Layer {
 public:
  std::string kind() const override { return "maxpool"; }
  Tensor forward(const Tensor& x, bool remember) override;
  Tensor backward(const Tensor& grad_out) override;
  std::unique_ptr<Layer> clone() const override;

 private:
  std::vector<std::size_t> argmax_;
  std::vector<std::size_t> in_shape_;
};

}  // namespace forgetlab::nn

#include "forgetlab/nn/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "forgetlab/error.hpp"

namespace forgetlab::nn {

// ---------------------------------------------------------------- Dense

DenseLayer::DenseLayer(std::size_t in, std::size_t out, Rng& rng) {
  w = rng.normal_tensor({in, out}, 0.0, 1.0 / std::sqrt(static_cast<double>(in)));
  b = Tensor::zeros({out});
  w_grad = Tensor::zeros({in, out});
  b_grad = Tensor::zeros({out});
  w_vel = Tensor::zeros({in, out});
  b_vel = Tensor::zeros({out});
}

Tensor DenseLayer::forward(const Tensor& x, bool remember) {
  if (x.rank() != 2 || x.dim(1) != w.dim(0)) {
    throw DimensionError("dense expects (n x " + std::to_string(w.dim(0)) + "), got " + x.shape_str());
  }
  if (remember) input_ = x;
  Tensor out = matmul(x, w);
  std::size_t n = out.dim(0), k = out.dim(1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) out(i, j) += b(j);
  return out;
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
  w_grad = matmul(input_.transposed(), grad_out);
  b_grad.fill(0.0);
  std::size_t n = grad_out.dim(0), k = grad_out.dim(1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) b_grad(j) += grad_out(i, j);
  return matmul(grad_out, w.transposed());
}

void DenseLayer::visit_params(const ParamVisitor& fn) {
  fn("w", w, w_grad, w_vel);
  fn("b", b, b_grad, b_vel);
}

std::unique_ptr<Layer> DenseLayer::clone() const {
  auto copy = std::make_unique<DenseLayer>(*this);
  copy->input_ = Tensor();
  return copy;
}

// ---------------------------------------------------------------- ReLU

Tensor ReluLayer::forward(const Tensor& x, bool remember) {
  Tensor out = x;
  if (remember) {
    mask_.assign(x.size(), false);
    shape_ = x.shape();
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] > 0.0) {
      if (remember) mask_[i] = true;
    } else {
      out[i] = 0.0;
    }
  }
  return out;
}

Tensor ReluLayer::backward(const Tensor& grad_out) {
  Tensor gx = grad_out;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    if (!mask_[i]) gx[i] = 0.0;
  }
  return gx;
}

std::unique_ptr<Layer> ReluLayer::clone() const { return std::make_unique<ReluLayer>(); }

// ---------------------------------------------------------------- Conv2d

Conv2dLayer::Conv2dLayer(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, Rng& rng)
    : in_c_(in_channels), out_c_(out_channels), k_(kernel) {
  if (kernel % 2 == 0) throw ConfigError("conv kernel must be odd for shape-preserving padding");
  double fan_in = static_cast<double>(in_channels * kernel * kernel);
  w = rng.normal_tensor({out_channels, in_channels, kernel, kernel}, 0.0, 1.0 / std::sqrt(fan_in));
  b = Tensor::zeros({out_channels});
  w_grad = Tensor::zeros(w.shape());
  b_grad = Tensor::zeros(b.shape());
  w_vel = Tensor::zeros(w.shape());
  b_vel = Tensor::zeros(b.shape());
}

Tensor Conv2dLayer::im2col(const Tensor& x) const {
  const std::size_t n = x.dim(0), h = x.dim(2), wd = x.dim(3);
  const std::size_t pad = k_ / 2;
  const std::size_t patch = in_c_ * k_ * k_;
  Tensor cols({n * h * wd, patch});
  double* out = cols.data();
  const double* in = x.data();
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t oy = 0; oy < h; ++oy) {
      for (std::size_t ox = 0; ox < wd; ++ox) {
        double* row = out + ((img * h + oy) * wd + ox) * patch;
        std::size_t c = 0;
        for (std::size_t ch = 0; ch < in_c_; ++ch) {
          const double* plane = in + (img * in_c_ + ch) * h * wd;
          for (std::size_t ky = 0; ky < k_; ++ky) {
            std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - static_cast<std::ptrdiff_t>(pad);
            for (std::size_t kx = 0; kx < k_; ++kx, ++c) {
              std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - static_cast<std::ptrdiff_t>(pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h) || ix < 0 || ix >= static_cast<std::ptrdiff_t>(wd)) {
                row[c] = 0.0;
              } else {
                row[c] = plane[iy * static_cast<std::ptrdiff_t>(wd) + ix];
              }
            }
          }
        }
      }
    }
  }
  return cols;
}

Tensor Conv2dLayer::forward(const Tensor& x, bool remember) {
  if (x.rank() != 4 || x.dim(1) != in_c_) {
    throw DimensionError("conv expects (n x " + std::to_string(in_c_) + " x h x w), got " + x.shape_str());
  }
  if (remember) input_ = x;
  const std::size_t n = x.dim(0), h = x.dim(2), wd = x.dim(3);
  Tensor cols = im2col(x);
  Tensor wmat = w.reshaped({out_c_, in_c_ * k_ * k_}).transposed();
  Tensor out2 = matmul(cols, wmat);  // (n*h*w) x oc
  Tensor out({n, out_c_, h, wd});
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t oy = 0; oy < h; ++oy) {
      for (std::size_t ox = 0; ox < wd; ++ox) {
        const double* src = out2.data() + ((img * h + oy) * wd + ox) * out_c_;
        for (std::size_t oc = 0; oc < out_c_; ++oc) {
          out(img, oc, oy, ox) = src[oc] + b(oc);
        }
      }
    }
  }
  return out;
}

Tensor Conv2dLayer::backward(const Tensor& grad_out) {
  const Tensor& x = input_;
  const std::size_t n = x.dim(0), h = x.dim(2), wd = x.dim(3);
  const std::size_t pad = k_ / 2;
  const std::size_t patch = in_c_ * k_ * k_;

  // grad_out (n, oc, h, w) -> row layout (n*h*w, oc)
  Tensor g2({n * h * wd, out_c_});
  b_grad.fill(0.0);
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t oc = 0; oc < out_c_; ++oc) {
      for (std::size_t oy = 0; oy < h; ++oy) {
        for (std::size_t ox = 0; ox < wd; ++ox) {
          double g = grad_out(img, oc, oy, ox);
          g2((img * h + oy) * wd + ox, oc) = g;
          b_grad(oc) += g;
        }
      }
    }
  }

  Tensor cols = im2col(x);  // recomputed; caching it would dominate memory
  w_grad = matmul(g2.transposed(), cols).reshaped({out_c_, in_c_, k_, k_});

  Tensor wmat = w.reshaped({out_c_, in_c_ * k_ * k_});
  Tensor gcols = matmul(g2, wmat);  // (n*h*w) x patch

  Tensor gx(x.shape());
  double* gxd = gx.data();
  const double* gc = gcols.data();
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t oy = 0; oy < h; ++oy) {
      for (std::size_t ox = 0; ox < wd; ++ox) {
        const double* row = gc + ((img * h + oy) * wd + ox) * patch;
        std::size_t c = 0;
        for (std::size_t ch = 0; ch < in_c_; ++ch) {
          double* plane = gxd + (img * in_c_ + ch) * h * wd;
          for (std::size_t ky = 0; ky < k_; ++ky) {
            std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - static_cast<std::ptrdiff_t>(pad);
            for (std::size_t kx = 0; kx < k_; ++kx, ++c) {
              std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - static_cast<std::ptrdiff_t>(pad);
              if (iy >= 0 && iy < static_cast<std::ptrdiff_t>(h) && ix >= 0 && ix < static_cast<std::ptrdiff_t>(wd)) {
                plane[iy * static_cast<std::ptrdiff_t>(wd) + ix] += row[c];
              }
            }
          }
        }
      }
    }
  }
  return gx;
}

void Conv2dLayer::visit_params(const ParamVisitor& fn) {
  fn("w", w, w_grad, w_vel);
  fn("b", b, b_grad, b_vel);
}

std::unique_ptr<Layer> Conv2dLayer::clone() const {
  auto copy = std::make_unique<Conv2dLayer>(*this);
  copy->input_ = Tensor();
  return copy;
}

// ---------------------------------------------------------------- Flatten

Tensor FlattenLayer::forward(const Tensor& x, bool remember) {
  if (remember) in_shape_ = x.shape();
  if (x.rank() == 2) return x;
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

Tensor FlattenLayer::backward(const Tensor& grad_out) { return grad_out.reshaped(in_shape_); }

std::unique_ptr<Layer> FlattenLayer::clone() const { return std::make_unique<FlattenLayer>(); }

// ---------------------------------------------------------------- MaxPool

Tensor MaxPool2dLayer::forward(const Tensor& x, bool remember) {
  if (x.rank() != 4) throw DimensionError("maxpool expects rank-4 input, got " + x.shape_str());
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  if (h % 2 != 0 || wd % 2 != 0) {
    throw DimensionError("maxpool needs even spatial extents, got " + x.shape_str());
  }
  const std::size_t oh = h / 2, ow = wd / 2;
  Tensor out({n, c, oh, ow});
  if (remember) {
    argmax_.assign(out.size(), 0);
    in_shape_ = x.shape();
  }
  std::size_t flat = 0;
  for (std::size_t img = 0; img < n; ++img) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox, ++flat) {
          double best = -std::numeric_limits<double>::infinity();
          std::size_t best_idx = 0;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              std::size_t iy = oy * 2 + dy, ix = ox * 2 + dx;
              std::size_t idx = ((img * c + ch) * h + iy) * wd + ix;
              double v = x[idx];
              if (v > best) {
                best = v;
                best_idx = idx;
              }
            }
          }
          out[flat] = best;
          if (remember) argmax_[flat] = best_idx;
        }
      }
    }
  }
  return out;
}

Tensor MaxPool2dLayer::backward(const Tensor& grad_out) {
  Tensor gx(in_shape_);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    gx[argmax_[i]] += grad_out[i];
  }
  return gx;
}

std::unique_ptr<Layer> MaxPool2dLayer::clone() const { return std::make_unique<MaxPool2dLayer>(); }

}  // namespace forgetlab::nn

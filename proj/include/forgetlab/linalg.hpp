#pragma once

#include <functional>

#include "forgetlab/tensor.hpp"

namespace forgetlab {

/// Factorization m = u * diag(singular_values) * v, with u (p x p) and
/// v (q x q) orthogonal and singular values sorted descending. Note v is the
/// right factor as it multiplies, i.e. the transpose of the usual V.
struct SvdResult {
  Tensor u;
  Tensor singular_values;
  Tensor v;

  Tensor reconstruct() const;
};

SvdResult svd(const Tensor& m);

/// Orthogonality defect max|b^T b - I|.
double orthogonality_defect(const Tensor& basis);

/// Conjugated product of disjoint plane rotations:
///   R(theta) = basis^T * prod_i r_{i, p+1-i}(theta) * basis   (axes 1-based)
/// R(0) = identity; odd p leaves the middle axis fixed.
Tensor givens_product(double theta, std::size_t p, const Tensor& basis);

/// Central-difference gradient of a scalar function, same shape as x.
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h);

}  // namespace forgetlab

#include "forgetlab/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "forgetlab/error.hpp"

namespace forgetlab {

namespace {
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
}

Tensor SvdResult::reconstruct() const {
  std::size_t p = u.dim(0);
  std::size_t q = v.dim(0);
  std::size_t r = singular_values.size();
  Tensor scaled = u;  // columns of u scaled by singular values, zero beyond rank
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      scaled(i, j) = (j < r) ? u(i, j) * singular_values(j) : 0.0;
    }
  }
  // scaled is p x p, only first r columns nonzero; multiply by first r rows of v
  Tensor out({p, q});
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < r && k < p; ++k) s += scaled(i, k) * v(k, j);
      out(i, j) = s;
    }
  }
  return out;
}

SvdResult svd(const Tensor& m) {
  if (m.rank() != 2) throw DimensionError("svd expects a rank-2 tensor, got " + m.shape_str());
  if (!m.all_finite()) throw DataError("svd input contains non-finite entries");
  const std::size_t p = m.dim(0), q = m.dim(1);

  Eigen::Map<const RowMajorMatrix> a(m.data(), static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
  Eigen::JacobiSVD<RowMajorMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw NumericError("svd failed to converge on a " + std::to_string(p) + "x" + std::to_string(q) + " matrix");
  }

  SvdResult out;
  out.u = Tensor({p, p});
  out.v = Tensor({q, q});
  const std::size_t r = std::min(p, q);
  out.singular_values = Tensor({r});

  RowMajorMatrix U = solver.matrixU();
  RowMajorMatrix Vt = solver.matrixV().transpose();
  for (std::size_t k = 0; k < r; ++k) out.singular_values(k) = solver.singularValues()(static_cast<Eigen::Index>(k));

  // Sign convention: first nonzero entry of each left singular vector >= 0.
  for (std::size_t j = 0; j < p; ++j) {
    double lead = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      if (std::abs(U(i, j)) > 1e-12) {
        lead = U(i, j);
        break;
      }
    }
    if (lead < 0.0) {
      for (std::size_t i = 0; i < p; ++i) U(i, j) = -U(i, j);
      if (j < q) {
        for (std::size_t i = 0; i < q; ++i) Vt(j, i) = -Vt(j, i);
      }
    }
  }

  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) out.u(i, j) = U(i, j);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) out.v(i, j) = Vt(i, j);
  return out;
}

double orthogonality_defect(const Tensor& basis) {
  if (basis.rank() != 2 || basis.dim(0) != basis.dim(1)) {
    throw DimensionError("orthogonality check needs a square matrix, got " + basis.shape_str());
  }
  Tensor gram = matmul(basis.transposed(), basis);
  double worst = 0.0;
  std::size_t n = basis.dim(0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double want = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram(i, j) - want));
    }
  }
  return worst;
}

Tensor givens_product(double theta, std::size_t p, const Tensor& basis) {
  if (basis.rank() != 2 || basis.dim(0) != p || basis.dim(1) != p) {
    throw DimensionError("rotation basis must be " + std::to_string(p) + "x" + std::to_string(p) + ", got " +
                         basis.shape_str());
  }
  if (orthogonality_defect(basis) > 1e-8) {
    throw PreconditionError("rotation basis is not orthogonal within 1e-8");
  }

  // Planes (i, p+1-i) for i = 1..floor(p/2), 1-based, are pairwise disjoint,
  // so the product is order-independent and applied in place.
  Tensor core = Tensor::identity(p);
  const double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t i = 1; i <= p / 2; ++i) {
    std::size_t a = i - 1;
    std::size_t b = p - i;
    if (a == b) continue;
    // rotate columns a and b of the identity-based core: rows a,b get the block
    core(a, a) = c;
    core(a, b) = -s;
    core(b, a) = s;
    core(b, b) = c;
  }
  return matmul(basis.transposed(), matmul(core, basis));
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x, double h) {
  if (h <= 0.0) throw ConfigError("finite difference step must be positive");
  Tensor grad(x.shape());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double orig = probe[i];
    probe[i] = orig + h;
    double fp = f(probe);
    probe[i] = orig - h;
    double fm = f(probe);
    probe[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericError("non-finite function value in finite_diff_grad");
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace forgetlab

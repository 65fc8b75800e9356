#include "doctest.h"

#include <cmath>
#include <limits>

#include "forgetlab/error.hpp"
#include "forgetlab/rng.hpp"
#include "forgetlab/tensor.hpp"

using namespace forgetlab;

TEST_CASE("matmul identity leaves matrix unchanged") {
  Rng rng(7);
  Tensor a = rng.normal_tensor({3, 4});
  Tensor out = matmul(Tensor::identity(3), a);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(out[i] == doctest::Approx(a[i]).epsilon(1e-14));
}

TEST_CASE("matmul hand example") {
  Tensor a = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from_data({2, 1}, {0, 1});
  Tensor c = matmul(a, b);
  CHECK(c(0, 0) == 2.0);
  CHECK(c(1, 0) == 4.0);
}

TEST_CASE("matmul dimension mismatch names both shapes") {
  Tensor a({2, 3});
  Tensor b({4, 5});
  CHECK_THROWS_WITH_AS(matmul(a, b), doctest::Contains("(2x3)"), DimensionError);
  try {
    matmul(a, b);
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("(4x5)") != std::string::npos);
  }
}

TEST_CASE("matmul associativity on random tensors") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t m = 1 + rng.index(6), k = 1 + rng.index(6), n = 1 + rng.index(6), q = 1 + rng.index(6);
    Tensor a = rng.normal_tensor({m, k});
    Tensor b = rng.normal_tensor({k, n});
    Tensor c = rng.normal_tensor({n, q});
    Tensor left = matmul(matmul(a, b), c);
    Tensor right = matmul(a, matmul(b, c));
    double scale = std::max(1.0, frobenius_norm(left));
    CHECK(frobenius_norm(left - right) / scale < 1e-10);
  }
}

TEST_CASE("frobenius norm basics") {
  CHECK(frobenius_norm(Tensor::zeros({4, 4})) == 0.0);
  Tensor t = Tensor::from_data({1, 2}, {3, 4});
  CHECK(frobenius_norm(t) == doctest::Approx(5.0));
  Tensor perm = Tensor::from_data({2, 1}, {4, 3});
  CHECK(frobenius_norm(perm) == doctest::Approx(frobenius_norm(t)));
}

TEST_CASE("from_data rejects non-finite and size mismatch") {
  CHECK_THROWS_AS(Tensor::from_data({2}, {1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
  CHECK_THROWS_AS(Tensor::from_data({2}, {1.0, std::numeric_limits<double>::infinity()}), DataError);
  CHECK_THROWS_AS(Tensor::from_data({3}, {1.0, 2.0}), DimensionError);
  CHECK_THROWS_AS(Tensor({0, 2}), DimensionError);
}

TEST_CASE("reshape transpose slice") {
  Tensor t = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor r = t.reshaped({3, 2});
  CHECK(r(2, 1) == 6.0);
  Tensor tt = t.transposed();
  CHECK(tt.dim(0) == 3);
  CHECK(tt(2, 0) == 3.0);
  CHECK(tt(2, 1) == 6.0);
  Tensor row = t.slice_rows(1, 2);
  CHECK(row(0, 0) == 4.0);
  Tensor picked = t.take_rows({1, 0});
  CHECK(picked(0, 2) == 6.0);
  CHECK(picked(1, 2) == 3.0);
  CHECK_THROWS_AS(t.reshaped({4, 2}), DimensionError);
}

TEST_CASE("content hash distinguishes data and shape") {
  Tensor a = Tensor::from_data({2, 2}, {1, 2, 3, 4});
  Tensor b = Tensor::from_data({4}, {1, 2, 3, 4});
  Tensor c = Tensor::from_data({2, 2}, {1, 2, 3, 5});
  CHECK(a.content_hash() != b.content_hash());
  CHECK(a.content_hash() != c.content_hash());
  CHECK(a.content_hash() == Tensor::from_data({2, 2}, {1, 2, 3, 4}).content_hash());
}

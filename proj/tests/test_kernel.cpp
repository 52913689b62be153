#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ssbo/errors.hpp"
#include "ssbo/kernel.hpp"
#include "ssbo/rng.hpp"

using namespace ssbo;

namespace {

Eigen::MatrixXd random_points(Rng& rng, int n, int dim, double scale) {
  Eigen::MatrixXd x(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) x(i, j) = scale * (rng.uniform01() - 0.5);
  return x;
}

Eigen::MatrixXd random_onehot(Rng& rng, int n, int positions) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 4 * positions);
  for (int i = 0; i < n; ++i)
    for (int p = 0; p < positions; ++p) x(i, 4 * p + rng.uniform_int(4)) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("squared exponential matches a direct evaluation") {
  KernelSpec spec;
  spec.kind = KernelKind::squared_exponential;
  spec.lengthscale = 0.7;
  spec.signal_variance = 2.5;
  spec.input_dim = 3;

  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a = random_points(rng, 1, 3, 4.0).row(0);
    Eigen::VectorXd b = random_points(rng, 1, 3, 4.0).row(0);
    const double d2 = (a - b).squaredNorm();
    const double want = 2.5 * std::exp(-d2 / (2.0 * 0.7 * 0.7));
    CHECK(kernel_value(spec, a, b) == doctest::Approx(want).epsilon(1e-14));
  }
  Eigen::VectorXd a = random_points(rng, 1, 3, 4.0).row(0);
  CHECK(kernel_value(spec, a, a) == 2.5);
}

TEST_CASE("linear one-hot kernel counts matching positions") {
  const int positions = 5;
  KernelSpec spec;
  spec.kind = KernelKind::linear_one_hot;
  spec.signal_variance = 1.5;
  spec.input_dim = 4 * positions;

  Rng rng(3);
  Eigen::MatrixXd x = random_onehot(rng, 40, positions);
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.rows(); ++j) {
      int matches = 0;
      for (int p = 0; p < positions; ++p) {
        int ai = -1, bi = -1;
        for (int c = 0; c < 4; ++c) {
          if (x(i, 4 * p + c) == 1.0) ai = c;
          if (x(j, 4 * p + c) == 1.0) bi = c;
        }
        if (ai == bi) ++matches;
      }
      const double want = 1.5 * matches / static_cast<double>(positions);
      CHECK(kernel_value(spec, x.row(i), x.row(j)) ==
            doctest::Approx(want).epsilon(1e-14));
    }
  }
  // Unit diagonal scaling: a point matches itself at every position.
  CHECK(kernel_value(spec, x.row(0), x.row(0)) == doctest::Approx(1.5));
}

TEST_CASE("gram agrees with cross and pairwise values") {
  KernelSpec spec;
  spec.kind = KernelKind::squared_exponential;
  spec.lengthscale = 1.3;
  spec.signal_variance = 0.8;
  spec.input_dim = 2;

  Rng rng(21);
  Eigen::MatrixXd x = random_points(rng, 25, 2, 6.0);
  Eigen::MatrixXd gram = kernel_gram(spec, x);
  Eigen::MatrixXd cross = kernel_cross(spec, x, x);
  CHECK((gram - gram.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gram - cross).cwiseAbs().maxCoeff() < 1e-15);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(gram(i, j) ==
            doctest::Approx(kernel_value(spec, x.row(i), x.row(j))));
}

TEST_CASE("gram matrices are positive semidefinite") {
  Rng rng(8);
  KernelSpec se;
  se.kind = KernelKind::squared_exponential;
  se.lengthscale = 0.9;
  se.signal_variance = 1.0;
  se.input_dim = 4;
  Eigen::MatrixXd xs = random_points(rng, 30, 4, 3.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel_gram(se, xs));
  CHECK(es.eigenvalues().minCoeff() > -1e-9);

  KernelSpec lin;
  lin.kind = KernelKind::linear_one_hot;
  lin.signal_variance = 1.0;
  lin.input_dim = 24;
  Eigen::MatrixXd xo = random_onehot(rng, 30, 6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eo(kernel_gram(lin, xo));
  CHECK(eo.eigenvalues().minCoeff() > -1e-9);
}

TEST_CASE("kernel_cross_row matches the full cross matrix") {
  KernelSpec spec;
  spec.kind = KernelKind::squared_exponential;
  spec.lengthscale = 0.5;
  spec.signal_variance = 1.0;
  spec.input_dim = 2;

  Rng rng(4);
  Eigen::MatrixXd x = random_points(rng, 10, 2, 2.0);
  Eigen::MatrixXd q = random_points(rng, 17, 2, 2.0);
  Eigen::MatrixXd cross = kernel_cross(spec, x, q);
  for (int i = 0; i < x.rows(); ++i) {
    Eigen::VectorXd row = kernel_cross_row(spec, x.row(i), q);
    CHECK((row.transpose() - cross.row(i)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("spec validation rejects bad parameters") {
  KernelSpec spec;
  spec.kind = KernelKind::squared_exponential;
  spec.lengthscale = 0.0;
  spec.signal_variance = 1.0;
  spec.input_dim = 2;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec.lengthscale = 1.0;
  spec.signal_variance = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec.signal_variance = 1.0;
  spec.input_dim = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  KernelSpec lin;
  lin.kind = KernelKind::linear_one_hot;
  lin.signal_variance = 1.0;
  lin.input_dim = 6;  // not a multiple of 4
  CHECK_THROWS_AS(lin.validate(), std::invalid_argument);

  Eigen::VectorXd a(3), b(2);
  a.setZero();
  b.setZero();
  KernelSpec ok;
  ok.kind = KernelKind::squared_exponential;
  ok.input_dim = 3;
  CHECK_THROWS_AS(kernel_value(ok, a, b), DimensionMismatch);
}

#include "ssbo/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "ssbo/errors.hpp"

namespace ssbo {

namespace {

double onehot_scale(const KernelSpec& spec) {
  // One-hot sequences over a 4-letter alphabet: input_dim / 4 positions,
  // so <x, x> = positions and the division pins k(x, x) = signal_variance.
  return 4.0 / static_cast<double>(spec.input_dim);
}

}  // namespace

void KernelSpec::validate() const {
  if (input_dim < 1) throw std::invalid_argument("kernel: input_dim must be >= 1");
  if (signal_variance <= 0.0)
    throw std::invalid_argument("kernel: signal_variance must be positive");
  if (kind == KernelKind::squared_exponential && lengthscale <= 0.0)
    throw std::invalid_argument("kernel: lengthscale must be positive");
  if (kind == KernelKind::linear_one_hot && input_dim % 4 != 0)
    throw std::invalid_argument("kernel: one-hot input_dim must be a multiple of 4");
}

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  if (a.size() != spec.input_dim || b.size() != spec.input_dim)
    throw DimensionMismatch("kernel_value: point dimension != input_dim");
  switch (spec.kind) {
    case KernelKind::squared_exponential: {
      const double d2 = (a - b).squaredNorm();
      return spec.signal_variance *
             std::exp(-d2 / (2.0 * spec.lengthscale * spec.lengthscale));
    }
    case KernelKind::linear_one_hot:
      return spec.signal_variance * a.dot(b) * onehot_scale(spec);
  }
  throw std::logic_error("kernel_value: unknown kind");
}

Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const Eigen::MatrixXd& x) {
  if (x.rows() > 0 && x.cols() != spec.input_dim)
    throw DimensionMismatch("kernel_gram: point dimension != input_dim");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v;
      switch (spec.kind) {
        case KernelKind::squared_exponential: {
          const double d2 = (x.row(i) - x.row(j)).squaredNorm();
          v = spec.signal_variance *
              std::exp(-d2 / (2.0 * spec.lengthscale * spec.lengthscale));
          break;
        }
        case KernelKind::linear_one_hot:
        default:
          v = spec.signal_variance * x.row(i).dot(x.row(j)) * onehot_scale(spec);
          break;
      }
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& queries) {
  if ((x.rows() > 0 && x.cols() != spec.input_dim) ||
      (queries.rows() > 0 && queries.cols() != spec.input_dim))
    throw DimensionMismatch("kernel_cross: point dimension != input_dim");
  Eigen::MatrixXd c(x.rows(), queries.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    c.row(i) = kernel_cross_row(spec, x.row(i), queries).transpose();
  return c;
}

Eigen::VectorXd kernel_cross_row(const KernelSpec& spec,
                                 const Eigen::VectorXd& point,
                                 const Eigen::MatrixXd& queries) {
  if (point.size() != spec.input_dim ||
      (queries.rows() > 0 && queries.cols() != spec.input_dim))
    throw DimensionMismatch("kernel_cross_row: point dimension != input_dim");
  const Eigen::Index m = queries.rows();
  Eigen::VectorXd out(m);
  switch (spec.kind) {
    case KernelKind::squared_exponential: {
      const double inv = -1.0 / (2.0 * spec.lengthscale * spec.lengthscale);
      for (Eigen::Index j = 0; j < m; ++j) {
        const double d2 = (queries.row(j).transpose() - point).squaredNorm();
        out(j) = spec.signal_variance * std::exp(d2 * inv);
      }
      break;
    }
    case KernelKind::linear_one_hot: {
      const double s = spec.signal_variance * onehot_scale(spec);
      for (Eigen::Index j = 0; j < m; ++j)
        out(j) = s * queries.row(j).dot(point.transpose());
      break;
    }
  }
  return out;
}

}  // namespace ssbo

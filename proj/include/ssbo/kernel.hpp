#pragma once

#include <Eigen/Dense>

namespace ssbo {

enum class KernelKind {
  squared_exponential,  // sv * exp(-||a-b||^2 / (2 ls^2))
  linear_one_hot,       // sv * <a,b> / (input_dim / 4), a,b one-hot blocks
};

struct KernelSpec {
  KernelKind kind = KernelKind::squared_exponential;
  double lengthscale = 1.0;      // ignored by linear_one_hot
  double signal_variance = 1.0;  // k(x, x) for both kinds
  int input_dim = 1;

  // Throws std::invalid_argument on nonsensical parameters.
  void validate() const;
};

double kernel_value(const KernelSpec& spec, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);

// Symmetric Gram matrix of the rows of x.
Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const Eigen::MatrixXd& x);

// k(x_i, q_j) for all training rows i and query rows j; n x m.
Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& queries);

// One cross row: k(point, q_j) over the rows of queries.
Eigen::VectorXd kernel_cross_row(const KernelSpec& spec,
                                 const Eigen::VectorXd& point,
                                 const Eigen::MatrixXd& queries);

}  // namespace ssbo

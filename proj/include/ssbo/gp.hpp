#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ssbo/kernel.hpp"

namespace ssbo {

// Posterior state of an exact GP regression. Immutable after fit(); refits
// build a fresh model from scratch (no incremental factor updates).
struct GpModel {
  KernelSpec kernel;
  double noise_variance = 0.0;
  Eigen::MatrixXd train_inputs;   // n x input_dim
  Eigen::VectorXd train_targets;  // n
  Eigen::MatrixXd chol_lower;     // L with L L^T = K + noise I (+ jitter)
  Eigen::VectorXd weights;        // (K + noise I)^-1 y
  double jitter = 0.0;            // multiplicative diagonal bump that succeeded

  Eigen::Index size() const { return train_inputs.rows(); }
  bool empty() const { return size() == 0; }
};

struct Prediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
};

// Fits the exact posterior. noise_variance must be >= 0; with exactly zero
// noise the Gram matrix has to be nonsingular as-is (duplicate inputs raise
// NonPositiveDefinite). With positive noise a failed factorization retries
// with diagonal jitter 1e-10, 1e-8, 1e-6 (multiplicative) before raising.
GpModel fit(const KernelSpec& kernel, double noise_variance,
            const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets);

// Posterior mean and variance at one query point.
std::pair<double, double> predict(const GpModel& model,
                                  const Eigen::VectorXd& query);

// Posterior over many queries (rows). Elementwise identical to calling
// predict() in a loop: the underlying solver's per-column arithmetic does
// not depend on how many columns are solved together.
Prediction predict_batch(const GpModel& model, const Eigen::MatrixXd& queries);

// Same, with the cross-kernel matrix k(train_i, query_j) (n x m) and prior
// diagonal k(query_j, query_j) supplied by the caller. Lets run loops cache
// cross rows incrementally instead of re-evaluating the kernel every refit.
Prediction predict_batch_prepared(const GpModel& model,
                                  const Eigen::MatrixXd& cross,
                                  const Eigen::VectorXd& prior_diag);

// Largest absolute partial derivative of the posterior mean over the given
// points, from the closed-form kernel gradient. Empty model: 0.
double mean_gradient_max(const GpModel& model, const Eigen::MatrixXd& points);
double mean_gradient_max(const GpModel& model, const Eigen::MatrixXd& points,
                         const Eigen::MatrixXd& cross);

// Discrete analogue for one-hot sequence spaces: max |mu_a - mu_b| / dist
// over the given index pairs (typically all Hamming-1 neighbors, whose
// one-hot distance is sqrt(2)).
double mean_gradient_max_pairs(const Eigen::VectorXd& mu,
                               const std::vector<std::pair<int, int>>& pairs,
                               double pair_distance);

// 0.5 * log det(I + noise^-1 K) for the Gram matrix of the chosen points.
double empirical_info_gain(const KernelSpec& kernel, double noise_variance,
                           const Eigen::MatrixXd& points);

namespace detail {
// Solves L Z = B in place for lower-triangular L, with per-column arithmetic
// independent of the number of columns. Exposed for tests.
using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
void solve_lower_inplace(const Eigen::MatrixXd& lower, RowMajorMatrixXd& rhs);
}  // namespace detail

}  // namespace ssbo

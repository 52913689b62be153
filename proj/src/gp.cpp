#include "ssbo/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "ssbo/errors.hpp"

namespace ssbo {

namespace detail {

void solve_lower_inplace(const Eigen::MatrixXd& lower, RowMajorMatrixXd& rhs) {
  const Eigen::Index n = lower.rows();
  if (rhs.rows() != n)
    throw DimensionMismatch("solve_lower_inplace: rhs rows != matrix size");
  constexpr Eigen::Index kBlock = 48;
  for (Eigen::Index k0 = 0; k0 < n; k0 += kBlock) {
    const Eigen::Index k1 = std::min(k0 + kBlock, n);
    // Diagonal block: plain forward substitution, rows in order.
    for (Eigen::Index i = k0; i < k1; ++i) {
      for (Eigen::Index j = k0; j < i; ++j)
        rhs.row(i) -= lower(i, j) * rhs.row(j);
      rhs.row(i) /= lower(i, i);
    }
    // Trailing update, ascending j inside each row so every column sees the
    // same scalar sequence regardless of the block's width.
    for (Eigen::Index r = k1; r < n; ++r)
      for (Eigen::Index j = k0; j < k1; ++j)
        rhs.row(r) -= lower(r, j) * rhs.row(j);
  }
}

}  // namespace detail

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(Eigen::MatrixXd a,
                                               double noise_variance,
                                               double* jitter_used) {
  const Eigen::VectorXd base_diag = a.diagonal();
  static constexpr double kJitters[] = {1e-10, 1e-8, 1e-6};
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  *jitter_used = 0.0;
  if (llt.info() == Eigen::Success) return llt;
  if (noise_variance == 0.0)
    throw NonPositiveDefinite(
        "fit: Gram matrix singular with zero observation noise");
  for (double j : kJitters) {
    a.diagonal() = base_diag * (1.0 + j);
    llt.compute(a);
    if (llt.info() == Eigen::Success) {
      *jitter_used = j;
      return llt;
    }
  }
  throw NonPositiveDefinite("fit: Cholesky failed after jitter escalation");
}

}  // namespace

GpModel fit(const KernelSpec& kernel, double noise_variance,
            const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets) {
  kernel.validate();
  if (noise_variance < 0.0)
    throw std::invalid_argument("fit: noise_variance must be >= 0");
  if (inputs.rows() != targets.size())
    throw LengthMismatch("fit: inputs and targets disagree in length");
  if (inputs.rows() > 0 && inputs.cols() != kernel.input_dim)
    throw DimensionMismatch("fit: input dimension != kernel input_dim");

  GpModel model;
  model.kernel = kernel;
  model.noise_variance = noise_variance;
  model.train_inputs = inputs;
  model.train_targets = targets;
  if (inputs.rows() == 0) return model;

  Eigen::MatrixXd a = kernel_gram(kernel, inputs);
  a.diagonal().array() += noise_variance;
  const auto llt = factor_with_jitter(std::move(a), noise_variance, &model.jitter);
  model.chol_lower = llt.matrixL();
  model.weights = llt.solve(targets);
  return model;
}

Prediction predict_batch_prepared(const GpModel& model,
                                  const Eigen::MatrixXd& cross,
                                  const Eigen::VectorXd& prior_diag) {
  const Eigen::Index n = model.size();
  const Eigen::Index m = prior_diag.size();
  if (cross.rows() != n || cross.cols() != m)
    throw DimensionMismatch("predict_batch_prepared: cross matrix shape");

  Prediction out;
  if (n == 0) {
    out.mean = Eigen::VectorXd::Zero(m);
    out.variance = prior_diag;
    return out;
  }

  // Mean: sum_i w_i k(x_i, q), accumulated over training points in order.
  out.mean = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i)
    out.mean.array() += model.weights(i) * cross.row(i).transpose().array();

  detail::RowMajorMatrixXd v = cross;
  detail::solve_lower_inplace(model.chol_lower, v);
  out.variance = prior_diag;
  for (Eigen::Index i = 0; i < n; ++i)
    out.variance.array() -= v.row(i).transpose().array().square();

  for (Eigen::Index j = 0; j < m; ++j) {
    if (out.variance(j) < 0.0) {
      if (out.variance(j) < -1e-10)
        throw NonPositiveDefinite("predict: variance below roundoff tolerance");
      out.variance(j) = 0.0;
    }
  }
  return out;
}

Prediction predict_batch(const GpModel& model, const Eigen::MatrixXd& queries) {
  if (queries.cols() != model.kernel.input_dim)
    throw DimensionMismatch("predict_batch: query dimension != input_dim");
  const Eigen::Index m = queries.rows();
  Eigen::VectorXd prior(m);
  for (Eigen::Index j = 0; j < m; ++j)
    prior(j) = kernel_value(model.kernel, queries.row(j), queries.row(j));
  const Eigen::MatrixXd cross =
      model.empty() ? Eigen::MatrixXd(0, m)
                    : kernel_cross(model.kernel, model.train_inputs, queries);
  return predict_batch_prepared(model, cross, prior);
}

std::pair<double, double> predict(const GpModel& model,
                                  const Eigen::VectorXd& query) {
  const Prediction p =
      predict_batch(model, Eigen::MatrixXd(query.transpose()));
  return {p.mean(0), p.variance(0)};
}

double mean_gradient_max(const GpModel& model, const Eigen::MatrixXd& points,
                         const Eigen::MatrixXd& cross) {
  if (model.empty()) return 0.0;
  if (points.cols() != model.kernel.input_dim)
    throw DimensionMismatch("mean_gradient_max: point dimension != input_dim");
  const Eigen::Index n = model.size();
  if (cross.rows() != n || cross.cols() != points.rows())
    throw DimensionMismatch("mean_gradient_max: cross matrix shape");

  if (model.kernel.kind == KernelKind::linear_one_hot) {
    // Linear mean: gradient is constant in x.
    const double s =
        model.kernel.signal_variance * 4.0 / model.kernel.input_dim;
    const Eigen::VectorXd g =
        s * (model.train_inputs.transpose() * model.weights);
    return g.cwiseAbs().maxCoeff();
  }

  // d mu / d x_d = sum_i w_i k(x_i, q) (x_id - q_d) / ls^2
  const double inv_ls2 =
      1.0 / (model.kernel.lengthscale * model.kernel.lengthscale);
  double best = 0.0;
  Eigen::VectorXd wk(n), g(points.cols());
  for (Eigen::Index q = 0; q < points.rows(); ++q) {
    wk = model.weights.cwiseProduct(cross.col(q));
    g = model.train_inputs.transpose() * wk -
        points.row(q).transpose() * wk.sum();
    best = std::max(best, g.cwiseAbs().maxCoeff() * inv_ls2);
  }
  return best;
}

double mean_gradient_max(const GpModel& model, const Eigen::MatrixXd& points) {
  if (model.empty()) return 0.0;
  const Eigen::MatrixXd cross =
      kernel_cross(model.kernel, model.train_inputs, points);
  return mean_gradient_max(model, points, cross);
}

double mean_gradient_max_pairs(const Eigen::VectorXd& mu,
                               const std::vector<std::pair<int, int>>& pairs,
                               double pair_distance) {
  if (pair_distance <= 0.0)
    throw std::invalid_argument("mean_gradient_max_pairs: distance must be > 0");
  double best = 0.0;
  for (const auto& [a, b] : pairs)
    best = std::max(best, std::abs(mu(a) - mu(b)));
  return best / pair_distance;
}

double empirical_info_gain(const KernelSpec& kernel, double noise_variance,
                           const Eigen::MatrixXd& points) {
  kernel.validate();
  if (noise_variance <= 0.0)
    throw std::invalid_argument("empirical_info_gain: noise must be positive");
  if (points.rows() == 0) return 0.0;
  Eigen::MatrixXd m = kernel_gram(kernel, points) / noise_variance;
  m.diagonal().array() += 1.0;
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw NonPositiveDefinite("empirical_info_gain: factorization failed");
  // 0.5 log det = sum of log diagonal of L.
  return Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

}  // namespace ssbo

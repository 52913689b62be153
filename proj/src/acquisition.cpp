#include "ssbo/acquisition.hpp"

#include <cmath>
#include <stdexcept>

#include "ssbo/errors.hpp"

namespace ssbo {

double beta_at(const BetaSchedule& schedule, int t, int domain_size) {
  if (t < 1) throw std::invalid_argument("beta_at: t must be >= 1");
  switch (schedule.kind) {
    case BetaKind::theorem_discrete: {
      if (domain_size < 1)
        throw std::invalid_argument("beta_at: domain_size must be >= 1");
      if (!(schedule.delta > 0.0) || schedule.delta >= 1.0)
        throw std::invalid_argument("beta_at: delta must lie in (0, 1)");
      const double td = static_cast<double>(t);
      return 2.0 * std::log(domain_size * M_PI * M_PI * td * td /
                            (6.0 * schedule.delta));
    }
    case BetaKind::constant:
      if (!(schedule.value >= 0.0))
        throw std::invalid_argument("beta_at: constant beta must be >= 0");
      return schedule.value;
  }
  throw std::logic_error("beta_at: unknown schedule");
}

Eigen::VectorXd ucb_values(const Eigen::VectorXd& mean,
                           const Eigen::VectorXd& variance, double beta_t) {
  if (mean.size() != variance.size())
    throw LengthMismatch("ucb_values: mean/variance lengths");
  if (!(beta_t >= 0.0))
    throw std::invalid_argument("ucb_values: beta_t must be >= 0");
  const double sb = std::sqrt(beta_t);
  return mean.array() + sb * variance.array().sqrt();
}

std::vector<int> mean_nearest_indices(const ThetaFamily& family,
                                      const Domain& domain) {
  if (family.domain_size() != domain.size())
    throw DomainMismatch("mean_nearest_indices: family/domain sizes");
  std::vector<int> nearest(family.num_thetas());
  for (int k = 0; k < family.num_thetas(); ++k)
    nearest[k] = domain.nearest_point(family.mean_feature.row(k).transpose());
  return nearest;
}

Eigen::VectorXd score_thetas(AcquisitionKind kind, const ThetaFamily& family,
                             const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& mu,
                             const std::vector<int>& mean_nearest) {
  const int n_thetas = family.num_thetas();
  switch (kind) {
    case AcquisitionKind::ss_ucb:
    case AcquisitionKind::independent:
      if (alpha.size() != family.domain_size())
        throw LengthMismatch("score_thetas: alpha length != domain size");
      return family.table * alpha;
    case AcquisitionKind::max_mean:
      if (mu.size() != family.domain_size())
        throw LengthMismatch("score_thetas: mu length != domain size");
      return family.table * mu;
    case AcquisitionKind::mean_ucb: {
      if (alpha.size() != family.domain_size())
        throw LengthMismatch("score_thetas: alpha length != domain size");
      if (static_cast<int>(mean_nearest.size()) != n_thetas)
        throw LengthMismatch("score_thetas: mean_nearest length");
      Eigen::VectorXd s(n_thetas);
      for (int k = 0; k < n_thetas; ++k) s(k) = alpha(mean_nearest[k]);
      return s;
    }
    case AcquisitionKind::random:
      return Eigen::VectorXd::Zero(n_thetas);
  }
  throw std::logic_error("score_thetas: unknown kind");
}

Eigen::VectorXd score_thetas(const AcquisitionSpec& spec, const GpModel& model,
                             const ThetaFamily& family, const Domain& domain,
                             int t) {
  if (family.domain_size() != domain.size())
    throw DomainMismatch("score_thetas: family/domain sizes");
  const Prediction p = predict_batch(model, domain.points());
  const double beta = beta_at(spec.beta, t, domain.size());
  const Eigen::VectorXd alpha = ucb_values(p.mean, p.variance, beta);
  std::vector<int> nearest;
  if (spec.kind == AcquisitionKind::mean_ucb)
    nearest = mean_nearest_indices(family, domain);
  return score_thetas(spec.kind, family, alpha, p.mean, nearest);
}

ThetaChoice select_theta(const ThetaFamily& family,
                         const Eigen::VectorXd& scores, AcquisitionKind kind,
                         Rng& rng) {
  if (scores.size() != family.num_thetas())
    throw LengthMismatch("select_theta: scores length");
  ThetaChoice choice;
  if (kind == AcquisitionKind::random) {
    choice.index = rng.uniform_int(family.num_thetas());
  } else {
    // Strict > keeps the first of any tied maxima; builders order thetas so
    // that ties fall to the smallest variance parameter.
    int best = 0;
    for (int k = 1; k < scores.size(); ++k)
      if (scores(k) > scores(best)) best = k;
    choice.index = best;
  }
  choice.variance_label = family.variance_label(choice.index);
  return choice;
}

}  // namespace ssbo

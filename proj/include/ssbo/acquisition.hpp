#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssbo/gp.hpp"
#include "ssbo/rng.hpp"
#include "ssbo/theta_family.hpp"

namespace ssbo {

enum class BetaKind { theorem_discrete, constant };

// Confidence-width schedule for the UCB rule. theorem_discrete is the
// finite-domain schedule beta_t = 2 log(|D| pi^2 t^2 / (6 delta)); constant
// holds beta fixed at `value`.
struct BetaSchedule {
  BetaKind kind = BetaKind::theorem_discrete;
  double delta = 0.1;
  double value = 4.0;
};

double beta_at(const BetaSchedule& schedule, int t, int domain_size);

enum class AcquisitionKind {
  ss_ucb,      // expected UCB under pi(theta)
  max_mean,    // expected posterior mean (pure exploitation)
  mean_ucb,    // UCB at the domain point nearest E_pi[x]
  independent, // batch baseline: expected UCB without penalization
  random,      // uniform theta choice
};

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::ss_ucb;
  BetaSchedule beta;
};

// alpha_t(x) = mu(x) + sqrt(beta_t) sigma(x), elementwise.
Eigen::VectorXd ucb_values(const Eigen::VectorXd& mean,
                           const Eigen::VectorXd& variance, double beta_t);

// Domain index nearest each theta's mean feature; ties to the lowest index.
std::vector<int> mean_nearest_indices(const ThetaFamily& family,
                                      const Domain& domain);

// One score per theta from precomputed fields over the domain. mean_nearest
// is only consulted by mean_ucb and may be empty otherwise.
Eigen::VectorXd score_thetas(AcquisitionKind kind, const ThetaFamily& family,
                             const Eigen::VectorXd& alpha,
                             const Eigen::VectorXd& mu,
                             const std::vector<int>& mean_nearest);

// Convenience overload that predicts over the domain and assembles the
// fields itself.
Eigen::VectorXd score_thetas(const AcquisitionSpec& spec, const GpModel& model,
                             const ThetaFamily& family, const Domain& domain,
                             int t);

struct ThetaChoice {
  int index = 0;
  double variance_label = 0.0;
};

// Argmax with first-index tie-breaking; the random kind draws uniformly and
// ignores the scores.
ThetaChoice select_theta(const ThetaFamily& family,
                         const Eigen::VectorXd& scores, AcquisitionKind kind,
                         Rng& rng);

}  // namespace ssbo

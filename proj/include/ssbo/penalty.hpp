#pragma once

#include <Eigen/Dense>

#include "ssbo/domain.hpp"
#include "ssbo/gp.hpp"
#include "ssbo/theta_family.hpp"

namespace ssbo {

// Probability that candidate xi stays interesting given a pending draw xj:
// 0.5 erfc(-z) with z = (lhat ||xi - xj|| - mhat + mu(xi)) / sqrt(2 var(xi)).
// mu and var are the posterior at the candidate xi. var == 0 degenerates to
// the step function 1{lhat d - mhat + mu > 0}.
double local_penalty_value(double lhat, double mhat, double mu_i, double var_i,
                           double distance);

// Same, predicting mu/var at xi from the model.
double local_penalty(const GpModel& model, double lhat, double mhat,
                     const Eigen::VectorXd& xi, const Eigen::VectorXd& xj);

// phi(i, j) over all domain pairs for fixed model state.
RowMajorMatrixXd build_phi_matrix(const Eigen::VectorXd& mu,
                                  const Eigen::VectorXd& var, double lhat,
                                  double mhat, const Eigen::MatrixXd& dist);

struct PenaltyState {
  double lhat = 0.0;
  double mhat = 0.0;
  RowMajorMatrixXd phi;  // |D| x |D|, phi(i, j) = penalty at i from a draw at j
};

// Assembles the full state for the current model: lhat from the posterior
// mean's steepest slope (kernel gradient on grids, Hamming-1 difference
// quotients on sequences), mhat = max observed target (0 before any data).
PenaltyState update_penalty_state(const GpModel& model, const Domain& domain,
                                  const Eigen::VectorXd& observed_targets);

// E_pi(theta)[phi(xi; x)] for one candidate row of phi.
double expected_penalty(const ThetaFamily& family, int theta,
                        const Eigen::VectorXd& phi_xi);

// sum_{k=1}^{B} p^{k-1}, evaluated by Horner; equals B at p = 1.
double geometric_sum(double p, int batch_size);

enum class PenaltyStrategy { automatic, generic, grid_separable, sequence_hamming };

// One penalized batch score per theta:
//   score(theta) = sum_i pi(i|theta) alpha(i) g_B(psi_theta(i)),
//   psi_theta(i) = sum_j pi(j|theta) phi(i, j).
// All strategies compute this sum exactly and differ only in association
// order; automatic picks by family structure. batch_size == 1 reduces to the
// plain expected-UCB score. The sequence strategy needs the domain for its
// Hamming table.
Eigen::VectorXd batch_scores(const Eigen::VectorXd& alpha,
                             const RowMajorMatrixXd& phi,
                             const ThetaFamily& family, int batch_size,
                             PenaltyStrategy strategy = PenaltyStrategy::automatic,
                             const Domain* domain = nullptr);

// Convenience overload assembling predictions, beta, and the penalty state.
Eigen::VectorXd batch_scores(const GpModel& model, const ThetaFamily& family,
                             const Domain& domain, double beta_t,
                             int batch_size,
                             const Eigen::VectorXd& observed_targets);

}  // namespace ssbo

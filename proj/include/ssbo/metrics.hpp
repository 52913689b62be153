#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssbo/acquisition.hpp"
#include "ssbo/optimizer.hpp"

namespace ssbo {

// Per-iteration aggregates across replicates of one condition.
struct CurveSummary {
  Eigen::VectorXi t;
  Eigen::VectorXd inst_mean, inst_p10, inst_p90;
  Eigen::VectorXd simple_mean, simple_p10, simple_p90;
  Eigen::VectorXd mean_variance_label;
  int replicates = 0;
};

// Traces must agree in length and observation order.
CurveSummary aggregate(const std::vector<RunTrace>& traces);

// Linear-interpolation percentile of an unsorted sample, p in [0, 100].
double percentile(std::vector<double> values, double p);

// The quantities entering the cumulative-regret guarantee, evaluated on one
// realized trace: the confidence width at the horizon, the noise constant
// c1 = 8 / log(1 + 1/noise), the empirical information gain of the visited
// inputs, and the family's largest point mass.
struct BoundReport {
  int horizon = 0;
  int domain_size = 0;
  double beta_horizon = 0.0;
  double c1 = 0.0;
  double info_gain = 0.0;
  double pi_star_value = 0.0;
  double bound_value = 0.0;           // sqrt(T c1 beta_T gamma_T |D| pi*)
  double cumulative_regret = 0.0;     // original units
  double cumulative_regret_gp = 0.0;  // standardized units the bound lives in
  double ratio = 0.0;                 // standardized regret / bound
};

BoundReport bound_report(const RunTrace& trace, const Problem& problem,
                         const BetaSchedule& schedule);

// Log-log regression of cumulative regret on t over the last three quarters
// of the horizon; sublinear growth shows up as slope < 1.
struct SlopeCheck {
  double slope = 0.0;
  bool pass = false;
  int points_used = 0;
};

SlopeCheck sublinearity_check(const Eigen::VectorXd& cumulative_regret);

}  // namespace ssbo

#include "ssbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssbo/errors.hpp"
#include "ssbo/gp.hpp"

namespace ssbo {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (p < 0.0 || p > 100.0)
    throw std::invalid_argument("percentile: p outside [0, 100]");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * p / 100.0;
  const size_t lo = static_cast<size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - lo;
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

CurveSummary aggregate(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  const size_t rows = traces[0].rows.size();
  for (const auto& tr : traces)
    if (tr.rows.size() != rows)
      throw LengthMismatch("aggregate: traces of different lengths");

  CurveSummary s;
  s.replicates = static_cast<int>(traces.size());
  s.t.resize(rows);
  s.inst_mean.resize(rows);
  s.inst_p10.resize(rows);
  s.inst_p90.resize(rows);
  s.simple_mean.resize(rows);
  s.simple_p10.resize(rows);
  s.simple_p90.resize(rows);
  s.mean_variance_label.resize(rows);

  std::vector<double> inst(traces.size()), simple(traces.size());
  for (size_t k = 0; k < rows; ++k) {
    s.t(k) = traces[0].rows[k].t;
    double inst_sum = 0.0, simple_sum = 0.0, var_sum = 0.0;
    for (size_t r = 0; r < traces.size(); ++r) {
      const TraceRow& row = traces[r].rows[k];
      if (row.t != s.t(k))
        throw LengthMismatch("aggregate: traces disagree on t ordering");
      inst[r] = row.inst_regret;
      simple[r] = row.simple_regret;
      inst_sum += row.inst_regret;
      simple_sum += row.simple_regret;
      var_sum += row.variance_label;
    }
    s.inst_mean(k) = inst_sum / traces.size();
    s.simple_mean(k) = simple_sum / traces.size();
    s.mean_variance_label(k) = var_sum / traces.size();
    s.inst_p10(k) = percentile(inst, 10.0);
    s.inst_p90(k) = percentile(inst, 90.0);
    s.simple_p10(k) = percentile(simple, 10.0);
    s.simple_p90(k) = percentile(simple, 90.0);
  }
  return s;
}

BoundReport bound_report(const RunTrace& trace, const Problem& problem,
                         const BetaSchedule& schedule) {
  BoundReport r;
  r.horizon = static_cast<int>(trace.rows.size());
  if (r.horizon == 0) throw std::invalid_argument("bound_report: empty trace");
  r.domain_size = problem.domain.size();
  r.beta_horizon = beta_at(schedule, r.horizon, r.domain_size);
  if (!(problem.gp_noise_variance > 0.0))
    throw std::invalid_argument("bound_report: needs positive GP noise");
  r.c1 = 8.0 / std::log(1.0 + 1.0 / problem.gp_noise_variance);

  Eigen::MatrixXd visited(r.horizon, problem.domain.feature_dim());
  for (int k = 0; k < r.horizon; ++k)
    visited.row(k) = problem.domain.points().row(trace.rows[k].x_index);
  r.info_gain =
      empirical_info_gain(problem.kernel, problem.gp_noise_variance, visited);

  r.pi_star_value = pi_star(problem.family);
  r.bound_value = std::sqrt(r.horizon * r.c1 * r.beta_horizon * r.info_gain *
                            r.domain_size * r.pi_star_value);
  for (const auto& row : trace.rows) r.cumulative_regret += row.inst_regret;
  r.cumulative_regret_gp = r.cumulative_regret / problem.f_std;
  r.ratio = r.bound_value > 0.0 ? r.cumulative_regret_gp / r.bound_value : 0.0;
  return r;
}

SlopeCheck sublinearity_check(const Eigen::VectorXd& cumulative_regret) {
  SlopeCheck out;
  const int horizon = static_cast<int>(cumulative_regret.size());
  if (horizon < 2) {
    out.pass = true;
    return out;
  }
  const int t_lo = std::max(2, (horizon + 3) / 4);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int t = t_lo; t <= horizon; ++t) {
    const double r = cumulative_regret(t - 1);
    if (!(r > 0.0)) continue;  // flat-at-zero rows carry no growth signal
    const double x = std::log(static_cast<double>(t));
    const double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  out.points_used = n;
  if (n < 2) {
    out.slope = 0.0;
    out.pass = true;
    return out;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.pass = out.slope < 1.0;
  return out;
}

}  // namespace ssbo

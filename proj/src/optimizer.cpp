#include "ssbo/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssbo/errors.hpp"
#include "ssbo/penalty.hpp"

namespace ssbo {

namespace {

bool penalized_batch(const RunConfig& config) {
  return config.mode == RunMode::batch &&
         config.acquisition.kind == AcquisitionKind::ss_ucb &&
         config.batch_size > 1;
}

}  // namespace

Problem build_problem(const RunConfig& config) {
  if (config.total_observations < 0)
    throw std::invalid_argument("build_problem: negative total_observations");
  if (config.batch_size < 1)
    throw std::invalid_argument("build_problem: batch_size < 1");

  Problem p;
  if (config.domain_kind == Domain::Kind::grid) {
    const auto [lo, hi] = objective_range(config.objective.kind);
    p.domain = Domain::grid(config.objective.dim, lo, hi, config.grid_cells);
    p.family =
        build_grid_family(p.domain, config.means_per_dim, config.std_fractions);
    const double side = hi - lo;
    p.kernel = {KernelKind::squared_exponential, 0.1 * side, 1.0,
                config.objective.dim};
  } else {
    p.domain = Domain::dna_sequences(config.seq_length);
    p.family = build_mutagenesis_family(p.domain, config.mutation_rates);
    p.kernel = {KernelKind::linear_one_hot, 1.0, 1.0, 4 * config.seq_length};
  }

  p.f_values = objective_values(config.objective, p.domain);
  std::tie(p.truth_index, p.truth_value) =
      argmax_truth(p.domain, [&](int i) { return p.f_values(i); });

  const int n = p.domain.size();
  p.f_mean = p.f_values.mean();
  p.f_std = std::sqrt((p.f_values.array() - p.f_mean).square().sum() / n);
  if (p.f_std < 1e-12 * (1.0 + std::abs(p.f_mean))) p.f_std = 1.0;

  double noise_var = config.observation_noise_variance;
  if (noise_var < 0.0) {
    const double range = p.f_values.maxCoeff() - p.f_values.minCoeff();
    noise_var = 1e-4 * range * range;
  }
  p.observation_noise_sd = std::sqrt(noise_var);
  p.gp_noise_variance = noise_var / (p.f_std * p.f_std);

  if (config.acquisition.kind == AcquisitionKind::mean_ucb)
    p.mean_nearest = mean_nearest_indices(p.family, p.domain);
  if (penalized_batch(config)) {
    p.dist = p.domain.pairwise_distances();
    if (p.domain.kind() == Domain::Kind::sequence)
      p.h1_pairs = p.domain.hamming1_pairs();
  }
  return p;
}

namespace {

// Shared state and bookkeeping for both run modes.
struct RunState {
  const Problem& p;
  const RunConfig& cfg;
  Rng rng;
  Eigen::MatrixXd inputs;          // up to N rows
  Eigen::VectorXd targets;         // standardized
  detail::RowMajorMatrixXd kstar;  // k(train_i, domain_j), grown per row
  Eigen::VectorXd prior_diag;
  GpModel model;
  int n = 0;
  double best_f = 0.0;
  RunTrace trace;

  RunState(const Problem& problem, const RunConfig& config)
      : p(problem), cfg(config), rng(config.rng_seed) {
    const int cap = config.total_observations;
    const int d = p.domain.feature_dim();
    inputs.resize(cap, d);
    targets.resize(cap);
    kstar.resize(cap, p.domain.size());
    prior_diag.resize(p.domain.size());
    for (int j = 0; j < p.domain.size(); ++j)
      prior_diag(j) = kernel_value(p.kernel, p.domain.points().row(j),
                                   p.domain.points().row(j));
    model = fit(p.kernel, p.gp_noise_variance, Eigen::MatrixXd(0, d),
                Eigen::VectorXd(0));
    trace.replicate_id = config.replicate_id;
    best_f = -std::numeric_limits<double>::infinity();
  }

  Prediction predict_domain() const {
    return predict_batch_prepared(model, kstar.topRows(n), prior_diag);
  }

  // One observation: draw x from theta, observe, record a trace row.
  void observe(int t, int round, const ThetaChoice& choice) {
    const int x = sample(p.family, choice.index, rng);
    const double eps = p.observation_noise_sd * rng.normal();
    const double f = p.f_values(x);
    const double y = f + eps;
    if (f > best_f) best_f = f;
    trace.rows.push_back({t, round, choice.index, choice.variance_label, x, y,
                          f, p.truth_value - f, p.truth_value - best_f});
    inputs.row(n) = p.domain.points().row(x);
    targets(n) = (y - p.f_mean) / p.f_std;
    ++n;
  }

  // Refit on everything seen and append the new cross-kernel rows.
  void refit(int new_rows) {
    model = fit(p.kernel, p.gp_noise_variance, inputs.topRows(n),
                targets.head(n));
    for (int k = n - new_rows; k < n; ++k)
      kstar.row(k) =
          kernel_cross_row(p.kernel, inputs.row(k), p.domain.points());
  }
};

}  // namespace

RunTrace run_sequential(const Problem& problem, const RunConfig& config) {
  const int n_obs = config.total_observations;
  RunState st(problem, config);
  const auto kind = config.acquisition.kind;
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(problem.family.num_thetas());
  for (int t = 1; t <= n_obs; ++t) {
    if (kind != AcquisitionKind::random) {
      const Prediction pred = st.predict_domain();
      const double beta =
          beta_at(config.acquisition.beta, t, problem.domain.size());
      const Eigen::VectorXd alpha = ucb_values(pred.mean, pred.variance, beta);
      scores = score_thetas(kind, problem.family, alpha, pred.mean,
                            problem.mean_nearest);
    }
    const ThetaChoice choice = select_theta(problem.family, scores, kind, st.rng);
    st.trace.rounds.push_back(
        {t, choice.index,
         kind == AcquisitionKind::random ? 0.0 : scores(choice.index)});
    st.observe(t, t, choice);
    st.refit(1);
  }
  return st.trace;
}

RunTrace run_batch(const Problem& problem, const RunConfig& config) {
  const int n_obs = config.total_observations;
  const int batch = config.batch_size;
  RunState st(problem, config);
  const auto kind = config.acquisition.kind;
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(problem.family.num_thetas());
  int done = 0, round = 0;
  while (done < n_obs) {
    const int b = std::min(batch, n_obs - done);
    const int t_start = done + 1;
    ++round;
    if (kind != AcquisitionKind::random) {
      const Prediction pred = st.predict_domain();
      const double beta =
          beta_at(config.acquisition.beta, t_start, problem.domain.size());
      const Eigen::VectorXd alpha = ucb_values(pred.mean, pred.variance, beta);
      if (kind == AcquisitionKind::ss_ucb && b > 1) {
        const double mhat = st.n > 0 ? st.targets.head(st.n).maxCoeff() : 0.0;
        double lhat = 0.0;
        if (!st.model.empty()) {
          if (problem.domain.kind() == Domain::Kind::sequence)
            lhat = mean_gradient_max_pairs(pred.mean, problem.h1_pairs,
                                           std::sqrt(2.0));
          else
            lhat = mean_gradient_max(st.model, problem.domain.points(),
                                     st.kstar.topRows(st.n));
        }
        const RowMajorMatrixXd phi = build_phi_matrix(
            pred.mean, pred.variance, lhat, mhat, problem.dist);
        scores = batch_scores(alpha, phi, problem.family, b,
                              PenaltyStrategy::automatic, &problem.domain);
      } else {
        scores = score_thetas(kind, problem.family, alpha, pred.mean,
                              problem.mean_nearest);
      }
    }
    const ThetaChoice choice = select_theta(problem.family, scores, kind, st.rng);
    st.trace.rounds.push_back(
        {round, choice.index,
         kind == AcquisitionKind::random ? 0.0 : scores(choice.index)});
    for (int k = 0; k < b; ++k) st.observe(t_start + k, round, choice);
    st.refit(b);
    done += b;
  }
  return st.trace;
}

RunTrace run(const RunConfig& config) {
  const Problem problem = build_problem(config);
  return config.mode == RunMode::batch ? run_batch(problem, config)
                                       : run_sequential(problem, config);
}

void compute_regrets(RunTrace& trace, double truth_value) {
  double best = -std::numeric_limits<double>::infinity();
  for (auto& row : trace.rows) {
    if (row.f_true > best) best = row.f_true;
    row.inst_regret = truth_value - row.f_true;
    row.simple_regret = truth_value - best;
  }
}

}  // namespace ssbo

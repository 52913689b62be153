#include "ssbo/penalty.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ssbo/acquisition.hpp"
#include "ssbo/errors.hpp"

namespace ssbo {

namespace {

// erfc(7) ~ 4e-23: beyond this the result is 0 or 1 to double precision.
constexpr double kErfcCutoff = 7.0;

inline double phi_from_z(double z) {
  if (z > kErfcCutoff) return 1.0;
  if (z < -kErfcCutoff) return 0.0;
  return 0.5 * std::erfc(-z);
}

}  // namespace

double local_penalty_value(double lhat, double mhat, double mu_i, double var_i,
                           double distance) {
  if (var_i < 0.0)
    throw std::invalid_argument("local_penalty_value: negative variance");
  const double num = lhat * distance - mhat + mu_i;
  if (var_i == 0.0) return num > 0.0 ? 1.0 : 0.0;
  return phi_from_z(num / std::sqrt(2.0 * var_i));
}

double local_penalty(const GpModel& model, double lhat, double mhat,
                     const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  const auto [mu, var] = predict(model, xi);
  return local_penalty_value(lhat, mhat, mu, var, (xi - xj).norm());
}

RowMajorMatrixXd build_phi_matrix(const Eigen::VectorXd& mu,
                                  const Eigen::VectorXd& var, double lhat,
                                  double mhat, const Eigen::MatrixXd& dist) {
  const Eigen::Index n = mu.size();
  if (var.size() != n || dist.rows() != n || dist.cols() != n)
    throw LengthMismatch("build_phi_matrix: size mismatch");
  RowMajorMatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double base = mu(i) - mhat;
    double* out = phi.row(i).data();
    const double v = var(i);
    if (v == 0.0) {
      for (Eigen::Index j = 0; j < n; ++j)
        out[j] = lhat * dist(i, j) + base > 0.0 ? 1.0 : 0.0;
      continue;
    }
    const double inv = 1.0 / std::sqrt(2.0 * v);
    for (Eigen::Index j = 0; j < n; ++j)
      out[j] = phi_from_z((lhat * dist(i, j) + base) * inv);
  }
  return phi;
}

PenaltyState update_penalty_state(const GpModel& model, const Domain& domain,
                                  const Eigen::VectorXd& observed_targets) {
  PenaltyState state;
  state.mhat =
      observed_targets.size() > 0 ? observed_targets.maxCoeff() : 0.0;
  const Prediction p = predict_batch(model, domain.points());
  if (!model.empty()) {
    if (domain.kind() == Domain::Kind::sequence)
      state.lhat = mean_gradient_max_pairs(p.mean, domain.hamming1_pairs(),
                                           std::sqrt(2.0));
    else
      state.lhat = mean_gradient_max(model, domain.points());
  }
  state.phi = build_phi_matrix(p.mean, p.variance, state.lhat, state.mhat,
                               domain.pairwise_distances());
  return state;
}

double expected_penalty(const ThetaFamily& family, int theta,
                        const Eigen::VectorXd& phi_xi) {
  return expect(family, theta, phi_xi);
}

double geometric_sum(double p, int batch_size) {
  if (batch_size < 1)
    throw std::invalid_argument("geometric_sum: batch_size must be >= 1");
  double acc = 1.0;
  for (int k = 1; k < batch_size; ++k) acc = acc * p + 1.0;
  return acc;
}

namespace {

Eigen::VectorXd scores_generic(const Eigen::VectorXd& alpha,
                               const RowMajorMatrixXd& phi,
                               const ThetaFamily& family, int b) {
  const int n = family.domain_size();
  Eigen::VectorXd scores(family.num_thetas());
  std::vector<int> supp;
  supp.reserve(n);
  for (int theta = 0; theta < family.num_thetas(); ++theta) {
    const auto row = family.table.row(theta);
    supp.clear();
    for (int j = 0; j < n; ++j)
      if (row(j) > 0.0) supp.push_back(j);
    double score = 0.0;
    for (int i : supp) {
      const double* prow = phi.row(i).data();
      double psi = 0.0;
      for (int j : supp) psi += row(j) * prow[j];
      score += row(i) * alpha(i) * geometric_sum(psi, b);
    }
    scores(theta) = score;
  }
  return scores;
}

// Grid rows are outer products of per-dimension marginals, so the inner
// expectation psi contracts one axis at a time. For 2-D families the two
// contractions are GEMMs shared across all means of a std slot.
Eigen::VectorXd scores_grid_2d(const Eigen::VectorXd& alpha,
                               const RowMajorMatrixXd& phi,
                               const ThetaFamily& family, int b) {
  const int n = family.domain_size();
  const int c = family.cells;
  const int m = family.means_per_dim;
  Eigen::VectorXd scores(family.num_thetas());

  // phi reshaped so that row (i * c + a) holds phi(i, (a, :)).
  Eigen::Map<const RowMajorMatrixXd> f(phi.data(),
                                       static_cast<Eigen::Index>(n) * c, c);

  for (int s = 0; s < family.n_stds; ++s) {
    const auto& margs_x = family.marginals[s][0];
    const auto& margs_y = family.marginals[s][1];
    int max_run = 1;
    for (int k = 0; k < m; ++k)
      max_run = std::max<int>(
          max_run, std::max(margs_x[k].w.size(), margs_y[k].w.size()));

    if (max_run * max_run < 512) {
      // Narrow supports: direct sums over the product support.
      for (int my = 0; my < m; ++my) {
        const auto& qy = margs_y[my];
        for (int mx = 0; mx < m; ++mx) {
          const auto& px = margs_x[mx];
          const int theta = (mx * m + my) * family.n_stds + s;
          const auto row = family.table.row(theta);
          double score = 0.0;
          for (int ia = 0; ia < px.w.size(); ++ia) {
            for (int ib = 0; ib < qy.w.size(); ++ib) {
              const int i = (px.offset + ia) * c + (qy.offset + ib);
              const double* prow = phi.row(i).data();
              double psi = 0.0;
              for (int ja = 0; ja < px.w.size(); ++ja) {
                const double* seg = prow + (px.offset + ja) * c + qy.offset;
                double inner = 0.0;
                for (int jb = 0; jb < qy.w.size(); ++jb)
                  inner += qy.w(jb) * seg[jb];
                psi += px.w(ja) * inner;
              }
              score += row(i) * alpha(i) * geometric_sum(psi, b);
            }
          }
          scores(theta) = score;
        }
      }
      continue;
    }

    // Wide supports: stage 1 contracts the y axis for every mean_y at once,
    // stage 2 contracts the x axis, then the alpha-weighted reduction runs
    // over each theta's stored row.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(c, m);
    for (int my = 0; my < m; ++my)
      q.block(margs_y[my].offset, my, margs_y[my].w.size(), 1) =
          margs_y[my].w;
    Eigen::MatrixXd t(static_cast<Eigen::Index>(n) * c, m);
    t.noalias() = f * q;

    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(c, m);
    for (int mx = 0; mx < m; ++mx)
      p.block(margs_x[mx].offset, mx, margs_x[mx].w.size(), 1) =
          margs_x[mx].w;

    Eigen::MatrixXd psi(n, m);  // psi(i, mx) for the current my
    for (int my = 0; my < m; ++my) {
      Eigen::Map<const RowMajorMatrixXd> t_slice(t.col(my).data(), n, c);
      psi.noalias() = t_slice * p;
      const auto& qy = margs_y[my];
      for (int mx = 0; mx < m; ++mx) {
        const auto& px = margs_x[mx];
        const int theta = (mx * m + my) * family.n_stds + s;
        const auto row = family.table.row(theta);
        double score = 0.0;
        for (int ia = 0; ia < px.w.size(); ++ia) {
          const int base = (px.offset + ia) * c + qy.offset;
          for (int ib = 0; ib < qy.w.size(); ++ib) {
            const int i = base + ib;
            score += row(i) * alpha(i) * geometric_sum(psi(i, mx), b);
          }
        }
        scores(theta) = score;
      }
    }
  }
  return scores;
}

// Mutagenesis rows depend on x only through the Hamming distance to the
// seed, so psi collapses onto ring sums S(seed, h) = sum_{h(j,seed)=h}
// phi(i, j), computed for all seeds at once by a per-position DP.
Eigen::VectorXd scores_sequence(const Eigen::VectorXd& alpha,
                                const RowMajorMatrixXd& phi,
                                const ThetaFamily& family,
                                const Domain& domain, int b) {
  const int n = family.domain_size();
  const int len = family.seq_len;
  const int n_rates = static_cast<int>(family.rates.size());
  const auto& hm = domain.hamming_table();

  Eigen::VectorXd scores = Eigen::VectorXd::Zero(family.num_thetas());
  std::vector<double> cur(static_cast<size_t>(n) * (len + 1));
  std::vector<double> nxt(cur.size());
  double tot_h[16];  // per-h totals over the 4 letters of one position

  for (int i = 0; i < n; ++i) {
    // DP over positions, least-significant (last) position first. State
    // after t steps: value[rest][seed_digits][h], rest of size 4^(len-1-t),
    // seed digits of size 4^t, h in 0..t.
    {
      const double* f = phi.row(i).data();
      int rest = n / 4;
      // t = 0 -> 1: split off the last digit.
      for (int jr = 0; jr < rest; ++jr) {
        const double* fj = f + 4 * jr;
        const double tot = fj[0] + fj[1] + fj[2] + fj[3];
        double* out = &nxt[static_cast<size_t>(jr) * 4 * 2];
        for (int sp = 0; sp < 4; ++sp) {
          out[sp * 2 + 0] = fj[sp];
          out[sp * 2 + 1] = tot - fj[sp];
        }
      }
      cur.swap(nxt);
      int s_size = 4;
      for (int t = 1; t < len; ++t) {
        rest /= 4;
        const int h_old = t + 1, h_new = t + 2;
        for (int jr = 0; jr < rest; ++jr) {
          for (int si = 0; si < s_size; ++si) {
            const size_t in_base =
                ((static_cast<size_t>(jr) * 4) * s_size + si) * h_old;
            const size_t stride = static_cast<size_t>(s_size) * h_old;
            for (int h = 0; h < h_old; ++h)
              tot_h[h] = cur[in_base + h] + cur[in_base + stride + h] +
                         cur[in_base + 2 * stride + h] +
                         cur[in_base + 3 * stride + h];
            for (int sp = 0; sp < 4; ++sp) {
              const size_t match = in_base + static_cast<size_t>(sp) * stride;
              double* out =
                  &nxt[((static_cast<size_t>(jr) * 4 + sp) * s_size + si) *
                       h_new];
              out[0] = cur[match + 0];
              for (int h = 1; h < h_new; ++h) {
                const double keep = h < h_old ? cur[match + h] : 0.0;
                out[h] = keep + (tot_h[h - 1] - cur[match + h - 1]);
              }
            }
          }
        }
        cur.swap(nxt);
        s_size *= 4;
      }
    }
    // cur now holds S(seed, h) with stride len+1 per seed.
    const std::uint8_t* hrow = &hm[static_cast<size_t>(i) * n];
    const double a_i = alpha(i);
    for (int s = 0; s < n; ++s) {
      const double* ringsum = &cur[static_cast<size_t>(s) * (len + 1)];
      for (int r = 0; r < n_rates; ++r) {
        double psi = 0.0;
        for (int h = 0; h <= len; ++h)
          psi += family.rate_weights(r, h) * ringsum[h];
        const double pi_x = family.rate_weights(r, hrow[s]);
        scores(s * n_rates + r) += pi_x * a_i * geometric_sum(psi, b);
      }
    }
  }
  return scores;
}

}  // namespace

Eigen::VectorXd batch_scores(const Eigen::VectorXd& alpha,
                             const RowMajorMatrixXd& phi,
                             const ThetaFamily& family, int batch_size,
                             PenaltyStrategy strategy, const Domain* domain) {
  if (alpha.size() != family.domain_size())
    throw LengthMismatch("batch_scores: alpha length != domain size");
  if (batch_size < 1)
    throw std::invalid_argument("batch_scores: batch_size must be >= 1");
  if (batch_size == 1)  // no pending draws to penalize
    return family.table * alpha;
  if (phi.rows() != family.domain_size() || phi.cols() != family.domain_size())
    throw LengthMismatch("batch_scores: phi shape != domain size");

  if (strategy == PenaltyStrategy::automatic) {
    if (family.structure == ThetaFamily::Structure::grid_separable &&
        family.grid_dim == 2)
      strategy = PenaltyStrategy::grid_separable;
    else if (family.structure == ThetaFamily::Structure::sequence_hamming &&
             domain != nullptr)
      strategy = PenaltyStrategy::sequence_hamming;
    else
      strategy = PenaltyStrategy::generic;
  }
  switch (strategy) {
    case PenaltyStrategy::generic:
      return scores_generic(alpha, phi, family, batch_size);
    case PenaltyStrategy::grid_separable:
      if (family.structure != ThetaFamily::Structure::grid_separable ||
          family.grid_dim != 2)
        throw DomainMismatch("batch_scores: family lacks 2-D grid structure");
      return scores_grid_2d(alpha, phi, family, batch_size);
    case PenaltyStrategy::sequence_hamming:
      if (family.structure != ThetaFamily::Structure::sequence_hamming ||
          domain == nullptr || domain->kind() != Domain::Kind::sequence ||
          domain->size() != family.domain_size())
        throw DomainMismatch("batch_scores: family lacks sequence structure");
      return scores_sequence(alpha, phi, family, *domain, batch_size);
    case PenaltyStrategy::automatic:
      break;
  }
  throw std::logic_error("batch_scores: unknown strategy");
}

Eigen::VectorXd batch_scores(const GpModel& model, const ThetaFamily& family,
                             const Domain& domain, double beta_t,
                             int batch_size,
                             const Eigen::VectorXd& observed_targets) {
  if (family.domain_size() != domain.size())
    throw DomainMismatch("batch_scores: family/domain sizes");
  if (batch_size == 1) {
    const Prediction p = predict_batch(model, domain.points());
    return family.table * ucb_values(p.mean, p.variance, beta_t);
  }
  const Prediction p = predict_batch(model, domain.points());
  const Eigen::VectorXd alpha = ucb_values(p.mean, p.variance, beta_t);
  const PenaltyState state =
      update_penalty_state(model, domain, observed_targets);
  return batch_scores(alpha, state.phi, family, batch_size,
                      PenaltyStrategy::automatic, &domain);
}

}  // namespace ssbo

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssbo/domain.hpp"
#include "ssbo/rng.hpp"

namespace ssbo {

class Rng;

using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Finite family of sampling distributions over a domain, stored as a dense
// row-stochastic table pi(x | theta). Builders also record the structure the
// rows were assembled from (per-dimension marginals, or Hamming weights),
// which downstream scoring exploits without changing any row's values.
struct ThetaFamily {
  enum class Structure { grid_separable, sequence_hamming, generic };

  Structure structure = Structure::generic;
  RowMajorMatrixXd table;          // |Theta| x |D|
  Eigen::VectorXd variance_label;  // grid: std^2 (domain units); sequences: rate
  Eigen::MatrixXd mean_feature;    // E_pi[x], |Theta| x feature_dim

  // Grid structure: theta = mean_flat * n_stds + std_slot, mean_flat running
  // row-major over per-dimension mean indices, std slots ascending.
  int grid_dim = 0;
  int cells = 0;
  int means_per_dim = 0;
  int n_stds = 0;
  struct Marginal {
    int offset = 0;      // first domain cell with nonzero weight
    Eigen::VectorXd w;   // contiguous nonzero weights, sums to 1
  };
  // marginals[std_slot][dim][mean_index]
  std::vector<std::vector<std::vector<Marginal>>> marginals;

  // Sequence structure: theta = seed_index * n_rates + rate_slot, rates
  // ascending. rate_weights(r, h) is the probability of any one sequence at
  // Hamming distance h from the seed.
  int seq_len = 0;
  std::vector<double> rates;
  Eigen::MatrixXd rate_weights;  // n_rates x (seq_len + 1)

  int num_thetas() const { return static_cast<int>(table.rows()); }
  int domain_size() const { return static_cast<int>(table.cols()); }

  int grid_std_slot(int theta) const { return theta % n_stds; }
  int grid_mean_flat(int theta) const { return theta / n_stds; }
  int seq_seed_index(int theta) const { return theta / static_cast<int>(rates.size()); }
  int seq_rate_slot(int theta) const { return theta % static_cast<int>(rates.size()); }
};

inline const std::vector<double>& default_grid_std_fractions() {
  static const std::vector<double> f{1e-3, 5e-3, 2.5e-2, 1e-1, 2e-1};
  return f;
}

inline const std::vector<double>& default_mutation_rates() {
  static const std::vector<double> r{0.05, 0.15, 0.30, 0.50};
  return r;
}

// Axis-aligned discretized normals: means on a means_per_dim^dim lattice of
// cell centers, one shared std per slot given as a fraction of each
// dimension's side length. Marginals drop entries below 1e-6 of their mass
// and renormalize, so every stored table entry is either 0 or >= 1e-12 and
// rows still sum to 1.
ThetaFamily build_grid_family(const Domain& domain, int means_per_dim,
                              const std::vector<double>& std_fractions);

// Mutagenesis distributions around every seed sequence: a sequence at
// Hamming distance h from the seed has probability (1-mu)^(L-h) (mu/3)^h.
// Rates must lie in (0, 0.75].
ThetaFamily build_mutagenesis_family(const Domain& domain,
                                     const std::vector<double>& rates);

// One point mass per domain element; handy for reductions and tests.
ThetaFamily point_mass_family(const Domain& domain);

// E_pi(theta)[values] as an exact finite sum.
double expect(const ThetaFamily& family, int theta,
              const Eigen::VectorXd& values);

// Inverse-CDF draw from row theta using one uniform variate.
int sample(const ThetaFamily& family, int theta, Rng& rng);

// Largest single-point probability across the whole family.
double pi_star(const ThetaFamily& family);

}  // namespace ssbo

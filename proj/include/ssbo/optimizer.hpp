#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "ssbo/acquisition.hpp"
#include "ssbo/domain.hpp"
#include "ssbo/gp.hpp"
#include "ssbo/objectives.hpp"
#include "ssbo/theta_family.hpp"

namespace ssbo {

enum class RunMode { sequential, batch };

struct RunConfig {
  // Search space.
  Domain::Kind domain_kind = Domain::Kind::grid;
  int grid_cells = 64;
  int seq_length = 5;

  // Sampling-distribution family.
  int means_per_dim = 32;
  std::vector<double> std_fractions = default_grid_std_fractions();
  std::vector<double> mutation_rates = default_mutation_rates();

  ObjectiveSpec objective;
  AcquisitionSpec acquisition;

  RunMode mode = RunMode::sequential;
  int batch_size = 1;
  int total_observations = 200;

  // Negative means automatic: 1e-4 times the squared range of the
  // objective over the enumerated domain.
  double observation_noise_variance = -1.0;

  std::uint64_t rng_seed = 0;
  int replicate_id = 0;
};

// Everything derived from a RunConfig that is shared between replicates:
// the enumerated domain, the distribution family, the objective table and
// its maximum, target standardization, and the GP setup.
struct Problem {
  Domain domain;
  ThetaFamily family;
  Eigen::VectorXd f_values;  // original units, one per domain point
  int truth_index = 0;
  double truth_value = 0.0;
  double f_mean = 0.0;
  double f_std = 1.0;
  double observation_noise_sd = 0.0;  // original units
  double gp_noise_variance = 0.0;     // standardized units
  KernelSpec kernel;
  std::vector<int> mean_nearest;           // mean_ucb only
  Eigen::MatrixXd dist;                    // penalized batch only
  std::vector<std::pair<int, int>> h1_pairs;  // penalized batch on sequences
};

Problem build_problem(const RunConfig& config);

struct TraceRow {
  int t = 0;      // observation counter, 1-based
  int round = 0;  // selection round (== t in sequential mode)
  int theta_index = 0;
  double variance_label = 0.0;
  int x_index = 0;
  double y = 0.0;       // noisy observation
  double f_true = 0.0;  // noiseless objective value
  double inst_regret = 0.0;
  double simple_regret = 0.0;
};

struct RoundRecord {
  int round = 0;
  int theta_index = 0;
  double score = 0.0;  // selected theta's acquisition score
};

struct RunTrace {
  int replicate_id = 0;
  std::vector<TraceRow> rows;
  std::vector<RoundRecord> rounds;
};

// One optimization run. Deterministic given the config; the batch runner
// with batch_size == 1 reproduces the sequential trace exactly.
RunTrace run_sequential(const Problem& problem, const RunConfig& config);
RunTrace run_batch(const Problem& problem, const RunConfig& config);

// Builds the problem and dispatches on config.mode.
RunTrace run(const RunConfig& config);

// Recomputes both regret columns from f_true and the given maximum.
void compute_regrets(RunTrace& trace, double truth_value);

}  // namespace ssbo

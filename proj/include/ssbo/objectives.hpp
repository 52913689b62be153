#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "ssbo/domain.hpp"

namespace ssbo {

// Classic minimization benchmarks, negated so larger is better, plus a
// random linear+pairwise sequence landscape.
enum class ObjectiveKind {
  ackley,
  michalewicz,
  rastrigin,
  schwefel,
  seq_linear_quadratic,
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::ackley;
  int dim = 2;                    // grid kinds
  int michalewicz_m = 10;         // steepness
  std::uint64_t oracle_seed = 0;  // seq_linear_quadratic
};

// Per-dimension box [lo, hi] each benchmark is defined on.
std::pair<double, double> objective_range(ObjectiveKind kind);

// Negated benchmark value; throws OutOfRange outside the box.
double evaluate(const ObjectiveSpec& spec, const Eigen::VectorXd& point);

// Random fitness landscape over fixed-length sequences: one coefficient per
// (position, letter) plus one per (position pair, letter pair), the pair
// terms scaled by 0.5. Coefficients are standard normal draws in a fixed
// order, so a seed pins the whole landscape.
struct SeqOracle {
  std::uint64_t seed = 0;
  int length = 5;
  Eigen::MatrixXd linear;               // length x 4
  std::vector<Eigen::MatrixXd> pair;    // one 4x4 block per (i < j), lexicographic
  double evaluate_digits(const Eigen::Ref<const Eigen::VectorXi>& digits) const;
};

SeqOracle build_seq_oracle(std::uint64_t seed, int length = 5);

// Objective evaluated over every enumerated domain point.
Eigen::VectorXd objective_values(const ObjectiveSpec& spec,
                                 const Domain& domain);

struct LandscapeStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int argmax = 0;
  // local_optima[r-1]: sequences at least as fit as every neighbor within
  // Hamming radius r, for r = 1..4.
  std::array<int, 4> local_optima{};
};

LandscapeStats fitness_landscape_stats(const SeqOracle& oracle,
                                       const Domain& domain);

}  // namespace ssbo

#include "ssbo/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssbo/errors.hpp"
#include "ssbo/rng.hpp"

namespace ssbo {

std::pair<double, double> objective_range(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::ackley:
      return {-32.768, 32.768};
    case ObjectiveKind::michalewicz:
      return {0.0, M_PI};
    case ObjectiveKind::rastrigin:
      return {-5.12, 5.12};
    case ObjectiveKind::schwefel:
      return {-500.0, 500.0};
    case ObjectiveKind::seq_linear_quadratic:
      throw std::invalid_argument("objective_range: sequence kind has no box");
  }
  throw std::logic_error("objective_range: unknown kind");
}

double evaluate(const ObjectiveSpec& spec, const Eigen::VectorXd& point) {
  if (spec.kind == ObjectiveKind::seq_linear_quadratic)
    throw std::invalid_argument("evaluate: sequence kind takes digit rows");
  const int d = static_cast<int>(point.size());
  if (d != spec.dim) throw DimensionMismatch("evaluate: point dimension");
  const auto [lo, hi] = objective_range(spec.kind);
  for (int i = 0; i < d; ++i)
    if (point(i) < lo || point(i) > hi)
      throw OutOfRange("evaluate: point outside objective box");

  switch (spec.kind) {
    case ObjectiveKind::ackley: {
      double sq = 0.0, cs = 0.0;
      for (int i = 0; i < d; ++i) {
        sq += point(i) * point(i);
        cs += std::cos(2.0 * M_PI * point(i));
      }
      const double v = -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) -
                       std::exp(cs / d) + 20.0 + std::exp(1.0);
      return -v;
    }
    case ObjectiveKind::michalewicz: {
      double v = 0.0;
      for (int i = 0; i < d; ++i) {
        const double s = std::sin((i + 1) * point(i) * point(i) / M_PI);
        v -= std::sin(point(i)) * std::pow(s, 2 * spec.michalewicz_m);
      }
      return -v;
    }
    case ObjectiveKind::rastrigin: {
      double v = 10.0 * d;
      for (int i = 0; i < d; ++i)
        v += point(i) * point(i) - 10.0 * std::cos(2.0 * M_PI * point(i));
      return -v;
    }
    case ObjectiveKind::schwefel: {
      double v = 418.9829 * d;
      for (int i = 0; i < d; ++i)
        v -= point(i) * std::sin(std::sqrt(std::abs(point(i))));
      return -v;
    }
    default:
      throw std::logic_error("evaluate: unknown kind");
  }
}

SeqOracle build_seq_oracle(std::uint64_t seed, int length) {
  if (length < 2) throw std::invalid_argument("build_seq_oracle: length < 2");
  SeqOracle oracle;
  oracle.seed = seed;
  oracle.length = length;
  Rng rng(seed);
  oracle.linear.resize(length, 4);
  for (int p = 0; p < length; ++p)
    for (int c = 0; c < 4; ++c) oracle.linear(p, c) = rng.normal();
  for (int i = 0; i < length; ++i) {
    for (int j = i + 1; j < length; ++j) {
      Eigen::MatrixXd q(4, 4);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) q(a, b) = 0.5 * rng.normal();
      oracle.pair.push_back(std::move(q));
    }
  }
  return oracle;
}

double SeqOracle::evaluate_digits(
    const Eigen::Ref<const Eigen::VectorXi>& digits) const {
  if (digits.size() != length)
    throw DimensionMismatch("SeqOracle: digit count != length");
  double v = 0.0;
  for (int p = 0; p < length; ++p) v += linear(p, digits(p));
  int k = 0;
  for (int i = 0; i < length; ++i)
    for (int j = i + 1; j < length; ++j)
      v += pair[k++](digits(i), digits(j));
  return v;
}

Eigen::VectorXd objective_values(const ObjectiveSpec& spec,
                                 const Domain& domain) {
  Eigen::VectorXd values(domain.size());
  if (spec.kind == ObjectiveKind::seq_linear_quadratic) {
    if (domain.kind() != Domain::Kind::sequence)
      throw DomainMismatch("objective_values: sequence objective on grid");
    const SeqOracle oracle = build_seq_oracle(spec.oracle_seed, domain.length());
    for (int i = 0; i < domain.size(); ++i)
      values(i) = oracle.evaluate_digits(domain.digits().row(i).transpose());
    return values;
  }
  if (domain.kind() != Domain::Kind::grid)
    throw DomainMismatch("objective_values: grid objective on sequences");
  for (int i = 0; i < domain.size(); ++i)
    values(i) = evaluate(spec, domain.points().row(i).transpose());
  return values;
}

LandscapeStats fitness_landscape_stats(const SeqOracle& oracle,
                                       const Domain& domain) {
  if (domain.kind() != Domain::Kind::sequence)
    throw DomainMismatch("fitness_landscape_stats: needs a sequence domain");
  const int n = domain.size();
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = oracle.evaluate_digits(domain.digits().row(i).transpose());

  LandscapeStats st;
  st.mean = v.mean();
  st.stddev = std::sqrt((v.array() - st.mean).square().sum() / n);
  st.min = v.minCoeff();
  st.max = v.maxCoeff(&st.argmax);

  // Radius at which each point is first beaten; local optimum at radius r
  // means nothing within Hamming <= r is strictly fitter.
  const auto& hm = domain.hamming_table();
  for (int i = 0; i < n; ++i) {
    int beaten_at = std::numeric_limits<int>::max();
    const std::uint8_t* hrow = &hm[static_cast<size_t>(i) * n];
    for (int j = 0; j < n; ++j)
      if (v(j) > v(i) && hrow[j] < beaten_at) beaten_at = hrow[j];
    for (int r = 1; r <= 4; ++r)
      if (beaten_at > r) ++st.local_optima[r - 1];
  }
  return st;
}

}  // namespace ssbo

#include "ssbo/theta_family.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ssbo/errors.hpp"

namespace ssbo {

namespace {

constexpr double kMarginalFloor = 1e-6;  // sqrt of the 1e-12 entry floor

// Discretized normal over the cell centers of one axis, entries below
// kMarginalFloor of the normalized mass removed. The support of a unimodal
// row is contiguous, so it is stored as an offset plus a dense run. If every
// weight underflows, the limit distribution (point mass on the nearest
// center) is used.
ThetaFamily::Marginal discretize_normal(const Eigen::VectorXd& centers,
                                        double mean, double sigma) {
  const Eigen::Index n = centers.size();
  Eigen::VectorXd w(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double z = (centers(c) - mean) / sigma;
    w(c) = std::exp(-0.5 * z * z);
  }
  const double total = w.sum();
  ThetaFamily::Marginal m;
  if (total <= 0.0) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < n; ++c)
      if (std::abs(centers(c) - mean) < std::abs(centers(best) - mean))
        best = c;
    m.offset = static_cast<int>(best);
    m.w = Eigen::VectorXd::Ones(1);
    return m;
  }
  w /= total;
  Eigen::Index first = -1, last = -1;
  for (Eigen::Index c = 0; c < n; ++c) {
    if (w(c) >= kMarginalFloor) {
      if (first < 0) first = c;
      last = c;
    }
  }
  m.offset = static_cast<int>(first);
  m.w = w.segment(first, last - first + 1);
  // Interior entries of a unimodal run are at least min(w(first), w(last)),
  // so no zeros survive inside the window.
  m.w /= m.w.sum();
  return m;
}

}  // namespace

ThetaFamily build_grid_family(const Domain& domain, int means_per_dim,
                              const std::vector<double>& std_fractions) {
  if (domain.kind() != Domain::Kind::grid)
    throw DomainMismatch("build_grid_family: not a grid domain");
  if (means_per_dim < 1)
    throw std::invalid_argument("build_grid_family: means_per_dim must be >= 1");
  if (std_fractions.empty())
    throw NonPositiveStd("build_grid_family: empty std list");
  for (double f : std_fractions)
    if (!(f > 0.0)) throw NonPositiveStd("build_grid_family: std must be positive");

  std::vector<double> stds = std_fractions;
  std::sort(stds.begin(), stds.end());

  const int dim = domain.dim();
  const int cells = domain.cells_per_dim();
  const int n_stds = static_cast<int>(stds.size());

  ThetaFamily fam;
  fam.structure = ThetaFamily::Structure::grid_separable;
  fam.grid_dim = dim;
  fam.cells = cells;
  fam.means_per_dim = means_per_dim;
  fam.n_stds = n_stds;

  // Cell centers along each axis (the domain enumerates their product).
  std::vector<Eigen::VectorXd> axis(dim);
  for (int d = 0; d < dim; ++d) {
    axis[d].resize(cells);
    for (int c = 0; c < cells; ++c)
      axis[d](c) = domain.lo()(d) +
                   (c + 0.5) * (domain.hi()(d) - domain.lo()(d)) / cells;
  }

  fam.marginals.assign(n_stds, std::vector<std::vector<ThetaFamily::Marginal>>(
                                   dim, std::vector<ThetaFamily::Marginal>(
                                            means_per_dim)));
  for (int s = 0; s < n_stds; ++s) {
    for (int d = 0; d < dim; ++d) {
      const double side = domain.hi()(d) - domain.lo()(d);
      const double sigma = stds[s] * side;
      for (int k = 0; k < means_per_dim; ++k) {
        const double mean = domain.lo()(d) + (k + 0.5) * side / means_per_dim;
        fam.marginals[s][d][k] = discretize_normal(axis[d], mean, sigma);
      }
    }
  }

  Eigen::Index n_means = 1;
  for (int d = 0; d < dim; ++d) n_means *= means_per_dim;
  const Eigen::Index n_thetas = n_means * n_stds;
  fam.table = RowMajorMatrixXd::Zero(n_thetas, domain.size());
  fam.variance_label.resize(n_thetas);
  fam.mean_feature.resize(n_thetas, dim);

  const double side0 = domain.hi()(0) - domain.lo()(0);
  std::vector<int> midx(dim);
  for (Eigen::Index mf = 0; mf < n_means; ++mf) {
    Eigen::Index rem = mf;
    for (int d = dim - 1; d >= 0; --d) {
      midx[d] = static_cast<int>(rem % means_per_dim);
      rem /= means_per_dim;
    }
    for (int s = 0; s < n_stds; ++s) {
      const Eigen::Index theta = mf * n_stds + s;
      fam.variance_label(theta) = (stds[s] * side0) * (stds[s] * side0);
      // Fill the row as the outer product of the per-dimension marginals,
      // walking the support lattice with an odometer.
      std::vector<const ThetaFamily::Marginal*> m(dim);
      for (int d = 0; d < dim; ++d) m[d] = &fam.marginals[s][d][midx[d]];
      std::vector<int> pos(dim, 0);
      while (true) {
        double v = 1.0;
        Eigen::Index cell = 0;
        for (int d = 0; d < dim; ++d) {
          v *= m[d]->w(pos[d]);
          cell = cell * cells + (m[d]->offset + pos[d]);
        }
        fam.table(theta, cell) = v;
        int d = dim - 1;
        for (; d >= 0; --d) {
          if (++pos[d] < m[d]->w.size()) break;
          pos[d] = 0;
        }
        if (d < 0) break;
      }
      for (int d = 0; d < dim; ++d) {
        double e = 0.0;
        for (Eigen::Index c = 0; c < m[d]->w.size(); ++c)
          e += m[d]->w(c) * axis[d](m[d]->offset + c);
        fam.mean_feature(theta, d) = e;
      }
    }
  }
  return fam;
}

ThetaFamily build_mutagenesis_family(const Domain& domain,
                                     const std::vector<double>& rates_in) {
  if (domain.kind() != Domain::Kind::sequence)
    throw DomainMismatch("build_mutagenesis_family: not a sequence domain");
  if (rates_in.empty())
    throw RateOutOfRange("build_mutagenesis_family: empty rate list");
  for (double r : rates_in)
    if (!(r > 0.0) || r > 0.75)
      throw RateOutOfRange("build_mutagenesis_family: rate outside (0, 0.75]");

  std::vector<double> rates = rates_in;
  std::sort(rates.begin(), rates.end());

  const int n = domain.size();
  const int len = domain.length();
  const int n_rates = static_cast<int>(rates.size());

  ThetaFamily fam;
  fam.structure = ThetaFamily::Structure::sequence_hamming;
  fam.seq_len = len;
  fam.rates = rates;
  fam.rate_weights.resize(n_rates, len + 1);
  for (int r = 0; r < n_rates; ++r) {
    const double mu = rates[r];
    for (int h = 0; h <= len; ++h)
      fam.rate_weights(r, h) =
          std::pow(1.0 - mu, len - h) * std::pow(mu / 3.0, h);
  }

  const Eigen::Index n_thetas = static_cast<Eigen::Index>(n) * n_rates;
  fam.table.resize(n_thetas, n);
  fam.variance_label.resize(n_thetas);
  fam.mean_feature.resize(n_thetas, domain.feature_dim());
  const auto& hm = domain.hamming_table();
  for (int s = 0; s < n; ++s) {
    for (int r = 0; r < n_rates; ++r) {
      const Eigen::Index theta = static_cast<Eigen::Index>(s) * n_rates + r;
      const double mu = rates[r];
      fam.variance_label(theta) = mu;
      double* row = fam.table.row(theta).data();
      const std::uint8_t* hrow = &hm[static_cast<size_t>(s) * n];
      for (int x = 0; x < n; ++x) row[x] = fam.rate_weights(r, hrow[x]);
      // Mean one-hot feature: per position, (1 - mu) on the seed letter and
      // mu/3 elsewhere.
      for (int p = 0; p < len; ++p) {
        for (int c = 0; c < 4; ++c)
          fam.mean_feature(theta, 4 * p + c) =
              (c == domain.digits()(s, p)) ? 1.0 - mu : mu / 3.0;
      }
    }
  }
  return fam;
}

ThetaFamily point_mass_family(const Domain& domain) {
  const int n = domain.size();
  ThetaFamily fam;
  fam.structure = ThetaFamily::Structure::generic;
  fam.table = RowMajorMatrixXd::Identity(n, n);
  fam.variance_label = Eigen::VectorXd::Zero(n);
  fam.mean_feature = domain.points();
  return fam;
}

double expect(const ThetaFamily& family, int theta,
              const Eigen::VectorXd& values) {
  if (theta < 0 || theta >= family.num_thetas())
    throw std::out_of_range("expect: theta index");
  if (values.size() != family.domain_size())
    throw LengthMismatch("expect: values length != domain size");
  return family.table.row(theta).dot(values.transpose());
}

int sample(const ThetaFamily& family, int theta, Rng& rng) {
  if (theta < 0 || theta >= family.num_thetas())
    throw std::out_of_range("sample: theta index");
  const double u = rng.uniform01();
  const auto row = family.table.row(theta);
  double cum = 0.0;
  int last_nz = -1;
  for (int j = 0; j < family.domain_size(); ++j) {
    const double p = row(j);
    if (p <= 0.0) continue;
    cum += p;
    last_nz = j;
    if (u < cum) return j;
  }
  // Roundoff can leave cum slightly below 1; the tail belongs to the last
  // nonzero bucket.
  if (last_nz < 0) throw std::logic_error("sample: empty distribution row");
  return last_nz;
}

double pi_star(const ThetaFamily& family) {
  return family.table.maxCoeff();
}

}  // namespace ssbo

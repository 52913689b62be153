#include "ssbo/domain.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "ssbo/errors.hpp"

namespace ssbo {

namespace {

constexpr char kAlphabet[] = {'A', 'C', 'G', 'T'};

std::string grid_label(const Eigen::VectorXd& p) {
  std::string s;
  char buf[32];
  for (Eigen::Index d = 0; d < p.size(); ++d) {
    std::snprintf(buf, sizeof buf, "%.10g", p(d));
    if (d) s += ';';
    s += buf;
  }
  return s;
}

}  // namespace

Domain Domain::grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                    int cells_per_dim) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw DimensionMismatch("Domain::grid: lo/hi sizes");
  if (cells_per_dim < 1)
    throw std::invalid_argument("Domain::grid: cells_per_dim must be >= 1");
  for (Eigen::Index d = 0; d < lo.size(); ++d)
    if (!(lo(d) < hi(d)))
      throw std::invalid_argument("Domain::grid: need lo < hi per dimension");

  Domain dom;
  dom.kind_ = Kind::grid;
  dom.dim_ = static_cast<int>(lo.size());
  dom.cells_ = cells_per_dim;
  dom.lo_ = lo;
  dom.hi_ = hi;

  Eigen::Index total = 1;
  for (int d = 0; d < dom.dim_; ++d) total *= cells_per_dim;
  dom.points_.resize(total, dom.dim_);
  dom.labels_.resize(total);
  Eigen::VectorXd p(dom.dim_);
  std::vector<int> idx(dom.dim_, 0);
  for (Eigen::Index i = 0; i < total; ++i) {
    for (int d = 0; d < dom.dim_; ++d)
      p(d) = lo(d) + (idx[d] + 0.5) * (hi(d) - lo(d)) / cells_per_dim;
    dom.points_.row(i) = p;
    dom.labels_[i] = grid_label(p);
    // Row-major increment, last dimension fastest.
    for (int d = dom.dim_ - 1; d >= 0; --d) {
      if (++idx[d] < cells_per_dim) break;
      idx[d] = 0;
    }
  }
  return dom;
}

Domain Domain::grid(int dim, double lo, double hi, int cells_per_dim) {
  return grid(Eigen::VectorXd::Constant(dim, lo),
              Eigen::VectorXd::Constant(dim, hi), cells_per_dim);
}

Domain Domain::dna_sequences(int length) {
  if (length < 1 || length > 12)
    throw std::invalid_argument("Domain::dna_sequences: length out of range");
  Domain dom;
  dom.kind_ = Kind::sequence;
  dom.length_ = length;
  Eigen::Index total = 1;
  for (int d = 0; d < length; ++d) total *= 4;
  dom.points_ = Eigen::MatrixXd::Zero(total, 4 * length);
  dom.digits_.resize(total, length);
  dom.labels_.resize(total);
  for (Eigen::Index i = 0; i < total; ++i) {
    Eigen::Index rem = i;
    std::string s(length, 'A');
    // First position is the most significant digit: lexicographic order.
    for (int pos = length - 1; pos >= 0; --pos) {
      const int c = static_cast<int>(rem % 4);
      rem /= 4;
      dom.digits_(i, pos) = c;
      dom.points_(i, 4 * pos + c) = 1.0;
      s[pos] = kAlphabet[c];
    }
    dom.labels_[i] = s;
  }
  return dom;
}

int Domain::hamming(int i, int j) const {
  int h = 0;
  for (int p = 0; p < length_; ++p) h += digits_(i, p) != digits_(j, p);
  return h;
}

std::vector<std::pair<int, int>> Domain::hamming1_pairs() const {
  if (kind_ != Kind::sequence)
    throw DomainMismatch("hamming1_pairs: not a sequence domain");
  std::vector<std::pair<int, int>> pairs;
  const int n = size();
  // Stride of position p in the index encoding (first position slowest).
  for (int i = 0; i < n; ++i) {
    Eigen::Index stride = 1;
    for (int p = length_ - 1; p >= 0; --p) {
      const int c = digits_(i, p);
      for (int c2 = c + 1; c2 < 4; ++c2)
        pairs.emplace_back(i, i + static_cast<int>((c2 - c) * stride));
      stride *= 4;
    }
  }
  return pairs;
}

const std::vector<std::uint8_t>& Domain::hamming_table() const {
  if (kind_ != Kind::sequence)
    throw DomainMismatch("hamming_table: not a sequence domain");
  if (hamming_.empty()) {
    const int n = size();
    hamming_.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        hamming_[static_cast<size_t>(i) * n + j] =
            static_cast<std::uint8_t>(hamming(i, j));
  }
  return hamming_;
}

int Domain::nearest_point(const Eigen::VectorXd& feature) const {
  if (feature.size() != points_.cols())
    throw DimensionMismatch("nearest_point: feature dimension");
  int best = 0;
  double best_d = (points_.row(0).transpose() - feature).squaredNorm();
  for (int i = 1; i < size(); ++i) {
    const double d = (points_.row(i).transpose() - feature).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Eigen::MatrixXd Domain::pairwise_distances() const {
  const int n = size();
  Eigen::MatrixXd d(n, n);
  if (kind_ == Kind::sequence) {
    // One-hot embedding: Hamming distance h maps to Euclidean sqrt(2h).
    double table[16];
    for (int h = 0; h <= length_; ++h) table[h] = std::sqrt(2.0 * h);
    const auto& hm = hamming_table();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d(i, j) = table[hm[static_cast<size_t>(i) * n + j]];
    return d;
  }
  for (int i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (int j = 0; j < i; ++j) {
      const double v = (points_.row(i) - points_.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace ssbo

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ssbo {

// Finite search domain with an explicit enumeration. Two shapes are
// supported: an axis-aligned grid of cell centers, and the set of all
// fixed-length DNA sequences embedded as one-hot vectors.
class Domain {
 public:
  enum class Kind { grid, sequence };

  // Cell centers lo_d + (i + 0.5) (hi_d - lo_d) / cells along each axis,
  // enumerated row-major with the first dimension slowest.
  static Domain grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                     int cells_per_dim);
  static Domain grid(int dim, double lo, double hi, int cells_per_dim);

  // All 4^length sequences over {A, C, G, T}, lexicographic with A < C < G < T,
  // as one-hot rows of dimension 4 * length.
  static Domain dna_sequences(int length);

  Kind kind() const { return kind_; }
  int size() const { return static_cast<int>(points_.rows()); }
  int feature_dim() const { return static_cast<int>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }

  // Human-readable coordinates ("x1;x2") or sequence letters ("ACGTA").
  const std::string& label(int index) const { return labels_[index]; }

  // Grid accessors.
  int dim() const { return dim_; }
  int cells_per_dim() const { return cells_; }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

  // Sequence accessors.
  int length() const { return length_; }
  // Base-4 digit codes (A=0,...,T=3), size() x length.
  const Eigen::MatrixXi& digits() const { return digits_; }
  int hamming(int i, int j) const;
  // All unordered index pairs at Hamming distance 1.
  std::vector<std::pair<int, int>> hamming1_pairs() const;
  // Dense Hamming distance table (bytes), built on first use.
  const std::vector<std::uint8_t>& hamming_table() const;

  // Index of the enumerated point closest in Euclidean norm to feature;
  // ties resolve to the lowest index.
  int nearest_point(const Eigen::VectorXd& feature) const;

  // Pairwise Euclidean distances between enumerated points; |D| x |D|.
  Eigen::MatrixXd pairwise_distances() const;

 private:
  Kind kind_ = Kind::grid;
  Eigen::MatrixXd points_;
  std::vector<std::string> labels_;
  // grid
  int dim_ = 0;
  int cells_ = 0;
  Eigen::VectorXd lo_, hi_;
  // sequence
  int length_ = 0;
  Eigen::MatrixXi digits_;
  mutable std::vector<std::uint8_t> hamming_;
};

// Index and value of the maximum of f(index) over the domain; ties resolve
// to the lowest index.
template <class F>
std::pair<int, double> argmax_truth(const Domain& domain, F&& f) {
  int best = 0;
  double best_v = f(0);
  for (int i = 1; i < domain.size(); ++i) {
    const double v = f(i);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return {best, best_v};
}

}  // namespace ssbo

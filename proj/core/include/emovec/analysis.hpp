// SPDX-License-Identifier: Apache-2.0
#pragma once

// Co-occurrence of emotion vectors and its symmetric eigendecomposition.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "emovec/estimator.hpp"

namespace emovec {

/// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }

  double frobenius_norm() const;
  double trace() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

enum class VectorSource { kScaled, kRaw };

struct CooccurrenceMatrix {
  Matrix m;
  std::size_t n_vectors = 0;
  bool centered = false;
  std::string dictionary_digest;
};

/// (1/N) sum_d s_d s_d^T over the rows, or the covariance when `centered`.
/// Only the upper triangle is accumulated; the lower one is a mirror copy.
Matrix second_moment(std::span<const std::vector<double>> rows, bool centered);

CooccurrenceMatrix cooccurrence(std::span<const EmotionVector> vectors, bool centered,
                                VectorSource source = VectorSource::kScaled);

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm is at most tolerance * ||M||_F.
  double relative_tolerance = 1e-12;
  int max_sweeps = 100;
};

struct EigenSystem {
  /// Descending.
  std::vector<double> eigenvalues;
  /// eigenvectors[k] pairs with eigenvalues[k]; largest-magnitude component positive.
  std::vector<std::vector<double>> eigenvectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Throws ValidationError for non-finite or
/// asymmetric input and ConvergenceError past max_sweeps.
EigenSystem eigensystem(const Matrix& m, const JacobiOptions& options = {});
EigenSystem eigensystem(const CooccurrenceMatrix& c, const JacobiOptions& options = {});

/// Eigenvalues at or below this fraction of the largest are treated as zero.
inline constexpr double kSpectrumRelativeFloor = 1e-8;

/// Eigenvalues with round-off negatives in [-1e-8, 0) reported as 0.
std::vector<double> reported_spectrum(const EigenSystem& e);

/// Smallest k whose leading eigenvalues hold at least `mass` of the total.
std::size_t effective_dimension(std::span<const double> eigenvalues, double mass);
std::size_t effective_dimension(const EigenSystem& e, double mass);

/// Header row of labels, then one row per matrix row.
std::string matrix_csv(const Matrix& m, std::span<const std::string> labels);
/// "rank,eigenvalue" header, 1-based rank.
std::string spectrum_csv(std::span<const double> eigenvalues);

}  // namespace emovec

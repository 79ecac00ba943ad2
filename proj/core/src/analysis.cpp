// SPDX-License-Identifier: Apache-2.0
#include "emovec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "emovec/errors.hpp"
#include "emovec/io.hpp"

namespace emovec {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

double Matrix::frobenius_norm() const {
  double sum = 0.0;
  for (double x : data_) sum += x * x;
  return std::sqrt(sum);
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

Matrix second_moment(std::span<const std::vector<double>> rows, bool centered) {
  if (rows.empty()) {
    throw ValidationError("co-occurrence: no vectors");
  }
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) {
      throw ValidationError("co-occurrence: vectors differ in length");
    }
  }
  std::vector<double> mean(dim, 0.0);
  if (centered) {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < dim; ++i) mean[i] += r[i];
    }
    for (double& x : mean) x /= static_cast<double>(rows.size());
  }

  Matrix m(dim);
  std::vector<double> s(dim);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < dim; ++i) s[i] = r[i] - mean[i];
    for (std::size_t i = 0; i < dim; ++i) {
      if (s[i] == 0.0) continue;
      for (std::size_t j = i; j < dim; ++j) m(i, j) += s[i] * s[j];
    }
  }
  const double n = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      m(i, j) /= n;
      m(j, i) = m(i, j);
    }
  }
  return m;
}

CooccurrenceMatrix cooccurrence(std::span<const EmotionVector> vectors, bool centered,
                                VectorSource source) {
  if (vectors.empty()) {
    throw ValidationError("co-occurrence: no vectors");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.dictionary_digest != vectors.front().dictionary_digest) {
      throw ValidationError("co-occurrence: vectors come from different dictionaries");
    }
    rows.push_back(source == VectorSource::kScaled ? v.scaled : v.raw);
  }
  return CooccurrenceMatrix{second_moment(rows, centered), vectors.size(), centered,
                            vectors.front().dictionary_digest};
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// Zeroes a(p,q) with one rotation; accumulates it into the columns of v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

EigenSystem eigensystem(const Matrix& m, const JacobiOptions& options) {
  const std::size_t n = m.size();
  if (n == 0) {
    throw ValidationError("eigensystem: empty matrix");
  }
  double scale = 0.0;
  for (double x : m.data()) {
    if (!std::isfinite(x)) {
      throw ValidationError("eigensystem: matrix has non-finite entries");
    }
    scale = std::max(scale, std::abs(x));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(scale, 1.0)) {
        throw ValidationError("eigensystem: matrix is not symmetric");
      }
    }
  }

  Matrix a = m;
  Matrix v = Matrix::identity(n);
  const double threshold = options.relative_tolerance * m.frobenius_norm();
  int sweeps = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweeps >= options.max_sweeps) {
      throw ConvergenceError("eigensystem: no convergence after " +
                             std::to_string(options.max_sweeps) + " Jacobi sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) rotate(a, v, p, q);
      }
    }
    ++sweeps;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  EigenSystem out;
  out.sweeps = sweeps;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t k : order) {
    out.eigenvalues.push_back(a(k, k));
    std::vector<double> vec(n);
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < n; ++i) {
      vec[i] = v(i, k);
      if (std::abs(vec[i]) > std::abs(vec[pivot])) pivot = i;
    }
    if (vec[pivot] < 0.0) {
      for (double& x : vec) x = -x;
    }
    out.eigenvectors.push_back(std::move(vec));
  }
  return out;
}

EigenSystem eigensystem(const CooccurrenceMatrix& c, const JacobiOptions& options) {
  return eigensystem(c.m, options);
}

std::vector<double> reported_spectrum(const EigenSystem& e) {
  std::vector<double> out = e.eigenvalues;
  for (double& x : out) {
    if (x < 0.0 && x >= -1e-8) x = 0.0;
  }
  return out;
}

std::size_t effective_dimension(std::span<const double> eigenvalues, double mass) {
  if (!(mass > 0.0 && mass <= 1.0)) {
    throw ValidationError("effective_dimension: mass must be in (0, 1]");
  }
  std::vector<double> lambda(eigenvalues.begin(), eigenvalues.end());
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  for (double& x : lambda) x = std::max(x, 0.0);
  const double top = lambda.empty() ? 0.0 : lambda.front();
  if (!(top > 0.0)) {
    throw ValidationError("effective_dimension: spectrum has no positive eigenvalue");
  }
  for (double& x : lambda) {
    if (x <= kSpectrumRelativeFloor * top) x = 0.0;
  }
  const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    cumulative += lambda[k];
    if (cumulative >= mass * total) return k + 1;
  }
  return lambda.size();
}

std::size_t effective_dimension(const EigenSystem& e, double mass) {
  return effective_dimension(e.eigenvalues, mass);
}

std::string matrix_csv(const Matrix& m, std::span<const std::string> labels) {
  if (labels.size() != m.size()) {
    throw ValidationError("matrix_csv: label count does not match matrix size");
  }
  std::string out;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (j) out += ',';
    if (labels[j].find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : labels[j]) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      out += quoted + '"';
    } else {
      out += labels[j];
    }
  }
  out += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ',';
      out += format_shortest(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string spectrum_csv(std::span<const double> eigenvalues) {
  std::string out = "rank,eigenvalue\n";
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    out += std::to_string(k + 1) + ',' + format_shortest(eigenvalues[k]) + '\n';
  }
  return out;
}

}  // namespace emovec

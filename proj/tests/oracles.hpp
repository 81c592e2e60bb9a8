#pragma once

// Independent reference computations and generators for the tests. Nothing
// here calls into the deciders or constructors.

#include <algorithm>
#include <complex>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

inline const Complex I(0.0, 1.0);

inline Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& r : rows) {
    Index j = 0;
    for (Complex v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (Complex v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline double cond(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

inline Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  return z;
}

inline Matrix random_unitary(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  return qr.householderQ();
}

/// Random invertible matrix with cond <= cap (rejection sampling).
inline Matrix random_invertible(Index n, double cap, std::mt19937_64& rng) {
  for (;;) {
    Matrix s = gaussian(n, n, rng) + 2.0 * Matrix::Identity(n, n);
    if (cond(s) <= cap) return s;
  }
}

inline Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix m = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

/// Direct sum of Jordan cells (eigenvalue, size).
inline Matrix jordan(const std::vector<std::pair<Complex, int>>& cells) {
  int n = 0;
  for (const auto& c : cells) n += c.second;
  Matrix j = Matrix::Zero(n, n);
  int at = 0;
  for (const auto& [lambda, size] : cells) {
    for (int k = 0; k < size; ++k) {
      j(at + k, at + k) = lambda;
      if (k + 1 < size) j(at + k, at + k + 1) = 1.0;
    }
    at += size;
  }
  return j;
}

inline Matrix similar(const Matrix& s, const Matrix& t) { return s * t * s.inverse(); }

/// Characteristic polynomial coefficients (constant term first) from the
/// eigenvalues computed by Eigen's general eigensolver.
inline std::vector<Complex> charpoly_from_eigenvalues(const Matrix& t) {
  Eigen::ComplexEigenSolver<Matrix> es(t, false);
  std::vector<Complex> p{1.0};
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const Complex l = es.eigenvalues()(k);
    std::vector<Complex> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i + 1] += p[i];
      q[i] -= l * p[i];
    }
    p = std::move(q);
  }
  return p;
}

/// Solves A X - X B = C through the Kronecker form.
inline Matrix sylvester_kron(const Matrix& a, const Matrix& b, const Matrix& c) {
  const Index m = a.rows();
  const Index n = b.rows();
  Matrix k = Matrix::Zero(m * n, m * n);
  for (Index j = 0; j < n; ++j) {
    k.block(j * m, j * m, m, m) += a;
    for (Index i = 0; i < n; ++i) k.block(i * m, j * m, m, m) -= b(j, i) * Matrix::Identity(m, m);
  }
  Eigen::VectorXcd rhs = Eigen::Map<const Eigen::VectorXcd>(c.data(), m * n);
  Eigen::VectorXcd x = k.fullPivLu().solve(rhs);
  return Eigen::Map<Matrix>(x.data(), m, n);
}

/// Segre sequences of an exactly known Jordan matrix, per eigenvalue.
inline std::vector<int> segre_of(const std::vector<std::pair<Complex, int>>& cells, Complex l) {
  std::vector<int> s;
  for (const auto& c : cells) {
    if (c.first == l) s.push_back(c.second);
  }
  std::sort(s.rbegin(), s.rend());
  return s;
}

/// Balanced matrix S (A + (-A) [+ 0]) S^{-1} with generic A.
inline Matrix random_balanced(Index n, double cap, std::mt19937_64& rng) {
  const Index h = n / 2;
  Matrix a = gaussian(h, h, rng);
  Matrix b = block_diag(a, -a);
  if (n % 2 == 1) b = block_diag(b, Matrix::Zero(1, 1));
  return similar(random_invertible(n, cap, rng), b);
}

/// All non-increasing integer sequences with the given sum.
inline void partitions(int rest, int max_part, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
  if (rest == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(rest, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(rest - p, p, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions_of(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions(n, n, cur, out);
  return out;
}

/// Block sizes of the nilpotent m, from ranks of its powers (exact integer input).
inline std::vector<int> segre_by_rank(const Matrix& m) {
  const Index n = m.rows();
  std::vector<int> nul{0};
  Matrix p = Matrix::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    p = p * m;
    Eigen::FullPivLU<Matrix> lu(p);
    lu.setThreshold(1e-9);
    nul.push_back(static_cast<int>(n - lu.rank()));
  }
  std::vector<int> at_least;
  for (std::size_t k = 1; k < nul.size(); ++k) {
    if (nul[k] - nul[k - 1] > 0) at_least.push_back(nul[k] - nul[k - 1]);
  }
  std::vector<int> segre;
  for (int j = 1; !at_least.empty() && j <= at_least.front(); ++j) {
    int len = 0;
    for (int b : at_least) len += b >= j ? 1 : 0;
    segre.push_back(len);
  }
  return segre;
}

}  // namespace oracle

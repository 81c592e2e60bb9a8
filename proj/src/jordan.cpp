#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "idemlab/linalg.hpp"

namespace idemlab {

ComplexMatrix GroupedSchur::run_block(std::size_t g) const {
  const Index a = starts[g];
  const Index m = run_size(g);
  return form.triangular.block(a, a, m, m);
}

int GroupedSchur::run_of(int label) const {
  for (std::size_t g = 0; g < run_label.size(); ++g) {
    if (run_label[g] == label) return static_cast<int>(g);
  }
  return -1;
}

GroupedSchur group_schur(SchurForm form, std::vector<int> labels) {
  sort_schur(form, labels);
  GroupedSchur out;
  const Index n = form.triangular.rows();
  for (Index i = 0; i < n; ++i) {
    if (i == 0 || labels[i] != labels[i - 1]) {
      out.starts.push_back(i);
      out.run_label.push_back(labels[i]);
    }
  }
  out.starts.push_back(n);
  out.form = std::move(form);
  out.labels = std::move(labels);
  return out;
}

std::vector<int> JordanStructure::segre_near(Complex lambda, double radius) const {
  const JordanEntry* best = nullptr;
  double dist = radius;
  for (const auto& e : blocks) {
    const double d = std::abs(e.eigenvalue - lambda);
    if (d <= dist) {
      dist = d;
      best = &e;
    }
  }
  return best ? best->segre : std::vector<int>{};
}

std::vector<int> segre_from_staircase(std::span<const int> staircase, int size) {
  std::vector<int> at_least;  // number of blocks of size >= k
  int prev = 0;
  for (std::size_t k = 0; k < staircase.size(); ++k) {
    const int d = staircase[k];
    const int b = d - prev;
    if (b < 0) {
      throw StaircaseError("nullity staircase is not monotone",
                           std::vector<int>(staircase.begin(), staircase.end()));
    }
    if (!at_least.empty() && b > at_least.back()) {
      throw StaircaseError("nullity staircase has increasing steps",
                           std::vector<int>(staircase.begin(), staircase.end()));
    }
    if (b == 0) break;
    at_least.push_back(b);
    prev = d;
  }
  if (prev != size) {
    throw StaircaseError("nullity staircase does not reach the block dimension",
                         std::vector<int>(staircase.begin(), staircase.end()));
  }
  std::vector<int> segre;
  const int blocks = at_least.empty() ? 0 : at_least.front();
  for (int j = 1; j <= blocks; ++j) {
    int len = 0;
    for (int b : at_least) len += (b >= j) ? 1 : 0;
    segre.push_back(len);
  }
  return segre;
}

namespace {

int thresholded_nullity(const ComplexMatrix& p, double cut) {
  Eigen::BDCSVD<ComplexMatrix> svd(p);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return static_cast<int>(p.rows()) - rank;
}

}  // namespace

std::vector<int> nilpotent_segre(const ComplexMatrix& m, double scale, const Tolerances& tol) {
  const Index n = m.rows();
  if (n == 0) return {};
  const ComplexMatrix a = m / std::max(scale, std::numeric_limits<double>::min());
  std::vector<int> staircase;
  ComplexMatrix power = a;
  for (Index k = 1; k <= n; ++k) {
    const int d = thresholded_nullity(power, tol.rank_rel);
    staircase.push_back(d);
    if (d == n) break;
    power = (power * a).eval();
  }
  return segre_from_staircase(staircase, static_cast<int>(n));
}

JordanStructure jordan_structure(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "jordan_structure");
  tol.validate();
  SchurForm form = schur(t, tol);
  const Index n = t.rows();
  std::vector<Complex> eig(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) eig[i] = form.triangular(i, i);
  const auto clusters = cluster_points(eig, cluster_radius(t, tol));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int i : clusters[c]) labels[i] = static_cast<int>(c);
  }
  const GroupedSchur grouped = group_schur(std::move(form), std::move(labels));
  const double scale = tolerance_scale(t);

  JordanStructure out;
  for (std::size_t g = 0; g < grouped.runs(); ++g) {
    ComplexMatrix block = grouped.run_block(g);
    const Complex center = block.diagonal().mean();
    block.diagonal().array() -= center;
    out.blocks.push_back({center, nilpotent_segre(block, scale, tol)});
  }
  return out;
}

ComplexMatrix nilpotent_jordan_matrix(std::span<const int> segre) {
  int n = 0;
  for (int s : segre) n += s;
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  int at = 0;
  for (int s : segre) {
    for (int k = 0; k + 1 < s; ++k) j(at + k, at + k + 1) = 1.0;
    at += s;
  }
  return j;
}

namespace {

/// Orthonormal basis of the `dim`-dimensional numerical kernel of p.
ComplexMatrix kernel_basis(const ComplexMatrix& p, int dim) {
  Eigen::JacobiSVD<ComplexMatrix> svd(p, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

/// Orthonormal basis for the span of the columns of a with the given rank.
ComplexMatrix range_basis(const ComplexMatrix& a, int rank) {
  if (rank == 0 || a.cols() == 0) return ComplexMatrix(a.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(rank);
}

}  // namespace

ComplexMatrix jordan_chain_basis(const ComplexMatrix& m, std::span<const int> segre,
                                 const Tolerances& tol) {
  (void)tol;
  const Index n = m.rows();
  int total = 0;
  for (int s : segre) total += s;
  if (total != n) throw PreconditionError("jordan_chain_basis: Segre sequence does not sum to n");
  if (n == 0) return ComplexMatrix(0, 0);
  const int height = segre.empty() ? 0 : segre.front();

  // d_k = sum_j min(s_j, k)
  std::vector<int> dims(static_cast<std::size_t>(height) + 1, 0);
  for (int k = 1; k <= height; ++k) {
    for (int s : segre) dims[k] += std::min(s, k);
  }
  std::vector<ComplexMatrix> powers(static_cast<std::size_t>(height) + 1);
  powers[0] = ComplexMatrix::Identity(n, n);
  for (int k = 1; k <= height; ++k) powers[k] = powers[k - 1] * m;
  std::vector<ComplexMatrix> kernels(static_cast<std::size_t>(height) + 1);
  kernels[0] = ComplexMatrix(n, 0);
  for (int k = 1; k <= height; ++k) kernels[k] = kernel_basis(powers[k], dims[k]);

  struct Chain {
    int length;
    ComplexVector top;
  };
  std::vector<Chain> chains;
  for (int k = height; k >= 1; --k) {
    int exact = 0;
    for (int s : segre) exact += (s == k) ? 1 : 0;
    if (exact == 0) continue;
    // Everything already accounted for at level k.
    std::vector<ComplexVector> level;
    for (const auto& c : chains) level.push_back(powers[c.length - k] * c.top);
    ComplexMatrix span(n, kernels[k - 1].cols() + static_cast<Index>(level.size()));
    span.leftCols(kernels[k - 1].cols()) = kernels[k - 1];
    for (std::size_t i = 0; i < level.size(); ++i) {
      span.col(kernels[k - 1].cols() + static_cast<Index>(i)) = level[i];
    }
    const ComplexMatrix basis = range_basis(span, static_cast<int>(span.cols()));
    ComplexMatrix rest = kernels[k];
    if (basis.cols() > 0) rest -= basis * (basis.adjoint() * kernels[k]);
    const ComplexMatrix fresh = range_basis(rest, exact);
    for (int i = 0; i < exact; ++i) chains.push_back({k, fresh.col(i)});
  }
  std::sort(chains.begin(), chains.end(),
            [](const Chain& a, const Chain& b) { return a.length > b.length; });

  ComplexMatrix out(n, n);
  Index col = 0;
  for (const auto& c : chains) {
    for (int i = c.length - 1; i >= 0; --i) out.col(col++) = powers[i] * c.top;
  }
  return out;
}

}  // namespace idemlab

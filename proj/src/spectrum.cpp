#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "idemlab/linalg.hpp"

namespace idemlab {

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

Complex mean_of(std::span<const Complex> points, const std::vector<int>& members) {
  Complex s = 0.0;
  for (int i : members) s += points[i];
  return s / static_cast<double>(members.size());
}

}  // namespace

std::vector<std::vector<int>> cluster_points(std::span<const Complex> points, double radius,
                                             bool* ambiguous) {
  const int n = static_cast<int>(points.size());
  DisjointSets sets(n);
  bool near_tie = false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double d = std::abs(points[i] - points[j]);
      if (d <= radius) sets.unite(i, j);
      if (radius > 0.0 && d > 0.9 * radius && d < 1.1 * radius) near_tie = true;
    }
  }
  std::vector<std::vector<int>> groups;
  {
    std::vector<int> slot(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      const int root = sets.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[slot[root]].push_back(i);
    }
  }
  // Centres closer than 2*radius are merged until none remain.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < groups.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < groups.size() && !merged; ++b) {
        if (std::abs(mean_of(points, groups[a]) - mean_of(points, groups[b])) <= 2.0 * radius) {
          groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
          std::sort(groups[a].begin(), groups[a].end());
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }
  if (ambiguous) *ambiguous = near_tie;
  return groups;
}

double cluster_radius(const ComplexMatrix& t, const Tolerances& tol) {
  return tol.eig_cluster * tolerance_scale(t);
}

SpectrumReport spectrum(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "spectrum");
  tol.validate();
  const SchurForm form = schur(t, tol);
  std::vector<Complex> eig(static_cast<std::size_t>(t.rows()));
  for (Index i = 0; i < t.rows(); ++i) eig[i] = form.triangular(i, i);

  SpectrumReport out;
  out.tol_used = cluster_radius(t, tol);
  for (const auto& g : cluster_points(eig, out.tol_used, &out.ambiguous)) {
    out.clusters.push_back({mean_of(eig, g), static_cast<int>(g.size())});
  }
  return out;
}

int nullity(const ComplexMatrix& t, const Tolerances& tol) { return nullity(t, tol, 0.0); }

int nullity(const ComplexMatrix& t, const Tolerances& tol, double reference) {
  if (t.rows() != t.cols()) throw PreconditionError("nullity: matrix must be square");
  const Index n = t.rows();
  if (n == 0) return 0;
  Eigen::BDCSVD<ComplexMatrix> svd(t);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return static_cast<int>(n);
  const double cut = tol.rank_rel * std::max(s(0), reference);
  int rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return static_cast<int>(n) - rank;
}

}  // namespace idemlab

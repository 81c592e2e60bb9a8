#pragma once

// Shared spectral bookkeeping for the deciders and the constructors.

#include <span>
#include <vector>

#include "idemlab/linalg.hpp"

namespace idemlab::detail {

/// A cluster of the symmetrised point set {lambda_i} U {-lambda_i}.
struct MirrorCluster {
  std::vector<int> alpha;    // eigenvalue indices lying in the cluster
  std::vector<int> negated;  // eigenvalue indices whose negation lies in it
  Complex center;            // mean over all points of the cluster
  bool self_mirror = false;  // contains some lambda together with -lambda
  int mirror = -1;           // index of the cluster holding the negations
};

std::vector<MirrorCluster> mirror_clusters(std::span<const Complex> eig, double radius,
                                           bool* ambiguous = nullptr);

Complex mean_at(std::span<const Complex> eig, const std::vector<int>& idx);

std::vector<Complex> schur_diagonal(const SchurForm& form);

/// Segre sequence of each index group (positions on the Schur diagonal).
/// Groups must be disjoint and their eigenvalues separated from the rest.
std::vector<std::vector<int>> segre_of_groups(const SchurForm& form,
                                              std::span<const std::vector<int>> groups,
                                              double scale, const Tolerances& tol);

/// Special points are matched by closeness within `radius`, ties included.
bool near(Complex z, Complex point, double radius);

}  // namespace idemlab::detail

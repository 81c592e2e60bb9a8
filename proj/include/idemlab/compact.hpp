#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idemlab/classify.hpp"
#include "idemlab/construct.hpp"

namespace idemlab {

/// Spectral profile of a finite section of a compact operator.
struct CompactProfile {
  enum class Decay { geometric, power };

  Decay decay = Decay::geometric;
  double parameter = 0.5;     // ratio in (0,1) or exponent > 0
  bool paired = true;         // eigenvalues in (a, -a) pairs
  int nilpotent_tail_dim = 0; // trailing zero eigenvalues
  std::uint64_t seed = 0;

  static CompactProfile geometric(double ratio, bool paired = true, std::uint64_t seed = 0);
  static CompactProfile power(double exponent, bool paired = true, std::uint64_t seed = 0);

  /// Throws PreconditionError on an out-of-range parameter.
  void validate() const;
  /// k-th eigenvalue magnitude: ratio^k or (k+1)^-exponent.
  double magnitude(int k) const;
};

/// n x n matrix, upper triangular in a random unitary basis, whose diagonal
/// follows the profile and whose strictly upper entries decay with it. The
/// zero eigenvalues form Jordan cells of size at most 2.
ComplexMatrix sample_truncation(const CompactProfile& profile, int n);

struct SweepRow {
  int n = 0;
  double residual = 0.0;
  double cond = 0.0;
  std::uint64_t seed = 0;
};

std::vector<SweepRow> truncation_residual_sweep(const CompactProfile& profile,
                                                std::span<const int> dims, double eps,
                                                const Tolerances& tol = {});

/// CSV with header n,residual,cond,seed; reals printed with 17 significant digits.
std::string sweep_csv(std::span<const SweepRow> rows);

/// T0 = A0 + (-A0) with A0 = [[i/2, 1], [0, i/2]]: balanced and similar to its
/// negative, yet not a commutator of idempotents.
struct CommutatorGapWitness {
  ComplexMatrix t;
  MembershipReport report_coi;
  MembershipReport report_neg_similar;
  MembershipReport report_clos;
};

CommutatorGapWitness commutator_gap_witness(const Tolerances& tol = {});

/// K_n = sum of [[0, 1/k], [0, 0]] for k = 1..n with E_n = sum of diag(1, 0)
/// and F_n = sum of [[1, 1/k], [0, 0]], so that K_n = [E_n, F_n].
struct TruncatedCommutator {
  ComplexMatrix k;
  ComplexMatrix e;
  ComplexMatrix f;
};

TruncatedCommutator compact_commutator_truncation(int n);

}  // namespace idemlab

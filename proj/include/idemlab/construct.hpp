#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "idemlab/linalg.hpp"

namespace idemlab {

enum class CertificateKind {
  idempotent_commutator,
  idempotent_difference,
  projection_commutator,
  projection_difference,
};

std::string to_string(CertificateKind kind);
/// Accepts the hyphenated names ("idempotent-commutator", ...).
CertificateKind certificate_kind_from_string(const std::string& name);

bool is_commutator_kind(CertificateKind kind);
bool is_projection_kind(CertificateKind kind);

/// [left, right] for commutator kinds, left - right for difference kinds.
ComplexMatrix combine(CertificateKind kind, const ComplexMatrix& left, const ComplexMatrix& right);

/// Largest idempotency defect ||E^2 - E|| / max(1, ||E||^2) of the two
/// factors, plus ||E - E*|| for projection kinds.
double structure_residual(CertificateKind kind, const ComplexMatrix& left,
                          const ComplexMatrix& right);

struct CertificatePair {
  ComplexMatrix left;
  ComplexMatrix right;
  CertificateKind kind = CertificateKind::idempotent_commutator;
  double target_residual = 0.0;     // ||combine(left, right) - target||
  double structure_residual = 0.0;
  double condition = 1.0;           // conditioning of the similarity used
  int attempts = 1;
  std::uint64_t seed = 0;
  /// doi_pair_plusminus: unitary U with U* (E - F) U = diag(a, -a).
  std::optional<ComplexMatrix> pairing_unitary;

  ComplexMatrix combined() const { return combine(kind, left, right); }
};

struct Approximant {
  CertificatePair pair;
  ComplexMatrix x;  // the perturbed target that the pair realises
};

/// Exact idempotents with [E, F] = D for D = diag(b1, -b1, ..., [0]) with
/// distinct entries (in any order).
CertificatePair coi_pair_diag_balanced(const ComplexMatrix& d, const Tolerances& tol = {});

/// Idempotents E, F with ||[E, F] - T|| < eps for balanced T. The diagonal of
/// a Schur form is moved to exact negation pairs by a seeded jitter and the
/// result is diagonalised; up to 8 reseeded retries when the eigenvector
/// similarity exceeds cond_cap.
Approximant coi_approximant(const ComplexMatrix& t, double eps, const Tolerances& tol = {},
                            std::uint64_t seed = 0);

/// Exact pair for N with N^2 = 0: P projects onto ran N and F = P + N.
CertificatePair coi_pair_nilpotent_order2(const ComplexMatrix& n, const Tolerances& tol = {});

/// Turns idempotents E, F into idempotents G, H with G - H = [E, F]:
/// G = E + EF(I - E), H = E + (I - E)FE.
CertificatePair coi_to_doi(const ComplexMatrix& e, const ComplexMatrix& f,
                           const Tolerances& tol = {});

/// E = [[1, a], [0, 0]], F = [[1, 0], [-a, 0]], so E - F = [[0, a], [a, 0]].
CertificatePair doi_pair_plusminus(Complex alpha);

/// Difference of idempotents within eps of Z, where sigma(Z) lies in {1, -1},
/// r = tr Z >= 0 and nul(Z - I) >= r.
CertificatePair doi_approximant_pm1(const ComplexMatrix& z, double eps,
                                    const Tolerances& tol = {});

/// Difference of idempotents within eps of T for T in the closure.
CertificatePair doi_approximant(const ComplexMatrix& t, double eps, const Tolerances& tol = {},
                                std::uint64_t seed = 0);

/// Exact pairs for diagonalisable members (and for order-2 nilpotents in the
/// commutator case). Throws PreconditionError when no exact route applies.
CertificatePair coi_exact(const ComplexMatrix& t, const Tolerances& tol = {});
CertificatePair doi_exact(const ComplexMatrix& t, const Tolerances& tol = {});

/// Orthogonal projections with [P, Q] = T.
CertificatePair cop_pair(const ComplexMatrix& t, const Tolerances& tol = {});

/// Orthogonal projections with P - Q = H.
CertificatePair dop_pair(const ComplexMatrix& h, const Tolerances& tol = {});

/// Hermitian L with exactly symmetric spectrum and ||L - K|| < 2 eps: keeps K
/// on eigenvalues >= eps, mirrors them onto the paired negative eigenvectors
/// and zeroes the band (-eps, eps).
ComplexMatrix symmetrize_spectrum(const ComplexMatrix& k, double eps, const Tolerances& tol = {});

}  // namespace idemlab

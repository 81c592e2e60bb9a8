#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idemlab/linalg.hpp"

namespace idemlab {

/// The classes a matrix can be tested against.
///
/// coi / doi: commutators / differences of two idempotents; cop / dop: the same
/// for orthogonal projections; clos_*: norm closures. `balanced` is spectral
/// symmetry under negation with equal algebraic multiplicities, `neg_similar`
/// is similarity of T and -T.
enum class ClassTag {
  balanced,
  neg_similar,
  coi,
  doi,
  clos_coi,
  clos_doi,
  cop,
  dop,
  clos_cop,
  clos_dop,
};

std::string to_string(ClassTag tag);
/// Throws std::invalid_argument on unknown names.
ClassTag class_tag_from_string(const std::string& name);
std::vector<ClassTag> all_class_tags();

struct ConditionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// One row of the negation pairing table: eigenvalue clusters at alpha and
/// -alpha with their algebraic multiplicities and, when computed, Segre data.
struct PairingRow {
  Complex alpha;
  Complex neg_alpha;
  int mu_alpha = 0;
  int mu_neg = 0;
  std::vector<int> segre_alpha;
  std::vector<int> segre_neg;
};

struct Evidence {
  std::vector<PairingRow> pairing;
  std::optional<Complex> trace;
  std::vector<std::pair<std::string, int>> nullities;
  std::vector<std::pair<std::string, double>> values;
  std::vector<ConditionCheck> conditions;
  std::vector<std::string> warnings;
};

struct MembershipReport {
  ClassTag class_tag = ClassTag::balanced;
  bool verdict = false;
  Evidence evidence;
  Tolerances tol_used;

  /// Named condition lookup; nullptr when absent.
  const ConditionCheck* condition(const std::string& name) const;
};

MembershipReport is_balanced(const ComplexMatrix& t, const Tolerances& tol = {});

/// Characteristic polynomial coefficients of t, constant term first and the
/// leading 1 last, from a Hessenberg recurrence (no eigenvalues involved).
std::vector<Complex> charpoly_coefficients(const ComplexMatrix& t);

/// True when the characteristic polynomial is an even or an odd function.
/// Throws PreconditionError for n > 64.
bool charpoly_parity(const ComplexMatrix& t, const Tolerances& tol = {});

MembershipReport is_neg_similar(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport is_coi(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport is_doi(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport in_clos_coi(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport in_clos_doi(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport is_cop(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport is_dop(const ComplexMatrix& h, const Tolerances& tol = {});
MembershipReport in_clos_cop(const ComplexMatrix& t, const Tolerances& tol = {});
MembershipReport in_clos_dop(const ComplexMatrix& h, const Tolerances& tol = {});

MembershipReport classify(const ComplexMatrix& t, ClassTag tag, const Tolerances& tol = {});

/// Square-root criterion for a nilpotent with Segre sequence `segre`
/// (non-increasing): after padding to even length, consecutive pairs differ
/// by at most one.
bool nilpotent_has_square_root(std::span<const int> segre);

}  // namespace idemlab

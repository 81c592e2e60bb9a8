#include "idemlab/compact.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/QR>

namespace idemlab {

CompactProfile CompactProfile::geometric(double ratio, bool paired, std::uint64_t seed) {
  CompactProfile p;
  p.decay = Decay::geometric;
  p.parameter = ratio;
  p.paired = paired;
  p.seed = seed;
  return p;
}

CompactProfile CompactProfile::power(double exponent, bool paired, std::uint64_t seed) {
  CompactProfile p;
  p.decay = Decay::power;
  p.parameter = exponent;
  p.paired = paired;
  p.seed = seed;
  return p;
}

void CompactProfile::validate() const {
  if (decay == Decay::geometric && !(parameter > 0.0 && parameter < 1.0)) {
    throw PreconditionError("compact profile: geometric ratio must lie in (0, 1)");
  }
  if (decay == Decay::power && !(parameter > 0.0 && std::isfinite(parameter))) {
    throw PreconditionError("compact profile: power exponent must be positive");
  }
  if (nilpotent_tail_dim < 0) {
    throw PreconditionError("compact profile: nilpotent_tail_dim must be nonnegative");
  }
}

double CompactProfile::magnitude(int k) const {
  if (decay == Decay::geometric) return std::pow(parameter, k);
  return std::pow(static_cast<double>(k + 1), -parameter);
}

namespace {

ComplexMatrix random_unitary(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix z(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

}  // namespace

ComplexMatrix sample_truncation(const CompactProfile& profile, int n) {
  profile.validate();
  if (n < 2) throw PreconditionError("sample_truncation: n must be at least 2");
  std::mt19937_64 rng(profile.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(n));
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  const int tail = std::min(profile.nilpotent_tail_dim, n);
  const int active = n - tail;
  ComplexVector diag = ComplexVector::Zero(n);
  if (profile.paired) {
    for (int k = 0; k < active / 2; ++k) {
      diag(2 * k) = profile.magnitude(k);
      diag(2 * k + 1) = -profile.magnitude(k);
    }
  } else {
    for (int k = 0; k < active; ++k) diag(k) = profile.magnitude(k);
  }
  // Weights decay along the diagonal so the operator stays compact-like.
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[i] = std::sqrt(profile.magnitude(i / 2));

  // The zero diagonal entries sit in one trailing run. Inside it only the
  // pairs (z0 + 2k, z0 + 2k + 1) are coupled, so the nilpotent part has
  // cells of size <= 2 and its computed eigenvalues stay within the
  // clustering radius (a cell of size k spreads them by about u^(1/k)).
  int z0 = n;
  while (z0 > 0 && diag(z0 - 1) == Complex(0.0, 0.0)) --z0;
  ComplexMatrix r = diag.asDiagonal();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex draw = 0.5 * Complex(u(rng), u(rng)) * w[i] * w[j];
      if (i >= z0 && !(j == i + 1 && (i - z0) % 2 == 0)) continue;
      r(i, j) = draw;
    }
  }
  const ComplexMatrix q = random_unitary(n, rng);
  return q * r * q.adjoint();
}

std::vector<SweepRow> truncation_residual_sweep(const CompactProfile& profile,
                                                std::span<const int> dims, double eps,
                                                const Tolerances& tol) {
  profile.validate();
  if (!profile.paired) {
    throw PreconditionError("truncation_residual_sweep: the profile must be paired");
  }
  std::vector<SweepRow> rows;
  for (int n : dims) {
    const ComplexMatrix t = sample_truncation(profile, n);
    const Approximant a = coi_approximant(t, eps, tol, profile.seed);
    rows.push_back({n, a.pair.target_residual, a.pair.condition, profile.seed});
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "n,residual,cond,seed\r\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%llu\r\n", r.n, r.residual, r.cond,
                  static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

CommutatorGapWitness commutator_gap_witness(const Tolerances& tol) {
  ComplexMatrix a0(2, 2);
  a0 << Complex(0.0, 0.5), 1.0, 0.0, Complex(0.0, 0.5);
  CommutatorGapWitness out;
  out.t = direct_sum(a0, ComplexMatrix(-a0));
  out.report_coi = is_coi(out.t, tol);
  out.report_neg_similar = is_neg_similar(out.t, tol);
  out.report_clos = in_clos_coi(out.t, tol);
  return out;
}

TruncatedCommutator compact_commutator_truncation(int n) {
  if (n < 1) throw PreconditionError("compact_commutator_truncation: n must be positive");
  TruncatedCommutator out;
  out.k = ComplexMatrix::Zero(2 * n, 2 * n);
  out.e = ComplexMatrix::Zero(2 * n, 2 * n);
  out.f = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int k = 1; k <= n; ++k) {
    const Index i = 2 * (k - 1);
    const double c = 1.0 / k;
    out.k(i, i + 1) = c;
    out.e(i, i) = 1.0;
    out.f(i, i) = 1.0;
    out.f(i, i + 1) = c;
  }
  return out;
}

}  // namespace idemlab

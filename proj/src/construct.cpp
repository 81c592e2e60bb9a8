#include "idemlab/construct.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "idemlab/classify.hpp"
#include "idemlab/detail/mirror.hpp"

namespace idemlab {

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::idempotent_commutator: return "idempotent-commutator";
    case CertificateKind::idempotent_difference: return "idempotent-difference";
    case CertificateKind::projection_commutator: return "projection-commutator";
    case CertificateKind::projection_difference: return "projection-difference";
  }
  return "unknown";
}

CertificateKind certificate_kind_from_string(const std::string& name) {
  for (auto k : {CertificateKind::idempotent_commutator, CertificateKind::idempotent_difference,
                 CertificateKind::projection_commutator, CertificateKind::projection_difference}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown certificate kind '" + name + "'");
}

bool is_commutator_kind(CertificateKind kind) {
  return kind == CertificateKind::idempotent_commutator ||
         kind == CertificateKind::projection_commutator;
}

bool is_projection_kind(CertificateKind kind) {
  return kind == CertificateKind::projection_commutator ||
         kind == CertificateKind::projection_difference;
}

ComplexMatrix combine(CertificateKind kind, const ComplexMatrix& left, const ComplexMatrix& right) {
  return is_commutator_kind(kind) ? commutator(left, right) : ComplexMatrix(left - right);
}

namespace {

double idempotency_defect(const ComplexMatrix& e) {
  const double ne = opnorm(e);
  return opnorm(e * e - e) / std::max(1.0, ne * ne);
}

}  // namespace

double structure_residual(CertificateKind kind, const ComplexMatrix& left,
                          const ComplexMatrix& right) {
  double d = std::max(idempotency_defect(left), idempotency_defect(right));
  if (is_projection_kind(kind)) {
    d = std::max({d, opnorm(left - left.adjoint()), opnorm(right - right.adjoint())});
  }
  return d;
}

namespace {

using detail::MirrorCluster;

CertificatePair make_pair(CertificateKind kind, ComplexMatrix left, ComplexMatrix right,
                          const ComplexMatrix& target) {
  CertificatePair c;
  c.kind = kind;
  c.left = std::move(left);
  c.right = std::move(right);
  c.target_residual = opnorm(c.combined() - target);
  c.structure_residual = structure_residual(kind, c.left, c.right);
  return c;
}

CertificatePair zero_pair(CertificateKind kind, Index n) {
  const ComplexMatrix z = ComplexMatrix::Zero(n, n);
  return make_pair(kind, z, z, z);
}

void require_eps(double eps, const char* what) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError(std::string(what) + ": eps must be positive and finite");
  }
}

std::string failing_conditions(const MembershipReport& r) {
  std::string out;
  for (const auto& c : r.evidence.conditions) {
    if (c.passed) continue;
    if (!out.empty()) out += "; ";
    out += c.name;
    if (!c.detail.empty()) out += " (" + c.detail + ")";
  }
  return out;
}

void require_verdict(const MembershipReport& r, const char* what) {
  if (!r.verdict) {
    throw PreconditionError(std::string(what) + ": input rejected by " + to_string(r.class_tag) +
                            " test: " + failing_conditions(r));
  }
}

void place(ComplexMatrix& m, Index i, Index j, const Eigen::Matrix2cd& b) {
  m(i, i) = b(0, 0);
  m(i, j) = b(0, 1);
  m(j, i) = b(1, 0);
  m(j, j) = b(1, 1);
}

/// Idempotents with [E, F] = diag(beta, -beta), beta != 0. The model pair
/// E0 = [[1, x], [0, 0]], F0 = [[1, 0], [x, 0]] has commutator
/// [[t, -x], [-x, -t]] with t = x^2 and t^2 + t = beta^2; its eigenvectors
/// (x, t - lambda) diagonalise it.
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> coi_block(Complex beta) {
  const Complex t = (-1.0 + std::sqrt(1.0 + 4.0 * beta * beta)) / 2.0;
  const Complex x = std::sqrt(t);
  Eigen::Matrix2cd e0, f0, s;
  e0 << 1.0, x, 0.0, 0.0;
  f0 << 1.0, 0.0, x, 0.0;
  s << x, x, t - beta, t + beta;
  const Eigen::Matrix2cd si = s.inverse();
  return {si * e0 * s, si * f0 * s};
}

/// Idempotents with E - F = diag(d, -d).
std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> doi_block(Complex d) {
  Eigen::Matrix2cd e0, f0, u;
  e0 << 1.0, d, 0.0, 0.0;
  f0 << 1.0, 0.0, -d, 0.0;
  u << 1.0, 1.0, 1.0, -1.0;
  u /= std::sqrt(2.0);
  return {u * e0 * u, u * f0 * u};
}

/// Eigenvectors of an upper-triangular matrix whose diagonal entries are
/// distinct wherever they are coupled. Unit columns, upper triangular.
ComplexMatrix upper_eigenvectors(const ComplexMatrix& r) {
  const Index n = r.rows();
  ComplexMatrix v = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    v(k, k) = 1.0;
    for (Index i = k - 1; i >= 0; --i) {
      Complex s = 0.0;
      for (Index j = i + 1; j <= k; ++j) s += r(i, j) * v(j, k);
      v(i, k) = (s == 0.0) ? Complex(0.0) : s / (r(k, k) - r(i, i));
    }
    v.col(k).normalize();
  }
  return v;
}

ComplexMatrix upper_inverse(const ComplexMatrix& v) {
  return v.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(v.rows(), v.cols()));
}

/// Greedy negation pairing of a list of eigenvalue positions: the element
/// nearest to zero is set aside when the count is odd.
void pair_greedy(std::span<const Complex> eig, std::vector<int> pool,
                 std::vector<std::pair<int, int>>& pairs, std::vector<int>& zeros) {
  if (pool.size() % 2 == 1) {
    auto it = std::min_element(pool.begin(), pool.end(),
                               [&](int a, int b) { return std::abs(eig[a]) < std::abs(eig[b]); });
    zeros.push_back(*it);
    pool.erase(it);
  }
  while (!pool.empty()) {
    const int i = pool.front();
    pool.erase(pool.begin());
    auto it = std::min_element(pool.begin(), pool.end(), [&](int a, int b) {
      return std::abs(eig[i] + eig[a]) < std::abs(eig[i] + eig[b]);
    });
    pairs.emplace_back(i, *it);
    pool.erase(it);
  }
}

/// Pairs eigenvalue positions (lambda, ~-lambda) through mirror clusters.
void pair_positions(std::span<const Complex> eig, double radius,
                    std::vector<std::pair<int, int>>& pairs, std::vector<int>& zeros) {
  const auto clusters = detail::mirror_clusters(eig, radius);
  std::vector<bool> seen(clusters.size(), false);
  std::vector<int> pool;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (seen[c]) continue;
    const auto& cl = clusters[c];
    seen[c] = true;
    seen[cl.mirror] = true;
    if (cl.self_mirror) {
      pool.insert(pool.end(), cl.alpha.begin(), cl.alpha.end());
      continue;
    }
    const auto& other = clusters[cl.mirror].alpha;
    if (other.size() != cl.alpha.size()) {
      std::vector<Complex> unmatched;
      for (int i : cl.alpha) unmatched.push_back(eig[i]);
      for (int i : other) unmatched.push_back(eig[i]);
      throw PairingError("eigenvalue multiplicities of a negation pair differ", unmatched);
    }
    for (std::size_t k = 0; k < other.size(); ++k) pairs.emplace_back(cl.alpha[k], other[k]);
  }
  pair_greedy(eig, std::move(pool), pairs, zeros);
}

/// Low-discrepancy jitter for the k-th pair.
struct Jitter {
  double u1 = 0.0;
  double u2 = 0.0;
  double size = 0.0;

  Complex at(std::size_t k) const {
    if (size == 0.0) return 0.0;
    const double phi = 0.6180339887498949;
    const double sqrt2 = 0.4142135623730951;
    const double a = u1 + static_cast<double>(k + 1) * phi;
    const double b = u2 + static_cast<double>(k + 1) * sqrt2;
    const double rho = 0.5 + 0.5 * (a - std::floor(a));
    const double theta = 2.0 * std::numbers::pi * (b - std::floor(b));
    return size * rho * std::polar(1.0, theta);
  }
};

bool well_separated(std::span<const Complex> values, double gap) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (std::abs(values[i] - values[j]) <= gap) return false;
    }
  }
  return true;
}

/// S with S^{-1} T S diagonal when T is diagonalisable (eigenvalue clusters
/// whose Riesz blocks are scalar within tolerance).
struct DiagonalForm {
  ComplexMatrix s;
  ComplexMatrix s_inv;
  std::vector<Complex> values;
  double condition = 1.0;
};

std::optional<DiagonalForm> diagonalize(const ComplexMatrix& t, const Tolerances& tol) {
  SchurForm form = schur(t, tol);
  const auto eig = detail::schur_diagonal(form);
  const auto clusters = cluster_points(eig, cluster_radius(t, tol));
  std::vector<int> labels(eig.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (int i : clusters[c]) labels[i] = static_cast<int>(c);
  }
  const RieszSplit split = split_by_labels(t, std::move(form), labels, tol);
  const double scale = tolerance_scale(t);
  DiagonalForm out;
  for (const auto& block : split.blocks) {
    const Complex center = block.diagonal().mean();
    const ComplexMatrix off =
        block - center * ComplexMatrix::Identity(block.rows(), block.cols());
    if (opnorm(off) > tol.residual * scale) return std::nullopt;
    for (Index i = 0; i < block.rows(); ++i) out.values.push_back(center);
  }
  out.s = split.similarity;
  out.s_inv = split.similarity.inverse();
  out.condition = split.condition;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Idempotent commutators

CertificatePair coi_pair_diag_balanced(const ComplexMatrix& d, const Tolerances& tol) {
  require_square_finite(d, "coi_pair_diag_balanced");
  tol.validate();
  const Index n = d.rows();
  const double scale = tolerance_scale(d);
  ComplexMatrix off = d;
  off.diagonal().setZero();
  if (opnorm(off) > tol.residual * scale) {
    throw PreconditionError("coi_pair_diag_balanced: input is not diagonal");
  }
  const double radius = cluster_radius(d, tol);
  std::vector<Complex> values(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) values[i] = d(i, i);
  if (!well_separated(values, radius)) {
    throw PreconditionError("coi_pair_diag_balanced: repeated diagonal entries");
  }
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (used[i] || std::abs(values[i]) <= radius) continue;
    Index partner = -1;
    for (Index j = 0; j < n; ++j) {
      if (j != i && !used[j] && std::abs(values[i] + values[j]) <= radius) partner = j;
    }
    if (partner < 0) {
      throw PairingError("coi_pair_diag_balanced: diagonal entry without its negation",
                         {values[i]});
    }
    used[i] = used[partner] = true;
    const auto [eb, fb] = coi_block((values[i] - values[partner]) / 2.0);
    place(e, i, partner, eb);
    place(f, i, partner, fb);
  }
  return make_pair(CertificateKind::idempotent_commutator, e, f, d);
}

Approximant coi_approximant(const ComplexMatrix& t, double eps, const Tolerances& tol,
                            std::uint64_t seed) {
  require_square_finite(t, "coi_approximant");
  tol.validate();
  require_eps(eps, "coi_approximant");
  require_verdict(is_balanced(t, tol), "coi_approximant");
  const Index n = t.rows();
  if (opnorm(t) == 0.0) {
    return {zero_pair(CertificateKind::idempotent_commutator, n), t};
  }

  SchurForm form = schur(t, tol);
  const auto eig = detail::schur_diagonal(form);
  const double radius = cluster_radius(t, tol);
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> zeros;
  pair_positions(eig, radius, pairs, zeros);
  std::vector<int> labels(static_cast<std::size_t>(n));
  int slot = 0;
  for (const auto& [a, b] : pairs) {
    labels[a] = slot++;
    labels[b] = slot++;
  }
  for (int z : zeros) labels[z] = slot++;
  sort_schur(form, labels);
  const ComplexMatrix& r = form.triangular;
  const ComplexMatrix& u = form.unitary;

  const std::size_t m = pairs.size();
  std::vector<Complex> base(m);
  for (std::size_t k = 0; k < m; ++k) base[k] = (r(2 * k, 2 * k) - r(2 * k + 1, 2 * k + 1)) / 2.0;

  auto values_of = [&](const std::vector<Complex>& beta) {
    std::vector<Complex> v;
    for (Complex b : beta) {
      v.push_back(b);
      v.push_back(-b);
    }
    if (!zeros.empty()) v.push_back(0.0);
    return v;
  };

  double best = std::numeric_limits<double>::infinity();
  double best_cond = std::numeric_limits<double>::infinity();
  const int max_attempts = 9;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Jitter jitter;
    if (attempt > 0 || !well_separated(values_of(base), 2.0 * radius)) {
      std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      jitter.u1 = unit(rng);
      jitter.u2 = unit(rng);
      jitter.size = 0.45 * eps * std::pow(0.9, attempt);
    }
    std::vector<Complex> beta(m);
    for (std::size_t k = 0; k < m; ++k) beta[k] = base[k] + jitter.at(k);

    ComplexMatrix rp = r;
    for (std::size_t k = 0; k < m; ++k) {
      rp(2 * k, 2 * k) = beta[k];
      rp(2 * k + 1, 2 * k + 1) = -beta[k];
    }
    if (!zeros.empty()) rp(n - 1, n - 1) = 0.0;
    const double shift = (rp.diagonal() - r.diagonal()).cwiseAbs().maxCoeff();
    if (!(shift < eps)) {
      best = std::min(best, shift);
      continue;
    }

    const ComplexMatrix v = upper_eigenvectors(rp);
    const double cond = cond2(v);
    best_cond = std::min(best_cond, cond);
    if (!(cond <= tol.cond_cap)) continue;

    ComplexMatrix ed = ComplexMatrix::Zero(n, n);
    ComplexMatrix fd = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < m; ++k) {
      const auto [eb, fb] = coi_block(beta[k]);
      const Index i = static_cast<Index>(2 * k);
      place(ed, i, i + 1, eb);
      place(fd, i, i + 1, fb);
    }
    const ComplexMatrix s = u * v;
    const ComplexMatrix s_inv = upper_inverse(v) * u.adjoint();
    CertificatePair pair = make_pair(CertificateKind::idempotent_commutator, s * ed * s_inv,
                                     s * fd * s_inv, t);
    pair.condition = cond;
    pair.attempts = attempt + 1;
    pair.seed = seed;
    best = std::min(best, pair.target_residual);
    if (pair.target_residual < eps && pair.structure_residual <= tol.residual) {
      return {std::move(pair), u * rp * u.adjoint()};
    }
  }
  std::ostringstream msg;
  msg << "coi_approximant: no certificate within eps = " << eps << " after " << max_attempts
      << " attempts (best residual " << best << ", best eigenvector condition " << best_cond
      << ", cond_cap " << tol.cond_cap << ")";
  throw ConvergenceError(msg.str(), max_attempts);
}

CertificatePair coi_pair_nilpotent_order2(const ComplexMatrix& n, const Tolerances& tol) {
  require_square_finite(n, "coi_pair_nilpotent_order2");
  tol.validate();
  const double nn = opnorm(n);
  if (nn == 0.0) throw PreconditionError("coi_pair_nilpotent_order2: N must be nonzero");
  if (opnorm(n * n) > tol.residual * nn * nn) {
    throw PreconditionError("coi_pair_nilpotent_order2: N^2 is not zero within tolerance");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(n, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol.rank_rel * sv(0)) ++rank;
  const ComplexMatrix basis = svd.matrixU().leftCols(rank);
  const ComplexMatrix p = basis * basis.adjoint();
  return make_pair(CertificateKind::idempotent_commutator, p, p + n, n);
}

CertificatePair coi_to_doi(const ComplexMatrix& e, const ComplexMatrix& f, const Tolerances& tol) {
  require_square_finite(e, "coi_to_doi");
  require_square_finite(f, "coi_to_doi");
  if (e.rows() != f.rows()) throw PreconditionError("coi_to_doi: shape mismatch");
  if (idempotency_defect(e) > tol.residual || idempotency_defect(f) > tol.residual) {
    throw PreconditionError("coi_to_doi: inputs are not idempotent within tolerance");
  }
  const ComplexMatrix i = ComplexMatrix::Identity(e.rows(), e.cols());
  const ComplexMatrix g = e + e * f * (i - e);
  const ComplexMatrix h = e + (i - e) * f * e;
  return make_pair(CertificateKind::idempotent_difference, g, h, commutator(e, f));
}

// ---------------------------------------------------------------------------
// Idempotent differences

CertificatePair doi_pair_plusminus(Complex alpha) {
  if (alpha == 0.0) return zero_pair(CertificateKind::idempotent_difference, 2);
  ComplexMatrix e(2, 2), f(2, 2), target(2, 2), u(2, 2);
  e << 1.0, alpha, 0.0, 0.0;
  f << 1.0, 0.0, -alpha, 0.0;
  target << 0.0, alpha, alpha, 0.0;
  u << 1.0, 1.0, 1.0, -1.0;
  u /= std::sqrt(2.0);
  CertificatePair c = make_pair(CertificateKind::idempotent_difference, e, f, target);
  c.pairing_unitary = u;
  return c;
}

CertificatePair doi_approximant_pm1(const ComplexMatrix& z, double eps, const Tolerances& tol) {
  require_square_finite(z, "doi_approximant_pm1");
  tol.validate();
  require_eps(eps, "doi_approximant_pm1");
  const Index n = z.rows();
  const double radius = cluster_radius(z, tol);
  SchurForm form = schur(z, tol);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Complex l = form.triangular(i, i);
    if (detail::near(l, 1.0, radius)) {
      labels[i] = 0;
    } else if (detail::near(l, -1.0, radius)) {
      labels[i] = 1;
    } else {
      std::ostringstream msg;
      msg << "doi_approximant_pm1: eigenvalue " << l << " is not within tolerance of 1 or -1";
      throw PreconditionError(msg.str());
    }
  }
  const Complex trace = z.trace();
  const double rr = std::round(trace.real());
  if (std::abs(trace - Complex(rr, 0.0)) > 10.0 * tol.residual * static_cast<double>(n)) {
    throw PreconditionError("doi_approximant_pm1: trace is not an integer within tolerance");
  }
  const int r = static_cast<int>(rr);
  if (r < 0) throw PreconditionError("doi_approximant_pm1: trace must be nonnegative");
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  if (nullity(z - id, tol, tolerance_scale(z)) < r) {
    throw PreconditionError("doi_approximant_pm1: nul(Z - I) is smaller than tr Z");
  }

  const RieszSplit split = split_by_labels(z, std::move(form), labels, tol);
  ComplexMatrix zp(0, 0), zm(0, 0);
  for (std::size_t k = 0; k < split.blocks.size(); ++k) {
    (split.region_of_block[k] == 0 ? zp : zm) = split.blocks[k];
  }
  const Index p = zp.rows();
  const Index q = zm.rows();
  const ComplexMatrix s_inv = split.similarity.inverse();

  const double scale = tolerance_scale(z);
  const auto segp = nilpotent_segre(zp - ComplexMatrix::Identity(p, p), scale, tol);
  const auto segm = nilpotent_segre(zm + ComplexMatrix::Identity(q, q), scale, tol);
  auto all_ones = [](const std::vector<int>& s) {
    return std::all_of(s.begin(), s.end(), [](int v) { return v == 1; });
  };

  if (all_ones(segp) && all_ones(segm)) {
    // Z is similar to I_p + (-I_q): spectral idempotents are exact.
    ComplexMatrix gd = ComplexMatrix::Zero(n, n);
    ComplexMatrix hd = ComplexMatrix::Zero(n, n);
    gd.topLeftCorner(p, p).setIdentity();
    hd.bottomRightCorner(q, q).setIdentity();
    const ComplexMatrix& s = split.similarity;
    CertificatePair c =
        make_pair(CertificateKind::idempotent_difference, s * gd * s_inv, s * hd * s_inv, z);
    c.condition = split.condition;
    return c;
  }

  const int s_dim = static_cast<int>(q);
  const int kplus = static_cast<int>(segp.size());
  const int r1 = std::min(r, s_dim);
  const int c_extra = r - r1;  // singleton blocks pulled out as I_c
  if (s_dim == 0 || kplus < r) {
    throw PreconditionError("doi_approximant_pm1: Jordan data inconsistent with nul(Z - I) >= r");
  }
  for (int j = kplus - c_extra; j < kplus; ++j) {
    if (segp[j] != 1) {
      throw PreconditionError("doi_approximant_pm1: reduction to s >= r needs singleton blocks");
    }
  }

  const ComplexMatrix cp = jordan_chain_basis(zp - ComplexMatrix::Identity(p, p), segp, tol);
  const ComplexMatrix cm = jordan_chain_basis(zm + ComplexMatrix::Identity(q, q), segm, tol);
  const ComplexMatrix qmat = split.similarity * direct_sum(cp, cm);
  const double cond_q = cond2(qmat);
  if (!(cond_q <= tol.cond_cap)) {
    throw ConditionError("doi_approximant_pm1: Jordan basis condition exceeds cond_cap", cond_q);
  }
  const ComplexMatrix q_inv = qmat.inverse();

  double eta = std::min(0.5, eps / (2.0 * cond_q));
  double best = std::numeric_limits<double>::infinity();
  const int max_attempts = 9;
  for (int attempt = 0; attempt < max_attempts; ++attempt, eta /= 2.0) {
    std::vector<double> d(static_cast<std::size_t>(s_dim));
    for (int l = 0; l < s_dim; ++l) d[l] = 1.0 - eta * (l + 1) / s_dim;

    // Y = B + C in Jordan-chain coordinates: bidiagonal blocks.
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    std::vector<Index> ones, dplus(static_cast<std::size_t>(s_dim)),
        dminus(static_cast<std::size_t>(s_dim));
    Index at = 0;
    int next = 0;
    for (int j = 0; j < kplus; ++j) {
      const int m = segp[j];
      for (int i = 0; i < m; ++i) {
        const Index pos = at + i;
        const bool one = (i == 0) && (j < r1 || j >= kplus - c_extra);
        if (one) {
          y(pos, pos) = 1.0;
          ones.push_back(pos);
        } else {
          if (next >= s_dim) {
            throw PreconditionError("doi_approximant_pm1: not enough values for the partition");
          }
          y(pos, pos) = d[next];
          dplus[next++] = pos;
        }
        if (i + 1 < m) y(pos, pos + 1) = 1.0;
      }
      at += m;
    }
    int next_minus = 0;
    for (int m : segm) {
      for (int i = 0; i < m; ++i) {
        const Index pos = at + i;
        y(pos, pos) = -d[next_minus];
        dminus[next_minus++] = pos;
        if (i + 1 < m) y(pos, pos + 1) = 1.0;
      }
      at += m;
    }

    const ComplexMatrix v = upper_eigenvectors(y);
    ComplexMatrix gd = ComplexMatrix::Zero(n, n);
    ComplexMatrix hd = ComplexMatrix::Zero(n, n);
    for (Index o : ones) gd(o, o) = 1.0;
    for (int l = 0; l < s_dim; ++l) {
      const auto [eb, fb] = doi_block(d[l]);
      place(gd, dplus[l], dminus[l], eb);
      place(hd, dplus[l], dminus[l], fb);
    }
    const ComplexMatrix w = qmat * v;
    const ComplexMatrix w_inv = upper_inverse(v) * q_inv;
    CertificatePair c =
        make_pair(CertificateKind::idempotent_difference, w * gd * w_inv, w * hd * w_inv, z);
    c.condition = cond2(w);
    c.attempts = attempt + 1;
    best = std::min(best, c.target_residual);
    if (c.target_residual < eps && c.structure_residual <= tol.residual) return c;
  }
  std::ostringstream msg;
  msg << "doi_approximant_pm1: no certificate within eps = " << eps << " (best residual " << best
      << ")";
  throw ConvergenceError(msg.str(), max_attempts);
}

CertificatePair doi_approximant(const ComplexMatrix& t, double eps, const Tolerances& tol,
                                std::uint64_t seed) {
  require_square_finite(t, "doi_approximant");
  tol.validate();
  require_eps(eps, "doi_approximant");
  const MembershipReport report = in_clos_doi(t, tol);
  require_verdict(report, "doi_approximant");
  const Index n = t.rows();
  if (opnorm(t) == 0.0) return zero_pair(CertificateKind::idempotent_difference, n);

  double sign = 1.0;
  for (const auto& [name, value] : report.evidence.values) {
    if (name == "sign") sign = value;
  }
  const ComplexMatrix ts = sign * t;

  SchurForm form = schur(ts, tol);
  const auto eig = detail::schur_diagonal(form);
  const double radius = cluster_radius(ts, tol);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (const auto& c : detail::mirror_clusters(eig, radius)) {
    if (detail::near(c.center, 1.0, radius) || detail::near(c.center, -1.0, radius)) {
      for (int i : c.alpha) labels[i] = 1;
    }
  }
  const auto units = std::count(labels.begin(), labels.end(), 1);

  auto balanced_part = [&](const ComplexMatrix& b, double e, std::uint64_t sd) {
    const Approximant a = coi_approximant(b, e, tol, sd);
    CertificatePair c = coi_to_doi(a.pair.left, a.pair.right, tol);
    c.condition = a.pair.condition;
    c.attempts = a.pair.attempts;
    return c;
  };

  CertificatePair out;
  if (units == 0) {
    out = balanced_part(ts, eps, seed);
  } else if (units == n) {
    out = doi_approximant_pm1(ts, eps, tol);
  } else {
    const RieszSplit split = split_by_labels(ts, std::move(form), labels, tol);
    const ComplexMatrix& s = split.similarity;
    const ComplexMatrix s_inv = s.inverse();
    ComplexMatrix b, z;
    for (std::size_t k = 0; k < split.blocks.size(); ++k) {
      (split.region_of_block[k] == 1 ? z : b) = split.blocks[k];
    }
    double part = eps / (2.0 * split.condition);
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int attempt = 0; attempt < 9 && !found; ++attempt, part /= 2.0) {
      const CertificatePair cb = balanced_part(b, part, seed + static_cast<std::uint64_t>(attempt));
      const CertificatePair cz = doi_approximant_pm1(z, part, tol);
      CertificatePair c = make_pair(CertificateKind::idempotent_difference,
                                    s * direct_sum(cb.left, cz.left) * s_inv,
                                    s * direct_sum(cb.right, cz.right) * s_inv, ts);
      c.condition = split.condition * std::max(cb.condition, cz.condition);
      c.attempts = attempt + 1;
      best = std::min(best, c.target_residual);
      if (c.target_residual < eps && c.structure_residual <= tol.residual) {
        out = std::move(c);
        found = true;
      }
    }
    if (!found) {
      std::ostringstream msg;
      msg << "doi_approximant: no certificate within eps = " << eps << " (best residual " << best
          << ")";
      throw ConvergenceError(msg.str(), 9);
    }
  }
  if (sign < 0.0) std::swap(out.left, out.right);
  out.seed = seed;
  out.target_residual = opnorm(out.combined() - t);
  if (!(out.target_residual < eps)) {
    std::ostringstream msg;
    msg << "doi_approximant: residual " << out.target_residual << " is not below eps = " << eps;
    throw ConvergenceError(msg.str(), out.attempts);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact routes

CertificatePair coi_exact(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "coi_exact");
  tol.validate();
  require_verdict(is_coi(t, tol), "coi_exact");
  const Index n = t.rows();
  const double nt = opnorm(t);
  if (nt == 0.0) return zero_pair(CertificateKind::idempotent_commutator, n);
  if (opnorm(t * t) <= tol.residual * nt * nt) return coi_pair_nilpotent_order2(t, tol);

  const auto diag = diagonalize(t, tol);
  if (!diag) {
    throw PreconditionError(
        "coi_exact: no exact construction for this non-diagonalisable input; "
        "use the approximant");
  }
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> zeros;
  pair_positions(diag->values, cluster_radius(t, tol), pairs, zeros);
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  ComplexMatrix f = ComplexMatrix::Zero(n, n);
  for (const auto& [a, b] : pairs) {
    const Complex beta = (diag->values[a] - diag->values[b]) / 2.0;
    if (beta == 0.0) continue;
    const auto [eb, fb] = coi_block(beta);
    place(e, a, b, eb);
    place(f, a, b, fb);
  }
  CertificatePair c = make_pair(CertificateKind::idempotent_commutator, diag->s * e * diag->s_inv,
                                diag->s * f * diag->s_inv, t);
  c.condition = diag->condition;
  return c;
}

CertificatePair doi_exact(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "doi_exact");
  tol.validate();
  require_verdict(is_doi(t, tol), "doi_exact");
  const Index n = t.rows();
  if (opnorm(t) == 0.0) return zero_pair(CertificateKind::idempotent_difference, n);
  const auto diag = diagonalize(t, tol);
  if (!diag) {
    throw PreconditionError(
        "doi_exact: no exact construction for this non-diagonalisable input; "
        "use the approximant");
  }
  const double radius = cluster_radius(t, tol);
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  ComplexMatrix h = ComplexMatrix::Zero(n, n);
  std::vector<int> rest;
  for (Index i = 0; i < n; ++i) {
    const Complex v = diag->values[i];
    if (detail::near(v, 1.0, radius)) {
      g(i, i) = 1.0;
    } else if (detail::near(v, -1.0, radius)) {
      h(i, i) = 1.0;
    } else {
      rest.push_back(static_cast<int>(i));
    }
  }
  std::vector<Complex> vals(diag->values.begin(), diag->values.end());
  std::vector<Complex> sub;
  for (int i : rest) sub.push_back(vals[i]);
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> zeros;
  pair_positions(sub, radius, pairs, zeros);
  for (const auto& [a, b] : pairs) {
    const Complex d = (sub[a] - sub[b]) / 2.0;
    if (std::abs(d) <= radius) continue;
    const auto [eb, fb] = doi_block(d);
    place(g, rest[a], rest[b], eb);
    place(h, rest[a], rest[b], fb);
  }
  CertificatePair c = make_pair(CertificateKind::idempotent_difference, diag->s * g * diag->s_inv,
                                diag->s * h * diag->s_inv, t);
  c.condition = diag->condition;
  return c;
}

// ---------------------------------------------------------------------------
// Orthogonal projections

namespace {

std::string pairing_table(const Eigen::VectorXd& ev) {
  std::ostringstream os;
  os << "eigenvalues [";
  for (Index i = 0; i < ev.size(); ++i) os << (i ? ", " : "") << ev(i);
  os << "]";
  return os.str();
}

}  // namespace

CertificatePair cop_pair(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "cop_pair");
  tol.validate();
  require_verdict(is_cop(t, tol), "cop_pair");
  const Index n = t.rows();
  const double radius = tol.eig_cluster * tolerance_scale(t);
  const ComplexMatrix k = Complex(0.0, 0.5) * (t - t.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const ComplexMatrix& vecs = es.eigenvectors();

  // Model pair on C^2 and the unitary diagonalising i[P0, Q0].
  ComplexMatrix w(2, 2);
  w << 1.0, 1.0, Complex(0.0, -1.0), Complex(0.0, 1.0);
  w /= std::sqrt(2.0);

  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n / 2; ++i) {
    const Index lo = i;
    const Index hi = n - 1 - i;
    const double lp = ev(hi);
    const double lm = ev(lo);
    if (std::abs(lp + lm) > 2.0 * radius) {
      throw PairingError("cop_pair: eigenvalues of iT do not pair under negation; " +
                             pairing_table(ev),
                         {Complex(lp), Complex(lm)});
    }
    double tt = std::clamp((lp - lm) / 2.0, 0.0, 0.5);
    if (tt <= radius) continue;
    // asin is flat at 1: rounding in the eigenvalue would move theta by sqrt(u).
    if (0.5 - tt <= 64.0 * std::numeric_limits<double>::epsilon()) tt = 0.5;
    const double theta = 0.5 * std::asin(2.0 * tt);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    ComplexMatrix p0(2, 2), q0(2, 2), u(n, 2);
    p0 << 1.0, 0.0, 0.0, 0.0;
    q0 << c * c, c * s, c * s, s * s;
    u.col(0) = vecs.col(hi);
    u.col(1) = vecs.col(lo);
    const ComplexMatrix v = u * w.adjoint();
    p += v * p0 * v.adjoint();
    q += v * q0 * v.adjoint();
  }
  return make_pair(CertificateKind::projection_commutator, p, q, t);
}

CertificatePair dop_pair(const ComplexMatrix& h, const Tolerances& tol) {
  require_square_finite(h, "dop_pair");
  tol.validate();
  require_verdict(is_dop(h, tol), "dop_pair");
  const Index n = h.rows();
  const double radius = tol.eig_cluster * tolerance_scale(h);
  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const ComplexMatrix& vecs = es.eigenvectors();

  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  ComplexMatrix q = ComplexMatrix::Zero(n, n);
  std::vector<Index> pos, neg;
  for (Index i = 0; i < n; ++i) {
    const double l = ev(i);
    if (std::abs(l - 1.0) <= radius) {
      p += vecs.col(i) * vecs.col(i).adjoint();
    } else if (std::abs(l + 1.0) <= radius) {
      q += vecs.col(i) * vecs.col(i).adjoint();
    } else if (std::abs(l) <= radius) {
      continue;
    } else if (l > 0) {
      pos.push_back(i);
    } else {
      neg.push_back(i);
    }
  }
  // ev is ascending: pos ascending, neg ascending (most negative first).
  std::reverse(neg.begin(), neg.end());
  if (pos.size() != neg.size()) {
    std::vector<Complex> unmatched;
    const auto& longer = pos.size() > neg.size() ? pos : neg;
    for (std::size_t i = std::min(pos.size(), neg.size()); i < longer.size(); ++i) {
      unmatched.emplace_back(ev(longer[i]));
    }
    throw PairingError("dop_pair: unpaired eigenvalues; " + pairing_table(ev), unmatched);
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double lp = ev(pos[k]);
    const double lm = ev(neg[k]);
    if (std::abs(lp + lm) > 2.0 * radius) {
      throw PairingError("dop_pair: eigenvalues do not pair under negation; " + pairing_table(ev),
                         {Complex(lp), Complex(lm)});
    }
    const double c = std::clamp((lp - lm) / 2.0, 0.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double norm = std::sqrt(2.0 + 2.0 * c);
    ComplexMatrix p0(2, 2), q0(2, 2), w(2, 2), u(n, 2);
    p0 << 1.0, 0.0, 0.0, 0.0;
    q0 << s * s, s * c, s * c, c * c;
    w << (c + 1.0) / norm, s / norm, -s / norm, (c + 1.0) / norm;
    u.col(0) = vecs.col(pos[k]);
    u.col(1) = vecs.col(neg[k]);
    const ComplexMatrix v = u * w.adjoint();
    p += v * p0 * v.adjoint();
    q += v * q0 * v.adjoint();
  }
  return make_pair(CertificateKind::projection_difference, p, q, h);
}

ComplexMatrix symmetrize_spectrum(const ComplexMatrix& k, double eps, const Tolerances& tol) {
  require_square_finite(k, "symmetrize_spectrum");
  tol.validate();
  require_eps(eps, "symmetrize_spectrum");
  const double scale = tolerance_scale(k);
  if (opnorm(k - k.adjoint()) > tol.residual * scale) {
    throw PreconditionError("symmetrize_spectrum: K is not hermitian within tolerance");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (k + k.adjoint()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const ComplexMatrix& vecs = es.eigenvectors();
  const Index n = k.rows();
  std::vector<Index> plus, minus;
  for (Index i = 0; i < n; ++i) {
    if (ev(i) >= eps) plus.push_back(i);
    if (ev(i) <= -eps) minus.push_back(i);
  }
  // Largest magnitudes first on both sides.
  std::reverse(plus.begin(), plus.end());
  std::vector<Complex> unmatched;
  const std::size_t m = std::min(plus.size(), minus.size());
  for (std::size_t i = m; i < plus.size(); ++i) unmatched.emplace_back(ev(plus[i]));
  for (std::size_t i = m; i < minus.size(); ++i) unmatched.emplace_back(ev(minus[i]));
  for (std::size_t i = 0; i < m; ++i) {
    if (!(std::abs(ev(plus[i]) + ev(minus[i])) < eps)) {
      unmatched.emplace_back(ev(plus[i]));
      unmatched.emplace_back(ev(minus[i]));
    }
  }
  if (!unmatched.empty()) {
    throw PairingError("symmetrize_spectrum: outer spectrum does not pair under negation",
                       unmatched);
  }
  ComplexMatrix l = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < m; ++i) {
    const auto up = vecs.col(plus[i]);
    const auto um = vecs.col(minus[i]);
    l += ev(plus[i]) * (up * up.adjoint() - um * um.adjoint());
  }
  return l;
}

}  // namespace idemlab

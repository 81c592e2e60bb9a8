#include "idemlab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "idemlab/detail/mirror.hpp"

namespace idemlab {

namespace detail {

Complex mean_at(std::span<const Complex> eig, const std::vector<int>& idx) {
  Complex s = 0.0;
  for (int i : idx) s += eig[i];
  return idx.empty() ? s : s / static_cast<double>(idx.size());
}

std::vector<Complex> schur_diagonal(const SchurForm& form) {
  std::vector<Complex> d(static_cast<std::size_t>(form.triangular.rows()));
  for (Index i = 0; i < form.triangular.rows(); ++i) d[i] = form.triangular(i, i);
  return d;
}

bool near(Complex z, Complex point, double radius) { return std::abs(z - point) <= radius; }

std::vector<MirrorCluster> mirror_clusters(std::span<const Complex> eig, double radius,
                                           bool* ambiguous) {
  const int n = static_cast<int>(eig.size());
  std::vector<Complex> points(eig.begin(), eig.end());
  for (int i = 0; i < n; ++i) points.push_back(-eig[i]);
  const auto groups = cluster_points(points, radius, ambiguous);

  std::vector<int> owner(points.size());
  std::vector<MirrorCluster> out(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Complex s = 0.0;
    for (int p : groups[g]) {
      owner[p] = static_cast<int>(g);
      s += points[p];
      if (p < n) {
        out[g].alpha.push_back(p);
      } else {
        out[g].negated.push_back(p - n);
      }
    }
    out[g].center = s / static_cast<double>(groups[g].size());
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int p = groups[g].front();
    out[g].mirror = owner[p < n ? p + n : p - n];
    out[g].self_mirror = out[g].mirror == static_cast<int>(g);
  }
  return out;
}

std::vector<std::vector<int>> segre_of_groups(const SchurForm& form,
                                              std::span<const std::vector<int>> groups,
                                              double scale, const Tolerances& tol) {
  const Index n = form.triangular.rows();
  const int rest = static_cast<int>(groups.size());
  std::vector<int> labels(static_cast<std::size_t>(n), rest);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int i : groups[g]) labels[i] = static_cast<int>(g);
  }
  const GroupedSchur grouped = group_schur(form, std::move(labels));
  std::vector<std::vector<int>> out(groups.size());
  for (std::size_t r = 0; r < grouped.runs(); ++r) {
    const int label = grouped.run_label[r];
    if (label == rest) continue;
    ComplexMatrix block = grouped.run_block(r);
    const Complex center = block.diagonal().mean();
    block.diagonal().array() -= center;
    out[label] = nilpotent_segre(block, scale, tol);
  }
  return out;
}

}  // namespace detail

using detail::MirrorCluster;

// ---------------------------------------------------------------------------

std::string to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::balanced: return "balanced";
    case ClassTag::neg_similar: return "neg_similar";
    case ClassTag::coi: return "coi";
    case ClassTag::doi: return "doi";
    case ClassTag::clos_coi: return "clos_coi";
    case ClassTag::clos_doi: return "clos_doi";
    case ClassTag::cop: return "cop";
    case ClassTag::dop: return "dop";
    case ClassTag::clos_cop: return "clos_cop";
    case ClassTag::clos_dop: return "clos_dop";
  }
  return "unknown";
}

std::vector<ClassTag> all_class_tags() {
  return {ClassTag::balanced, ClassTag::neg_similar, ClassTag::coi,      ClassTag::doi,
          ClassTag::clos_coi, ClassTag::clos_doi,    ClassTag::cop,      ClassTag::dop,
          ClassTag::clos_cop, ClassTag::clos_dop};
}

ClassTag class_tag_from_string(const std::string& name) {
  for (ClassTag t : all_class_tags()) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown class '" + name + "'");
}

const ConditionCheck* MembershipReport::condition(const std::string& name) const {
  for (const auto& c : evidence.conditions) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

bool nilpotent_has_square_root(std::span<const int> segre) {
  std::vector<int> s(segre.begin(), segre.end());
  if (s.size() % 2 == 1) s.push_back(0);
  for (std::size_t j = 0; j < s.size(); j += 2) {
    if (s[j] - s[j + 1] > 1) return false;
  }
  return true;
}

namespace {

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string format_segre(const std::vector<int>& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

MembershipReport start_report(ClassTag tag, const Tolerances& tol) {
  MembershipReport r;
  r.class_tag = tag;
  r.tol_used = tol;
  return r;
}

void finish(MembershipReport& r) {
  r.verdict = std::all_of(r.evidence.conditions.begin(), r.evidence.conditions.end(),
                          [](const ConditionCheck& c) { return c.passed; });
}

void add(MembershipReport& r, std::string name, bool passed, std::string detail = {}) {
  r.evidence.conditions.push_back({std::move(name), passed, std::move(detail)});
}

/// Clusters visited once per {C, -C} pair.
std::vector<int> canonical_clusters(const std::vector<MirrorCluster>& clusters) {
  std::vector<int> out;
  std::vector<bool> seen(clusters.size(), false);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (seen[c]) continue;
    seen[c] = true;
    if (clusters[c].mirror >= 0) seen[clusters[c].mirror] = true;
    out.push_back(static_cast<int>(c));
  }
  return out;
}

PairingRow pairing_row(std::span<const Complex> eig, const MirrorCluster& c) {
  PairingRow row;
  row.alpha = c.alpha.empty() ? c.center : detail::mean_at(eig, c.alpha);
  row.neg_alpha = c.negated.empty() ? -c.center : detail::mean_at(eig, c.negated);
  row.mu_alpha = static_cast<int>(c.alpha.size());
  row.mu_neg = static_cast<int>(c.negated.size());
  return row;
}

/// Balanced check over the given eigenvalues; appends pairing rows and one
/// condition per pair. `skip` excludes clusters from the condition list.
template <typename Skip>
void balance_conditions(MembershipReport& r, std::span<const Complex> eig, double radius,
                        Skip skip) {
  bool ambiguous = false;
  const auto clusters = detail::mirror_clusters(eig, radius, &ambiguous);
  if (ambiguous) r.evidence.warnings.push_back("eigenvalue clustering within 10% of radius");
  for (int c : canonical_clusters(clusters)) {
    const auto& cl = clusters[c];
    PairingRow row = pairing_row(eig, cl);
    r.evidence.pairing.push_back(row);
    if (skip(cl)) continue;
    add(r, "mu(" + format_complex(row.alpha) + ")=mu(" + format_complex(row.neg_alpha) + ")",
        row.mu_alpha == row.mu_neg,
        std::to_string(row.mu_alpha) + " vs " + std::to_string(row.mu_neg));
  }
}

struct Spectral {
  SchurForm form;
  std::vector<Complex> eig;
  double radius;
  double scale;
  std::vector<MirrorCluster> clusters;
  bool ambiguous = false;
};

Spectral analyse(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "classify");
  tol.validate();
  Spectral s;
  s.form = schur(t, tol);
  s.eig = detail::schur_diagonal(s.form);
  s.scale = tolerance_scale(t);
  s.radius = tol.eig_cluster * s.scale;
  s.clusters = detail::mirror_clusters(s.eig, s.radius, &s.ambiguous);
  return s;
}

/// Segre comparison of every non-self-mirror pair, used by neg_similar and coi.
void neg_similar_conditions(MembershipReport& r, const Spectral& s, const Tolerances& tol) {
  if (s.ambiguous) r.evidence.warnings.push_back("eigenvalue clustering within 10% of radius");
  std::vector<std::vector<int>> groups;
  std::vector<int> rows;
  for (int c : canonical_clusters(s.clusters)) {
    const auto& cl = s.clusters[c];
    r.evidence.pairing.push_back(pairing_row(s.eig, cl));
    if (cl.self_mirror) {
      if (!detail::near(cl.center, 0.0, s.radius)) {
        r.evidence.warnings.push_back("self-paired cluster away from 0 at " +
                                      format_complex(cl.center));
      }
      continue;
    }
    if (cl.alpha.empty() || cl.negated.empty()) {
      const auto& row = r.evidence.pairing.back();
      add(r, "segre(" + format_complex(row.alpha) + ")=segre(" + format_complex(row.neg_alpha) + ")",
          false, "unpaired eigenvalue cluster");
      continue;
    }
    groups.push_back(cl.alpha);
    groups.push_back(cl.negated);
    rows.push_back(static_cast<int>(r.evidence.pairing.size()) - 1);
  }
  const auto segres = detail::segre_of_groups(s.form, groups, s.scale, tol);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    auto& row = r.evidence.pairing[rows[k]];
    row.segre_alpha = segres[2 * k];
    row.segre_neg = segres[2 * k + 1];
    add(r, "segre(" + format_complex(row.alpha) + ")=segre(" + format_complex(row.neg_alpha) + ")",
        row.segre_alpha == row.segre_neg,
        format_segre(row.segre_alpha) + " vs " + format_segre(row.segre_neg));
  }
}

}  // namespace

// ---------------------------------------------------------------------------

MembershipReport is_balanced(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "is_balanced");
  tol.validate();
  auto r = start_report(ClassTag::balanced, tol);
  const SchurForm form = schur(t, tol);
  const auto eig = detail::schur_diagonal(form);
  balance_conditions(r, eig, cluster_radius(t, tol),
                     [](const MirrorCluster& c) { return c.self_mirror; });
  finish(r);
  return r;
}

std::vector<Complex> charpoly_coefficients(const ComplexMatrix& t) {
  require_square_finite(t, "charpoly_coefficients");
  const Index n = t.rows();
  Eigen::HessenbergDecomposition<ComplexMatrix> hd(t);
  const ComplexMatrix h = hd.matrixH();
  // p[k] holds the characteristic polynomial of the leading k x k block.
  std::vector<std::vector<Complex>> p(static_cast<std::size_t>(n) + 1);
  p[0] = {1.0};
  for (Index k = 1; k <= n; ++k) {
    std::vector<Complex> next(static_cast<std::size_t>(k) + 1, 0.0);
    const auto& prev = p[k - 1];
    for (std::size_t j = 0; j < prev.size(); ++j) {
      next[j + 1] += prev[j];
      next[j] -= h(k - 1, k - 1) * prev[j];
    }
    Complex chain = 1.0;
    for (Index i = k - 1; i >= 1; --i) {
      chain *= h(i, i - 1);
      const Complex w = h(i - 1, k - 1) * chain;
      for (std::size_t j = 0; j < p[i - 1].size(); ++j) next[j] -= w * p[i - 1][j];
    }
    p[k] = std::move(next);
  }
  return p[n];
}

bool charpoly_parity(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "charpoly_parity");
  const Index n = t.rows();
  if (n > 64) {
    throw PreconditionError("charpoly_parity: n > 64 risks coefficient overflow; use is_balanced");
  }
  const double s = tolerance_scale(t);
  const auto a = charpoly_coefficients(t / s);
  const double tau = std::max(tol.eig_cluster, 1e-12);
  double binom = 1.0;  // C(n, k) with k = n - j
  for (Index k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
    if (k % 2 == 1 && std::abs(a[static_cast<std::size_t>(n - k)]) > tau * binom) return false;
  }
  return true;
}

MembershipReport is_neg_similar(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = start_report(ClassTag::neg_similar, tol);
  const Spectral s = analyse(t, tol);
  neg_similar_conditions(r, s, tol);
  finish(r);
  return r;
}

MembershipReport is_coi(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = start_report(ClassTag::coi, tol);
  const Spectral s = analyse(t, tol);
  neg_similar_conditions(r, s, tol);

  const Complex half_i(0.0, 0.5);
  const MirrorCluster* at = nullptr;
  for (const auto& c : s.clusters) {
    if (!c.alpha.empty() && detail::near(detail::mean_at(s.eig, c.alpha), half_i, s.radius)) at = &c;
  }
  if (at == nullptr) {
    add(r, "sqrt(T1^2+I/4)", true, "i/2 is not an eigenvalue");
  } else {
    std::vector<int> labels(s.eig.size(), 1);
    for (int i : at->alpha) labels[i] = 0;
    const GroupedSchur g = group_schur(s.form, labels);
    const ComplexMatrix t1 = g.run_block(static_cast<std::size_t>(g.run_of(0)));
    const ComplexMatrix n =
        t1 * t1 + 0.25 * ComplexMatrix::Identity(t1.rows(), t1.cols());
    const auto segre = nilpotent_segre(n, s.scale * s.scale, tol);
    r.evidence.nullities.push_back({"dim H(i/2)", static_cast<int>(t1.rows())});
    add(r, "sqrt(T1^2+I/4)", nilpotent_has_square_root(segre),
        "segre(0; T1^2+I/4) = " + format_segre(segre));
  }
  finish(r);
  return r;
}

MembershipReport is_doi(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = start_report(ClassTag::doi, tol);
  const Spectral s = analyse(t, tol);
  if (s.ambiguous) r.evidence.warnings.push_back("eigenvalue clustering within 10% of radius");

  std::vector<std::vector<int>> groups;
  struct Pending {
    int row;
    bool unit;  // the (1, -1) pair
  };
  std::vector<Pending> pending;
  for (int c : canonical_clusters(s.clusters)) {
    const auto& cl = s.clusters[c];
    if (detail::near(cl.center, 0.0, s.radius)) {
      r.evidence.pairing.push_back(pairing_row(s.eig, cl));
      continue;  // no constraint at 0
    }
    const bool plus = detail::near(cl.center, 1.0, s.radius);
    const bool minus = detail::near(cl.center, -1.0, s.radius);
    PairingRow row = pairing_row(s.eig, cl);
    std::vector<int> a = cl.alpha;
    std::vector<int> b = cl.negated;
    if (minus) {
      std::swap(a, b);
      std::swap(row.alpha, row.neg_alpha);
      std::swap(row.mu_alpha, row.mu_neg);
    }
    r.evidence.pairing.push_back(row);
    if (!(plus || minus) && (a.empty() || b.empty())) {
      add(r, "(ii) segre(" + format_complex(row.alpha) + ")=segre(" +
                 format_complex(row.neg_alpha) + ")",
          false, "unpaired eigenvalue cluster");
      continue;
    }
    groups.push_back(a);
    groups.push_back(b);
    pending.push_back({static_cast<int>(r.evidence.pairing.size()) - 1, plus || minus});
  }
  // Empty index groups produce empty Segre sequences.
  std::vector<std::vector<int>> nonempty;
  std::vector<int> where(groups.size(), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!groups[g].empty()) {
      where[g] = static_cast<int>(nonempty.size());
      nonempty.push_back(groups[g]);
    }
  }
  const auto segres = detail::segre_of_groups(s.form, nonempty, s.scale, tol);
  auto segre_at = [&](std::size_t g) {
    return where[g] < 0 ? std::vector<int>{} : segres[where[g]];
  };
  for (std::size_t k = 0; k < pending.size(); ++k) {
    auto& row = r.evidence.pairing[pending[k].row];
    row.segre_alpha = segre_at(2 * k);
    row.segre_neg = segre_at(2 * k + 1);
    if (pending[k].unit) {
      auto m = row.segre_alpha;
      auto nn = row.segre_neg;
      const std::size_t len = std::max(m.size(), nn.size());
      m.resize(len, 0);
      nn.resize(len, 0);
      bool ok = true;
      for (std::size_t i = 0; i < len; ++i) ok = ok && std::abs(m[i] - nn[i]) <= 1;
      add(r, "(iii) |m_k-n_k|<=1", ok,
          "segre(1) = " + format_segre(row.segre_alpha) +
              ", segre(-1) = " + format_segre(row.segre_neg));
    } else {
      add(r, "(ii) segre(" + format_complex(row.alpha) + ")=segre(" +
                 format_complex(row.neg_alpha) + ")",
          row.segre_alpha == row.segre_neg,
          format_segre(row.segre_alpha) + " vs " + format_segre(row.segre_neg));
    }
  }
  finish(r);
  return r;
}

MembershipReport in_clos_coi(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = is_balanced(t, tol);
  r.class_tag = ClassTag::clos_coi;
  if (t.rows() <= 64) {
    const bool parity = charpoly_parity(t, tol);
    r.evidence.values.push_back({"charpoly_parity", parity ? 1.0 : 0.0});
    if (parity != r.verdict) {
      r.evidence.warnings.push_back("characteristic-polynomial parity disagrees with the "
                                    "spectral pairing");
    }
  }
  return r;
}

MembershipReport in_clos_doi(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = start_report(ClassTag::clos_doi, tol);
  const Spectral s = analyse(t, tol);
  const Index n = t.rows();

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  bool has_unit = false;
  for (const auto& c : s.clusters) {
    if (detail::near(c.center, 1.0, s.radius) || detail::near(c.center, -1.0, s.radius)) {
      for (int i : c.alpha) {
        labels[i] = 1;
        has_unit = true;
      }
    }
  }
  if (!has_unit) {
    balance_conditions(r, s.eig, s.radius, [](const MirrorCluster& c) { return c.self_mirror; });
    r.evidence.values.push_back({"dim Z", 0.0});
    finish(r);
    return r;
  }

  const RieszSplit split = split_by_labels(t, s.form, labels, tol);
  r.evidence.values.push_back({"cond(similarity)", split.condition});
  ComplexMatrix z, b;
  for (std::size_t k = 0; k < split.blocks.size(); ++k) {
    (split.region_of_block[k] == 1 ? z : b) = split.blocks[k];
  }
  const Complex trace = z.trace();
  r.evidence.trace = trace;
  const double rounded = std::round(trace.real());
  if (std::abs(trace - Complex(rounded, 0.0)) > 10.0 * tol.residual * static_cast<double>(n)) {
    std::ostringstream msg;
    msg << "in_clos_doi: trace of the {-1,1} component (" << trace
        << ") is not within tolerance of an integer";
    throw PreconditionError(msg.str());
  }
  int rank_r = static_cast<int>(rounded);
  double sign = 1.0;
  if (rank_r < 0) {
    sign = -1.0;
    rank_r = -rank_r;
    r.evidence.warnings.push_back("trace negative: evaluated on -T");
  }
  r.evidence.values.push_back({"r", static_cast<double>(rank_r)});
  r.evidence.values.push_back({"sign", sign});
  r.evidence.values.push_back({"dim Z", static_cast<double>(z.rows())});

  if (b.size() > 0) {
    std::vector<Complex> eig_b(static_cast<std::size_t>(b.rows()));
    for (Index i = 0; i < b.rows(); ++i) eig_b[i] = b(i, i);
    balance_conditions(r, eig_b, s.radius, [](const MirrorCluster& c) { return c.self_mirror; });
  }
  const ComplexMatrix shifted =
      sign * z - ComplexMatrix::Identity(z.rows(), z.cols());
  const int nul = nullity(shifted, tol, s.scale);
  r.evidence.nullities.push_back({"nul(Z-I)", nul});
  add(r, "nul(Z-I)>=r", nul >= rank_r,
      std::to_string(nul) + " vs r = " + std::to_string(rank_r));
  finish(r);
  return r;
}

MembershipReport is_cop(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "is_cop");
  tol.validate();
  auto r = start_report(ClassTag::cop, tol);
  const double norm = opnorm(t);
  const double scale = std::max(norm, 1.0);
  const double skew = opnorm(t + t.adjoint());
  r.evidence.values.push_back({"||T+T*||", skew});
  r.evidence.values.push_back({"||T||", norm});
  add(r, "(a) T*=-T", skew <= tol.residual * scale);
  add(r, "(b) ||T||<=1/2", norm <= 0.5 + tol.residual);

  const ComplexMatrix k = Complex(0.0, 0.5) * (t - t.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k, Eigen::EigenvaluesOnly);
  std::vector<Complex> eig;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) eig.emplace_back(es.eigenvalues()(i), 0.0);
  const std::size_t before = r.evidence.conditions.size();
  balance_conditions(r, eig, tol.eig_cluster * scale,
                     [](const MirrorCluster& c) { return c.self_mirror; });
  bool symmetric = true;
  for (std::size_t i = before; i < r.evidence.conditions.size(); ++i) {
    symmetric = symmetric && r.evidence.conditions[i].passed;
  }
  r.evidence.conditions.resize(before);
  add(r, "(c) T~T* (spectrum of iT symmetric)", symmetric);
  finish(r);
  return r;
}

MembershipReport is_dop(const ComplexMatrix& h, const Tolerances& tol) {
  require_square_finite(h, "is_dop");
  tol.validate();
  auto r = start_report(ClassTag::dop, tol);
  const double norm = opnorm(h);
  const double scale = std::max(norm, 1.0);
  const double radius = tol.eig_cluster * scale;
  const double asym = opnorm(h - h.adjoint());
  r.evidence.values.push_back({"||H-H*||", asym});
  add(r, "(a) H=H*", asym <= tol.residual * scale);

  const ComplexMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  r.evidence.values.push_back({"min eigenvalue", lo});
  r.evidence.values.push_back({"max eigenvalue", hi});
  add(r, "(b) spectrum in [-1,1]", lo >= -1.0 - tol.residual && hi <= 1.0 + tol.residual);

  std::vector<Complex> eig;
  for (Index i = 0; i < ev.size(); ++i) eig.emplace_back(ev(i), 0.0);
  const std::size_t before = r.evidence.conditions.size();
  balance_conditions(r, eig, radius, [&](const MirrorCluster& c) {
    return c.self_mirror || detail::near(c.center, 1.0, radius) ||
           detail::near(c.center, -1.0, radius);
  });
  bool symmetric = true;
  for (std::size_t i = before; i < r.evidence.conditions.size(); ++i) {
    symmetric = symmetric && r.evidence.conditions[i].passed;
  }
  r.evidence.conditions.resize(before);
  add(r, "(c) H0~-H0", symmetric);
  finish(r);
  return r;
}

MembershipReport in_clos_cop(const ComplexMatrix& t, const Tolerances& tol) {
  auto r = is_cop(t, tol);
  r.class_tag = ClassTag::clos_cop;
  return r;
}

MembershipReport in_clos_dop(const ComplexMatrix& h, const Tolerances& tol) {
  auto r = is_dop(h, tol);
  r.class_tag = ClassTag::clos_dop;
  return r;
}

MembershipReport classify(const ComplexMatrix& t, ClassTag tag, const Tolerances& tol) {
  switch (tag) {
    case ClassTag::balanced: return is_balanced(t, tol);
    case ClassTag::neg_similar: return is_neg_similar(t, tol);
    case ClassTag::coi: return is_coi(t, tol);
    case ClassTag::doi: return is_doi(t, tol);
    case ClassTag::clos_coi: return in_clos_coi(t, tol);
    case ClassTag::clos_doi: return in_clos_doi(t, tol);
    case ClassTag::cop: return is_cop(t, tol);
    case ClassTag::dop: return is_dop(t, tol);
    case ClassTag::clos_cop: return in_clos_cop(t, tol);
    case ClassTag::clos_dop: return in_clos_dop(t, tol);
  }
  throw std::invalid_argument("classify: unknown class tag");
}

}  // namespace idemlab

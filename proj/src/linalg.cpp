#include "idemlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace idemlab {

void Tolerances::validate() const {
  if (!(eig_cluster >= 0.0) || !(rank_rel >= 0.0) || !(residual >= 0.0)) {
    throw std::invalid_argument("tolerances must be non-negative");
  }
  if (!(cond_cap >= 1.0)) {
    throw std::invalid_argument("cond_cap must be at least 1");
  }
}

Tolerances tolerance_preset(const std::string& name) {
  if (name.empty() || name == "default") return Tolerances{};
  if (name == "strict") return Tolerances{1e-9, 1e-11, 1e-11, 1e6};
  if (name == "loose") return Tolerances{1e-4, 1e-6, 1e-6, 1e10};
  throw std::invalid_argument("unknown tolerance profile '" + name + "'");
}

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw PreconditionError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

double opnorm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double cond2(const ComplexMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double tolerance_scale(const ComplexMatrix& t) { return std::max(opnorm(t), 1.0); }

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix parts[] = {a, b};
  return direct_sum(std::span<const ComplexMatrix>(parts));
}

// ---------------------------------------------------------------------------

SchurForm schur(const ComplexMatrix& t, const Tolerances& tol) {
  require_square_finite(t, "schur");
  Eigen::ComplexSchur<ComplexMatrix> cs(t.rows());
  cs.compute(t, true);
  if (cs.info() != Eigen::Success) {
    const int iters = static_cast<int>(cs.getMaxIterations());
    std::ostringstream msg;
    msg << "complex Schur iteration did not converge within " << iters << " iterations";
    throw ConvergenceError(msg.str(), iters);
  }
  SchurForm out{cs.matrixU(), cs.matrixT()};
  // Clear the strictly lower part exactly; it is zero up to rounding.
  for (Index j = 0; j < out.triangular.cols(); ++j) {
    for (Index i = j + 1; i < out.triangular.rows(); ++i) out.triangular(i, j) = 0.0;
  }
  const double scale = std::max(opnorm(t), std::numeric_limits<double>::min());
  const double recon =
      (out.unitary * out.triangular * out.unitary.adjoint() - t).norm() / scale;
  if (recon > std::max(tol.residual, 1e-10) * std::sqrt(static_cast<double>(t.rows()))) {
    throw ConvergenceError("Schur factorisation failed its reconstruction check", 0);
  }
  return out;
}

void swap_schur_adjacent(SchurForm& form, Index k) {
  auto& r = form.triangular;
  const Complex t11 = r(k, k);
  const Complex t22 = r(k + 1, k + 1);
  // Eigenvector of the 2x2 block for t22 becomes the new leading direction.
  Eigen::Vector2cd v(r(k, k + 1), t22 - t11);
  const double nv = v.norm();
  if (nv == 0.0) return;  // identical diagonal entries, nothing to do
  v /= nv;
  Eigen::Matrix2cd q;
  q(0, 0) = v(0);
  q(1, 0) = v(1);
  q(0, 1) = -std::conj(v(1));
  q(1, 1) = std::conj(v(0));
  r.middleRows(k, 2) = (q.adjoint() * r.middleRows(k, 2)).eval();
  r.middleCols(k, 2) = (r.middleCols(k, 2) * q).eval();
  form.unitary.middleCols(k, 2) = (form.unitary.middleCols(k, 2) * q).eval();
  r(k + 1, k) = 0.0;
  r(k, k) = t22;
  r(k + 1, k + 1) = t11;
}

void sort_schur(SchurForm& form, std::vector<int>& labels) {
  const Index n = form.triangular.rows();
  // Insertion sort by adjacent swaps keeps the permutation stable.
  for (Index i = 1; i < n; ++i) {
    for (Index j = i; j > 0 && labels[j - 1] > labels[j]; --j) {
      swap_schur_adjacent(form, j - 1);
      std::swap(labels[j - 1], labels[j]);
    }
  }
}

// ---------------------------------------------------------------------------

ComplexMatrix triangular_sylvester(const ComplexMatrix& r, const ComplexMatrix& q,
                                   const ComplexMatrix& c) {
  const Index m = r.rows();
  const Index p = q.rows();
  ComplexMatrix x(m, p);
  for (Index j = 0; j < p; ++j) {
    ComplexVector rhs = c.col(j);
    for (Index i = 0; i < j; ++i) rhs += x.col(i) * q(i, j);
    // Back substitution with (R - q_jj I).
    for (Index i = m - 1; i >= 0; --i) {
      Complex s = rhs(i);
      for (Index l = i + 1; l < m; ++l) s -= r(i, l) * x(l, j);
      x(i, j) = s / (r(i, i) - q(j, j));
    }
  }
  return x;
}

ComplexMatrix sylvester_solve(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c, const Tolerances& tol) {
  require_square_finite(a, "sylvester_solve(A)");
  require_square_finite(b, "sylvester_solve(B)");
  if (c.rows() != a.rows() || c.cols() != b.rows()) {
    throw PreconditionError("sylvester_solve: C has the wrong shape");
  }
  const SchurForm sa = schur(a, tol);
  const SchurForm sb = schur(b, tol);
  const double radius = tol.eig_cluster * std::max({opnorm(a), opnorm(b), 1.0});
  double best = std::numeric_limits<double>::infinity();
  Complex pa, pb;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      const double d = std::abs(sa.triangular(i, i) - sb.triangular(j, j));
      if (d < best) {
        best = d;
        pa = sa.triangular(i, i);
        pb = sb.triangular(j, j);
      }
    }
  }
  if (best <= radius) {
    std::ostringstream msg;
    msg << "sylvester_solve: spectra are not disjoint (nearest pair " << pa << ", " << pb
        << ", distance " << best << ")";
    throw SpectralOverlapError(msg.str(), pa, pb);
  }
  const ComplexMatrix rhs = sa.unitary.adjoint() * c * sb.unitary;
  const ComplexMatrix y = triangular_sylvester(sa.triangular, sb.triangular, rhs);
  return sa.unitary * y * sb.unitary.adjoint();
}

// ---------------------------------------------------------------------------

Region::Region(std::string name, std::function<bool(Complex)> contains,
               std::function<double(Complex)> boundary_distance)
    : name_(std::move(name)),
      contains_(std::move(contains)),
      distance_(std::move(boundary_distance)) {}

Region Region::disk(Complex center, double radius) {
  std::ostringstream name;
  name << "disk(" << center << ", " << radius << ")";
  return Region(
      name.str(), [=](Complex z) { return std::abs(z - center) <= radius; },
      [=](Complex z) { return std::abs(std::abs(z - center) - radius); });
}

Region Region::half_plane_re_above(double x) {
  return Region(
      "Re>" + std::to_string(x), [=](Complex z) { return z.real() > x; },
      [=](Complex z) { return std::abs(z.real() - x); });
}

Region Region::half_plane_re_below(double x) {
  return Region(
      "Re<" + std::to_string(x), [=](Complex z) { return z.real() < x; },
      [=](Complex z) { return std::abs(z.real() - x); });
}

Region Region::union_of(std::vector<Region> parts) {
  std::string name = "union(";
  for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? "," : "") + parts[i].name();
  name += ")";
  auto shared = std::make_shared<std::vector<Region>>(std::move(parts));
  return Region(
      name,
      [shared](Complex z) {
        return std::any_of(shared->begin(), shared->end(),
                           [&](const Region& r) { return r.contains(z); });
      },
      [shared](Complex z) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& r : *shared) d = std::min(d, r.boundary_distance(z));
        return d;
      });
}

Region Region::complement(const Region& r) {
  return Region(
      "not(" + r.name() + ")", [r](Complex z) { return !r.contains(z); },
      [r](Complex z) { return r.boundary_distance(z); });
}

RieszSplit split_by_labels(const ComplexMatrix& t, SchurForm form, std::vector<int> labels,
                           const Tolerances& tol) {
  const Index n = t.rows();
  const GroupedSchur grouped = group_schur(std::move(form), std::move(labels));
  const auto& starts = grouped.starts;
  const auto& group_labels = grouped.run_label;

  ComplexMatrix r = grouped.form.triangular;
  ComplexMatrix w = ComplexMatrix::Identity(n, n);
  const std::size_t groups = group_labels.size();
  for (std::size_t g = 0; g + 1 < groups; ++g) {
    const Index a = starts[g];
    const Index m = starts[g + 1] - a;
    const Index p = n - starts[g + 1];
    const ComplexMatrix x = triangular_sylvester(
        r.block(a, a, m, m), r.block(a + m, a + m, p, p), -r.block(a, a + m, m, p));
    // Conjugation by [[I, X], [0, I]] zeroes the coupling block.
    w.block(0, a + m, n, p) += w.block(0, a, n, m) * x;
    r.block(a, a + m, m, p).setZero();
  }

  RieszSplit out;
  out.similarity = grouped.form.unitary * w;
  for (std::size_t g = 0; g < groups; ++g) {
    const Index a = starts[g];
    const Index m = starts[g + 1] - a;
    out.block_dims.push_back(static_cast<int>(m));
    out.blocks.push_back(r.block(a, a, m, m));
    out.region_of_block.push_back(group_labels[g]);
  }
  out.condition = cond2(w);
  if (!(out.condition <= tol.cond_cap)) {
    std::ostringstream msg;
    msg << "riesz_split: similarity condition number " << out.condition
        << " exceeds cond_cap " << tol.cond_cap;
    throw ConditionError(msg.str(), out.condition);
  }
  return out;
}

RieszSplit riesz_split(const ComplexMatrix& t, std::span<const Region> regions,
                       const Tolerances& tol) {
  require_square_finite(t, "riesz_split");
  tol.validate();
  if (regions.empty()) throw PreconditionError("riesz_split: no regions given");
  SchurForm form = schur(t, tol);
  const double margin = 0.1 * cluster_radius(t, tol);
  std::vector<int> labels(static_cast<std::size_t>(t.rows()));
  for (Index i = 0; i < t.rows(); ++i) {
    const Complex z = form.triangular(i, i);
    int found = -1;
    for (std::size_t k = 0; k < regions.size(); ++k) {
      if (regions[k].boundary_distance(z) <= margin) {
        std::ostringstream msg;
        msg << "riesz_split: eigenvalue " << z << " lies on the boundary of region "
            << regions[k].name();
        throw PreconditionError(msg.str());
      }
      if (regions[k].contains(z)) {
        if (found >= 0) {
          std::ostringstream msg;
          msg << "riesz_split: eigenvalue " << z << " lies in more than one region";
          throw PreconditionError(msg.str());
        }
        found = static_cast<int>(k);
      }
    }
    if (found < 0) {
      std::ostringstream msg;
      msg << "riesz_split: eigenvalue " << z << " lies in no region";
      throw PreconditionError(msg.str());
    }
    labels[static_cast<std::size_t>(i)] = found;
  }
  return split_by_labels(t, std::move(form), std::move(labels), tol);
}

}  // namespace idemlab

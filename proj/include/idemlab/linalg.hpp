#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "idemlab/types.hpp"

namespace idemlab {

// ---------------------------------------------------------------------------
// Norms and small helpers

/// Spectral norm (largest singular value).
double opnorm(const ComplexMatrix& m);

/// 2-norm condition number; +inf for singular input.
double cond2(const ComplexMatrix& m);

/// max(||T||, 1): the scale that turns relative tolerances into radii.
double tolerance_scale(const ComplexMatrix& t);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block-diagonal direct sum.
ComplexMatrix direct_sum(std::span<const ComplexMatrix> blocks);
ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Schur form

struct SchurForm {
  ComplexMatrix unitary;     // U
  ComplexMatrix triangular;  // R, with T = U R U*
};

SchurForm schur(const ComplexMatrix& t, const Tolerances& tol = {});

/// Swaps the diagonal entries k and k+1 of the triangular factor with a
/// unitary plane rotation, keeping U R U* fixed.
void swap_schur_adjacent(SchurForm& form, Index k);

/// Stable reordering of the Schur diagonal so that `labels` (one per diagonal
/// position, permuted along with the entries) ends up non-decreasing.
void sort_schur(SchurForm& form, std::vector<int>& labels);

/// Schur form whose diagonal is grouped into contiguous label runs.
struct GroupedSchur {
  SchurForm form;
  std::vector<int> labels;    // sorted, one per diagonal position
  std::vector<Index> starts;  // run boundaries, starts.back() == n
  std::vector<int> run_label; // label of each run

  std::size_t runs() const { return run_label.size(); }
  Index run_size(std::size_t g) const { return starts[g + 1] - starts[g]; }
  ComplexMatrix run_block(std::size_t g) const;
  /// Run index carrying `label`, or -1.
  int run_of(int label) const;
};

GroupedSchur group_schur(SchurForm form, std::vector<int> labels);

// ---------------------------------------------------------------------------
// Spectrum

struct Cluster {
  Complex center;
  int multiplicity = 0;
};

struct SpectrumReport {
  std::vector<Cluster> clusters;
  double tol_used = 0.0;    // absolute clustering radius
  bool ambiguous = false;   // a merge decision sat within 10% of the radius
};

/// Single-linkage clustering of points at `radius`, followed by merging of
/// clusters whose centres lie within 2*radius. Returns member index lists.
std::vector<std::vector<int>> cluster_points(std::span<const Complex> points,
                                             double radius,
                                             bool* ambiguous = nullptr);

SpectrumReport spectrum(const ComplexMatrix& t, const Tolerances& tol = {});

/// Clustering radius used for `t`: eig_cluster * max(||t||, 1).
double cluster_radius(const ComplexMatrix& t, const Tolerances& tol);

// ---------------------------------------------------------------------------
// Rank and Jordan data

/// n minus the number of singular values above rank_rel * sigma_max.
int nullity(const ComplexMatrix& t, const Tolerances& tol = {});

/// Same count with the cut rank_rel * max(sigma_max, reference). Use it for
/// shifted matrices such as T - I, where sigma_max alone may be rounding noise.
int nullity(const ComplexMatrix& t, const Tolerances& tol, double reference);

struct JordanEntry {
  Complex eigenvalue;
  std::vector<int> segre;  // non-increasing block sizes
};

struct JordanStructure {
  std::vector<JordanEntry> blocks;

  /// Segre sequence of the cluster nearest to `lambda` within `radius`;
  /// empty when there is none.
  std::vector<int> segre_near(Complex lambda, double radius) const;
};

JordanStructure jordan_structure(const ComplexMatrix& t, const Tolerances& tol = {});

/// Segre sequence of a near-nilpotent matrix from its nullity staircase
/// d_k = dim ker M^k, k = 1..m. Singular values of M^k below
/// rank_rel * scale^k count as zero. Throws StaircaseError when the staircase
/// is not monotone or does not describe a partition of m.
std::vector<int> nilpotent_segre(const ComplexMatrix& m, double scale,
                                 const Tolerances& tol);

/// Segre sequence from a nullity staircase (d_0 = 0 implied).
std::vector<int> segre_from_staircase(std::span<const int> staircase, int size);

/// A basis of Jordan chains for the nilpotent `m` with the given Segre
/// sequence. Column blocks follow the sequence; inside a block the columns are
/// (M^{k-1} v, ..., M v, v), so that C^{-1} M C is the upper shift.
ComplexMatrix jordan_chain_basis(const ComplexMatrix& m, std::span<const int> segre,
                                 const Tolerances& tol);

/// Upper-shift Jordan matrix with the given block sizes (all at eigenvalue 0).
ComplexMatrix nilpotent_jordan_matrix(std::span<const int> segre);

// ---------------------------------------------------------------------------
// Sylvester equations and spectral splitting

/// Solves A X - X B = C. Requires spectra separated by the clustering radius.
ComplexMatrix sylvester_solve(const ComplexMatrix& a, const ComplexMatrix& b,
                              const ComplexMatrix& c, const Tolerances& tol = {});

/// Triangular kernel of sylvester_solve: R and Q upper-triangular with
/// disjoint diagonals.
ComplexMatrix triangular_sylvester(const ComplexMatrix& r, const ComplexMatrix& q,
                                   const ComplexMatrix& c);

/// Planar region, described by a membership test and a distance to its
/// boundary.
class Region {
public:
  Region(std::string name, std::function<bool(Complex)> contains,
         std::function<double(Complex)> boundary_distance);

  static Region disk(Complex center, double radius);
  static Region half_plane_re_above(double x);   // Re z > x
  static Region half_plane_re_below(double x);   // Re z < x
  static Region union_of(std::vector<Region> parts);
  static Region complement(const Region& r);

  bool contains(Complex z) const { return contains_(z); }
  double boundary_distance(Complex z) const { return distance_(z); }
  const std::string& name() const { return name_; }

private:
  std::string name_;
  std::function<bool(Complex)> contains_;
  std::function<double(Complex)> distance_;
};

struct RieszSplit {
  ComplexMatrix similarity;              // S with S^{-1} T S block diagonal
  std::vector<int> block_dims;
  std::vector<ComplexMatrix> blocks;
  std::vector<int> region_of_block;      // index into the region list
  double condition = 1.0;                // cond(S)
};

/// Block diagonalisation of `t` along the given regions. Empty regions are
/// skipped; `region_of_block` maps each block back to its region.
RieszSplit riesz_split(const ComplexMatrix& t, std::span<const Region> regions,
                       const Tolerances& tol = {});

/// Same splitting driven by explicit labels, one per Schur diagonal entry
/// (label = block index, blocks emitted in increasing label order).
RieszSplit split_by_labels(const ComplexMatrix& t, SchurForm form,
                           std::vector<int> labels, const Tolerances& tol);

}  // namespace idemlab

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace idemlab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Numerical tolerances shared by every decision procedure and constructor.
///
/// `eig_cluster` and `residual` are relative: the clustering radius used on a
/// matrix T is `eig_cluster * max(||T||, 1)`. `rank_rel` is the relative
/// singular-value cut for rank decisions and `cond_cap` bounds the condition
/// number of any similarity a routine is allowed to apply.
struct Tolerances {
  double eig_cluster = 1e-6;
  double rank_rel = 1e-8;
  double residual = 1e-8;
  double cond_cap = 1e8;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Named presets: "default", "strict", "loose". Throws on unknown names.
Tolerances tolerance_preset(const std::string& name);

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

private:
  int iterations_;
};

/// Nullity staircase that does not describe a valid Jordan structure.
class StaircaseError : public Error {
public:
  StaircaseError(const std::string& what, std::vector<int> staircase)
      : Error(what), staircase_(std::move(staircase)) {}
  const std::vector<int>& staircase() const noexcept { return staircase_; }

private:
  std::vector<int> staircase_;
};

/// Two spectra that were required to be disjoint are not.
class SpectralOverlapError : public Error {
public:
  SpectralOverlapError(const std::string& what, Complex a, Complex b)
      : Error(what), nearest_(a, b) {}
  std::pair<Complex, Complex> nearest_pair() const noexcept { return nearest_; }

private:
  std::pair<Complex, Complex> nearest_;
};

class ConditionError : public Error {
public:
  ConditionError(const std::string& what, double cond)
      : Error(what), cond_(cond) {}
  double condition() const noexcept { return cond_; }

private:
  double cond_;
};

/// Eigenvalues that should come in (a, -a) pairs could not be matched.
class PairingError : public Error {
public:
  PairingError(const std::string& what, std::vector<Complex> unmatched)
      : Error(what), unmatched_(std::move(unmatched)) {}
  const std::vector<Complex>& unmatched() const noexcept { return unmatched_; }

private:
  std::vector<Complex> unmatched_;
};

/// Throws PreconditionError unless `m` is non-empty, square and finite.
void require_square_finite(const ComplexMatrix& m, const char* what);

}  // namespace idemlab

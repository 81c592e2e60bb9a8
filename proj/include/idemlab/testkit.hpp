#pragma once

// Brute-force oracles: class members built straight from the definitions,
// never through the deciders.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "idemlab/classify.hpp"

namespace idemlab::testkit {

struct SamplerConfig {
  int n = 4;
  std::uint64_t seed = 0;
  double cond_cap = 1e3;
  // Ranks are drawn uniformly from [rank_min, rank_max]; rank_max < 0 means n.
  int rank_min = 0;
  int rank_max = -1;
};

/// E = S diag(I_k, 0) S^{-1} with a Gaussian S resampled until
/// cond(S) <= cond_cap. Throws ConvergenceError when resampling is exhausted.
ComplexMatrix sample_idempotent(const SamplerConfig& cfg);
ComplexMatrix sample_idempotent(const SamplerConfig& cfg, std::mt19937_64& rng);

/// Orthogonal projection onto the span of a random Gaussian frame.
ComplexMatrix sample_projection(const SamplerConfig& cfg, std::mt19937_64& rng);

struct Sample {
  ComplexMatrix t;
  ComplexMatrix left;
  ComplexMatrix right;
};

Sample sample_coi(const SamplerConfig& cfg);  // t = [E, F]
Sample sample_doi(const SamplerConfig& cfg);  // t = E - F
Sample sample_cop(const SamplerConfig& cfg);  // t = [P, Q]
Sample sample_dop(const SamplerConfig& cfg);  // t = P - Q

/// Block sizes of J_m^2: {ceil(m/2), floor(m/2)} without zeros.
std::vector<int> squared_cell(int m);

/// Whether a nilpotent with the given Segre sequence has a square root,
/// decided by enumerating every partition of the dimension as the Segre
/// sequence of the root. Requires sum(segre) <= 12.
bool nilpotent_sqrt_oracle(std::span<const int> segre);

/// Monte-Carlo upper bound on the distance from t to the class (coi, doi,
/// cop or dop): the minimum over `budget` sampled members, each
/// refined by coordinate descent on the sampler parameters. Candidate b uses
/// the seed cfg.seed + b, so the bound is non-increasing in the budget.
double brute_distance(const ComplexMatrix& t, ClassTag tag, int budget, const SamplerConfig& cfg);

}  // namespace idemlab::testkit

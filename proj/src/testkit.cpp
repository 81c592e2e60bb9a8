#include "idemlab/testkit.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include <Eigen/QR>

namespace idemlab::testkit {

namespace {

ComplexMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix z(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) z(i, j) = Complex(g(rng), g(rng));
  }
  return z;
}

int draw_rank(const SamplerConfig& cfg, std::mt19937_64& rng) {
  const int hi = cfg.rank_max < 0 ? cfg.n : std::min(cfg.rank_max, cfg.n);
  const int lo = std::clamp(cfg.rank_min, 0, hi);
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

void check(const SamplerConfig& cfg) {
  if (cfg.n < 1) throw PreconditionError("sampler: n must be positive");
  if (!(cfg.cond_cap >= 1.0)) throw PreconditionError("sampler: cond_cap must be >= 1");
}

// Sampler parameters, kept so that brute_distance can refine them.
struct IdempotentParams {
  ComplexMatrix s;
  int rank = 0;

  ComplexMatrix value() const {
    const Index n = s.rows();
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    d.topLeftCorner(rank, rank).setIdentity();
    return s * d * s.inverse();
  }
};

struct ProjectionParams {
  ComplexMatrix frame;  // n x rank

  ComplexMatrix value() const {
    const Index n = frame.rows();
    if (frame.cols() == 0) return ComplexMatrix::Zero(n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(frame);
    const ComplexMatrix q =
        ComplexMatrix(qr.householderQ()).leftCols(frame.cols());
    return q * q.adjoint();
  }
};

IdempotentParams draw_idempotent(const SamplerConfig& cfg, std::mt19937_64& rng) {
  const int k = draw_rank(cfg, rng);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    ComplexMatrix s = gaussian(cfg.n, cfg.n, rng);
    if (cond2(s) <= cfg.cond_cap) return {std::move(s), k};
  }
  throw ConvergenceError("sample_idempotent: no similarity within cond_cap after 1000 draws",
                         1000);
}

ProjectionParams draw_projection(const SamplerConfig& cfg, std::mt19937_64& rng) {
  const int k = draw_rank(cfg, rng);
  return {gaussian(cfg.n, k, rng)};
}

}  // namespace

ComplexMatrix sample_idempotent(const SamplerConfig& cfg, std::mt19937_64& rng) {
  check(cfg);
  return draw_idempotent(cfg, rng).value();
}

ComplexMatrix sample_idempotent(const SamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  return sample_idempotent(cfg, rng);
}

ComplexMatrix sample_projection(const SamplerConfig& cfg, std::mt19937_64& rng) {
  check(cfg);
  return draw_projection(cfg, rng).value();
}

Sample sample_coi(const SamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Sample s;
  s.left = sample_idempotent(cfg, rng);
  s.right = sample_idempotent(cfg, rng);
  s.t = commutator(s.left, s.right);
  return s;
}

Sample sample_doi(const SamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Sample s;
  s.left = sample_idempotent(cfg, rng);
  s.right = sample_idempotent(cfg, rng);
  s.t = s.left - s.right;
  return s;
}

Sample sample_cop(const SamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Sample s;
  s.left = sample_projection(cfg, rng);
  s.right = sample_projection(cfg, rng);
  s.t = commutator(s.left, s.right);
  return s;
}

Sample sample_dop(const SamplerConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Sample s;
  s.left = sample_projection(cfg, rng);
  s.right = sample_projection(cfg, rng);
  s.t = s.left - s.right;
  return s;
}

std::vector<int> squared_cell(int m) {
  std::vector<int> out;
  if ((m + 1) / 2 > 0) out.push_back((m + 1) / 2);
  if (m / 2 > 0) out.push_back(m / 2);
  return out;
}

namespace {

/// Calls visit on every partition of `rest` into parts <= max_part.
void partitions(int rest, int max_part, std::vector<int>& current,
                const std::function<bool(const std::vector<int>&)>& visit, bool& done) {
  if (done) return;
  if (rest == 0) {
    done = visit(current);
    return;
  }
  for (int p = std::min(rest, max_part); p >= 1 && !done; --p) {
    current.push_back(p);
    partitions(rest - p, p, current, visit, done);
    current.pop_back();
  }
}

}  // namespace

bool nilpotent_sqrt_oracle(std::span<const int> segre) {
  std::vector<int> target;
  int total = 0;
  for (int s : segre) {
    if (s < 0) throw PreconditionError("nilpotent_sqrt_oracle: negative block size");
    if (s > 0) target.push_back(s);
    total += s;
  }
  if (total > 12) throw PreconditionError("nilpotent_sqrt_oracle: sum of block sizes exceeds 12");
  std::sort(target.rbegin(), target.rend());
  std::vector<int> current;
  bool found = false;
  partitions(total, total, current,
             [&](const std::vector<int>& source) {
               std::vector<int> squared;
               for (int m : source) {
                 for (int c : squared_cell(m)) squared.push_back(c);
               }
               std::sort(squared.rbegin(), squared.rend());
               return squared == target;
             },
             found);
  return found || total == 0;
}

// ---------------------------------------------------------------------------

namespace {

/// Parameters of one candidate member: two idempotents or two projections.
struct Candidate {
  std::vector<ComplexMatrix*> blocks;
  std::function<ComplexMatrix()> value;
};

double descend(const ComplexMatrix& t, Candidate& c, double start) {
  double best = start;
  double step = 0.25;
  // Sweep at a fixed step until a sweep stalls, then halve.
  for (int sweep = 0; sweep < 400 && step > 1e-4; ++sweep) {
    bool improved = false;
    for (ComplexMatrix* m : c.blocks) {
      for (Index i = 0; i < m->rows(); ++i) {
        for (Index j = 0; j < m->cols(); ++j) {
          for (Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
            const Complex old = (*m)(i, j);
            (*m)(i, j) = old + step * dir;
            const ComplexMatrix v = c.value();
            const double d = v.allFinite() ? opnorm(t - v) : best;
            if (d < best) {
              best = d;
              improved = true;
            } else {
              (*m)(i, j) = old;
            }
          }
        }
      }
    }
    if (!improved) step /= 2.0;
  }
  return best;
}

}  // namespace

double brute_distance(const ComplexMatrix& t, ClassTag tag, int budget,
                      const SamplerConfig& cfg_in) {
  if (tag != ClassTag::coi && tag != ClassTag::doi && tag != ClassTag::cop &&
      tag != ClassTag::dop) {
    throw PreconditionError("brute_distance: class must be coi, doi, cop or dop");
  }
  if (budget < 1) throw PreconditionError("brute_distance: budget must be positive");
  require_square_finite(t, "brute_distance");
  SamplerConfig cfg = cfg_in;
  cfg.n = static_cast<int>(t.rows());
  check(cfg);

  const bool projections = (tag == ClassTag::cop || tag == ClassTag::dop);
  const bool commutes = (tag == ClassTag::coi || tag == ClassTag::cop);
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < budget; ++b) {
    // Same draw order as the samplers, so candidate 0 reproduces them.
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(b));
    if (projections) {
      ProjectionParams p = draw_projection(cfg, rng);
      ProjectionParams q = draw_projection(cfg, rng);
      Candidate c{{&p.frame, &q.frame}, [&] {
                    const ComplexMatrix a = p.value();
                    const ComplexMatrix d = q.value();
                    return commutes ? commutator(a, d) : ComplexMatrix(a - d);
                  }};
      best = std::min(best, descend(t, c, opnorm(t - c.value())));
    } else {
      IdempotentParams e = draw_idempotent(cfg, rng);
      IdempotentParams f = draw_idempotent(cfg, rng);
      Candidate c{{&e.s, &f.s}, [&] {
                    const ComplexMatrix a = e.value();
                    const ComplexMatrix d = f.value();
                    return commutes ? commutator(a, d) : ComplexMatrix(a - d);
                  }};
      best = std::min(best, descend(t, c, opnorm(t - c.value())));
    }
  }
  return best;
}

}  // namespace idemlab::testkit

#include <random>

#include "doctest.h"
#include "idemlab/classify.hpp"
#include "idemlab/testkit.hpp"
#include "oracles.hpp"

using namespace idemlab;
using oracle::I;

namespace {

ComplexMatrix W() {
  return oracle::block_diag(oracle::diag({2.0, 2.0}), oracle::from_rows({{-2.0, 1.0}, {0.0, -2.0}}));
}

ComplexMatrix T0() {
  ComplexMatrix a0 = oracle::from_rows({{0.5 * I, 1.0}, {0.0, 0.5 * I}});
  return oracle::block_diag(a0, -a0);
}

// Jordan cells of size <= 2 at points that exercise every branch of the
// deciders, conjugated by a random similarity.
ComplexMatrix structured(std::mt19937_64& rng, double cap) {
  static const std::vector<Complex> points{0.0, 1.0, -1.0, 0.5 * I, -0.5 * I, 2.0, -2.0, 0.3};
  std::vector<std::pair<Complex, int>> cells;
  const int count = 1 + static_cast<int>(rng() % 5);
  for (int k = 0; k < count; ++k) {
    cells.push_back({points[rng() % points.size()], 1 + static_cast<int>(rng() % 2)});
  }
  ComplexMatrix j = oracle::jordan(cells);
  return oracle::similar(oracle::random_invertible(j.rows(), cap, rng), j);
}

// A mix of generic, balanced, structured and sampled inputs.
ComplexMatrix mixed(std::mt19937_64& rng, int k) {
  testkit::SamplerConfig cfg;
  cfg.n = 2 + static_cast<int>(rng() % 6);
  cfg.seed = rng();
  switch (k % 6) {
    case 0: return oracle::gaussian(cfg.n, cfg.n, rng);
    case 1: return oracle::random_balanced(cfg.n, 1e2, rng);
    case 2: return structured(rng, 1e2);
    case 3: return testkit::sample_coi(cfg).t;
    case 4: return testkit::sample_doi(cfg).t;
    default: return testkit::sample_dop(cfg).t;
  }
}

}  // namespace

TEST_CASE("class tag names round trip") {
  for (ClassTag t : all_class_tags()) CHECK(class_tag_from_string(to_string(t)) == t);
  CHECK_THROWS_AS(class_tag_from_string("nonsense"), std::invalid_argument);
}

TEST_CASE("is_balanced examples") {
  CHECK(is_balanced(oracle::diag({1.0, -1.0})).verdict);
  CHECK(is_balanced(oracle::diag({2.0, 2.0, -2.0, -2.0})).verdict);
  CHECK(is_balanced(W()).verdict);
  auto r = is_balanced(oracle::diag({1.0, 1.0, -1.0}));
  CHECK_FALSE(r.verdict);
  bool found = false;
  for (const auto& row : r.evidence.pairing) {
    if (std::abs(row.alpha - 1.0) < 1e-9) {
      CHECK(row.mu_alpha == 2);
      CHECK(row.mu_neg == 1);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("verdict is the conjunction of the conditions") {
  std::mt19937_64 rng(30);
  for (int k = 0; k < 60; ++k) {
    ComplexMatrix t = mixed(rng, k);
    for (ClassTag tag : all_class_tags()) {
      auto r = classify(t, tag);
      bool all = true;
      for (const auto& c : r.evidence.conditions) all = all && c.passed;
      CHECK(r.verdict == all);
      CHECK(r.class_tag == tag);
    }
  }
}

TEST_CASE("charpoly_parity examples") {
  CHECK(charpoly_parity(oracle::diag({1.0, -1.0})));
  CHECK_FALSE(charpoly_parity(oracle::diag({1.0, 1.0, -1.0})));
  CHECK(charpoly_parity(oracle::jordan({{0.0, 2}})));
  CHECK_THROWS_AS(charpoly_parity(ComplexMatrix::Identity(65, 65)), PreconditionError);
}

TEST_CASE("charpoly coefficients match the eigenvalue expansion") {
  auto p = charpoly_coefficients(oracle::diag({1.0, 1.0, -1.0}));
  // z^3 - z^2 - z + 1
  REQUIRE(p.size() == 4);
  CHECK(std::abs(p[0] - 1.0) < 1e-12);
  CHECK(std::abs(p[1] + 1.0) < 1e-12);
  CHECK(std::abs(p[2] + 1.0) < 1e-12);
  CHECK(std::abs(p[3] - 1.0) < 1e-12);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + trial % 8;
    ComplexMatrix t = oracle::gaussian(n, n, rng) / std::sqrt(static_cast<double>(n));
    auto a = charpoly_coefficients(t);
    auto b = oracle::charpoly_from_eigenvalues(t);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-9);
  }
}

TEST_CASE("is_neg_similar examples") {
  CHECK(is_neg_similar(oracle::jordan({{0.0, 2}})).verdict);
  CHECK_FALSE(is_neg_similar(W()).verdict);
  CHECK(is_neg_similar(T0()).verdict);
}

TEST_CASE("is_coi examples") {
  CHECK(is_coi(oracle::jordan({{0.0, 2}})).verdict);
  auto r = is_coi(T0());
  CHECK_FALSE(r.verdict);
  const ConditionCheck* c = r.condition("sqrt(T1^2+I/4)");
  REQUIRE(c != nullptr);
  CHECK_FALSE(c->passed);
  CHECK(c->detail.find("[2]") != std::string::npos);
  CHECK(is_coi(oracle::diag({0.5 * I, -0.5 * I})).verdict);
}

TEST_CASE("nilpotent square-root criterion") {
  CHECK_FALSE(nilpotent_has_square_root(std::vector<int>{2}));
  CHECK(nilpotent_has_square_root(std::vector<int>{1, 1}));
  CHECK(nilpotent_has_square_root(std::vector<int>{2, 1}));
  CHECK(nilpotent_has_square_root(std::vector<int>{1}));
  CHECK(nilpotent_has_square_root(std::vector<int>{}));
  CHECK_FALSE(nilpotent_has_square_root(std::vector<int>{3, 1}));
  CHECK(nilpotent_has_square_root(std::vector<int>{3, 2, 1}));
}

TEST_CASE("is_doi examples") {
  CHECK(is_doi(oracle::from_rows({{0.0, 3.0}, {3.0, 0.0}})).verdict);
  auto w = is_doi(W());
  CHECK_FALSE(w.verdict);
  CHECK(is_doi(oracle::diag({1.0, 1.0, -1.0})).verdict);
  // Segre(1) = [2], Segre(-1) = [] differs by 2.
  CHECK_FALSE(is_doi(oracle::jordan({{1.0, 2}})).verdict);
  CHECK(is_doi(oracle::jordan({{1.0, 2}, {-1.0, 1}})).verdict);
}

TEST_CASE("in_clos_coi examples") {
  CHECK(in_clos_coi(W()).verdict);
  CHECK_FALSE(in_clos_coi(oracle::diag({1.0, 2.0})).verdict);
  testkit::SamplerConfig cfg;
  cfg.n = 5;
  cfg.seed = 7;
  CHECK(in_clos_coi(testkit::sample_coi(cfg).t).verdict);
}

TEST_CASE("in_clos_doi examples") {
  auto z = in_clos_doi(oracle::jordan({{1.0, 2}}));
  CHECK_FALSE(z.verdict);
  CHECK(z.condition("nul(Z-I)>=r") != nullptr);
  CHECK(in_clos_doi(oracle::diag({1.0, 1.0})).verdict);
  CHECK(in_clos_doi(W()).verdict);
  // Negative trace is handled by the sign flip.
  CHECK(in_clos_doi(oracle::diag({-1.0, -1.0})).verdict);
  CHECK_FALSE(in_clos_doi(oracle::jordan({{-1.0, 2}})).verdict);
}

TEST_CASE("is_cop examples") {
  CHECK(is_cop(oracle::from_rows({{0.0, 0.5}, {-0.5, 0.0}})).verdict);
  auto big = is_cop(oracle::from_rows({{0.0, 0.6}, {-0.6, 0.0}}));
  CHECK_FALSE(big.verdict);
  CHECK_FALSE(big.condition("(b) ||T||<=1/2")->passed);
  CHECK(is_cop(ComplexMatrix::Zero(3, 3)).verdict);
  CHECK_FALSE(is_cop(oracle::diag({0.1 * I, 0.2 * I})).verdict);
  CHECK(in_clos_cop(oracle::from_rows({{0.0, 0.5}, {-0.5, 0.0}})).verdict);
}

TEST_CASE("is_dop examples") {
  CHECK(is_dop(oracle::diag({1.0, -1.0})).verdict);
  CHECK_FALSE(is_dop(oracle::diag({1.0, 0.3})).verdict);
  CHECK(is_dop(oracle::diag({1.0, 1.0, 0.0, -0.6, 0.6})).verdict);
  CHECK_FALSE(is_dop(oracle::diag({1.5, -1.5})).verdict);
  CHECK_FALSE(is_dop(oracle::from_rows({{0.0, 0.5}, {-0.5, 0.0}})).verdict);
  CHECK(in_clos_dop(oracle::diag({0.6, -0.6})).verdict);
}

TEST_CASE("all classes accept the zero matrix") {
  for (ClassTag tag : all_class_tags()) CHECK(classify(ComplexMatrix::Zero(3, 3), tag).verdict);
}

TEST_CASE("property: inclusion chain and closure consistency") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 300; ++k) {
    ComplexMatrix t = mixed(rng, k);
    const bool coi = is_coi(t).verdict;
    const bool neg = is_neg_similar(t).verdict;
    const bool bal = is_balanced(t).verdict;
    const bool doi = is_doi(t).verdict;
    if (coi) CHECK(neg);
    if (neg) CHECK(bal);
    if (coi) CHECK(doi);
    if (coi) CHECK(in_clos_coi(t).verdict);
    if (doi) CHECK(in_clos_doi(t).verdict);
    if (is_cop(t).verdict) CHECK(coi);
    if (is_dop(t).verdict) CHECK(doi);
  }
}

TEST_CASE("property: similarity invariance") {
  std::mt19937_64 rng(33);
  const std::vector<ClassTag> similarity_tags{ClassTag::balanced, ClassTag::neg_similar, ClassTag::coi,
                                              ClassTag::doi, ClassTag::clos_coi, ClassTag::clos_doi};
  for (int k = 0; k < 120; ++k) {
    ComplexMatrix t = k % 2 == 0 ? structured(rng, 10.0) : mixed(rng, k);
    ComplexMatrix s = oracle::random_invertible(t.rows(), 1e3, rng);
    ComplexMatrix st = oracle::similar(s, t);
    for (ClassTag tag : similarity_tags) {
      CHECK_MESSAGE(classify(t, tag).verdict == classify(st, tag).verdict, to_string(tag), " k=", k);
    }
    ComplexMatrix u = oracle::random_unitary(t.rows(), rng);
    ComplexMatrix ut = u * t * u.adjoint();
    for (ClassTag tag : {ClassTag::cop, ClassTag::dop}) {
      CHECK(classify(t, tag).verdict == classify(ut, tag).verdict);
    }
  }
}

TEST_CASE("property: adjoint and negation symmetry") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 150; ++k) {
    ComplexMatrix t = k % 2 == 0 ? structured(rng, 10.0) : mixed(rng, k);
    const bool coi = is_coi(t).verdict;
    CHECK(coi == is_coi(t.adjoint()).verdict);
    CHECK(coi == is_coi(-t).verdict);
    CHECK(is_doi(t).verdict == is_doi(-t).verdict);
  }
  CHECK_FALSE(is_coi(T0().adjoint()).verdict);
  CHECK_FALSE(is_coi(-T0()).verdict);
}

TEST_CASE("property: charpoly parity matches balance") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 200; ++k) {
    const Index n = 1 + k % 12;
    ComplexMatrix t = k % 2 == 0 ? oracle::random_balanced(n, 1e2, rng) : oracle::gaussian(n, n, rng);
    auto r = in_clos_coi(t);
    CHECK(is_balanced(t).verdict == charpoly_parity(t));
    CHECK(r.evidence.warnings.empty());
  }
}

TEST_CASE("property: trace-zero closure of differences equals balance") {
  std::mt19937_64 rng(36);
  for (int k = 0; k < 100; ++k) {
    ComplexMatrix t = k % 3 == 0 ? oracle::random_balanced(2 + k % 7, 1e2, rng)
                                 : (k % 3 == 1 ? oracle::gaussian(2 + k % 7, 2 + k % 7, rng)
                                               : structured(rng, 10.0));
    const Index n = t.rows();
    t -= (t.trace() / static_cast<double>(n)) * ComplexMatrix::Identity(n, n);
    CHECK(in_clos_doi(t).verdict == is_balanced(t).verdict);
  }
}

TEST_CASE("property: sampled members are accepted") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    testkit::SamplerConfig cfg;
    cfg.n = 2 + static_cast<int>(seed % 7);
    cfg.seed = seed;
    CHECK(is_coi(testkit::sample_coi(cfg).t).verdict);
    CHECK(is_doi(testkit::sample_doi(cfg).t).verdict);
    CHECK(is_cop(testkit::sample_cop(cfg).t).verdict);
    CHECK(is_dop(testkit::sample_dop(cfg).t).verdict);
  }
}

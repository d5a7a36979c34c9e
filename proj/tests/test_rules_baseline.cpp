#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banditvote/rules_baseline.hpp"
#include "banditvote/simulate.hpp"

#include <cmath>

using namespace banditvote;

TEST_CASE("plurality counts first-place votes") {
  const ScoreVector s = plurality({0, 1, 1, 2}, 3);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);
  CHECK(s[2] == 1.0);
  CHECK(plurality({}, 2).isZero());
  CHECK_THROWS_AS(plurality({3}, 3), std::invalid_argument);
  CHECK_THROWS_AS(plurality({-1}, 3), std::invalid_argument);
}

TEST_CASE("borda awards one point per alternative ranked below") {
  const ScoreVector s = borda({{1, 0, 2}}, 3);
  CHECK(s[0] == 1.0);
  CHECK(s[1] == 2.0);
  CHECK(s[2] == 0.0);
  // Opposed rankings cancel into a constant vector.
  const ScoreVector t = borda({{0, 1, 2}, {2, 1, 0}}, 3);
  CHECK(t[0] == 2.0);
  CHECK(t[1] == 2.0);
  CHECK(t[2] == 2.0);
}

TEST_CASE("borda rejects malformed rankings") {
  CHECK_THROWS_AS(borda({{0, 0, 1}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(borda({{0, 1}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(borda({{0, 1, 3}}, 3), std::invalid_argument);
}

TEST_CASE("voter_weight computes the six modifications") {
  IVec row(2);
  row << 1, 4;
  CHECK(voter_weight(row, CountModification::kArithmeticMean) ==
        doctest::Approx(2.5));
  CHECK(voter_weight(row, CountModification::kHarmonicMean) ==
        doctest::Approx(1.6));
  CHECK(voter_weight(row, CountModification::kSqrtArithmetic) ==
        doctest::Approx(std::sqrt(2.5)));
  CHECK(voter_weight(row, CountModification::kSqrtHarmonic) ==
        doctest::Approx(std::sqrt(1.6)));
  CHECK(voter_weight(row, CountModification::kLogArithmetic) ==
        doctest::Approx(std::log(3.5)));
  CHECK(voter_weight(row, CountModification::kLogHarmonic) ==
        doctest::Approx(std::log(2.6)));
  IVec bad(2);
  bad << 0, 4;
  CHECK_THROWS_AS(voter_weight(bad, CountModification::kArithmeticMean),
                  std::invalid_argument);
}

TEST_CASE("modification names round-trip") {
  for (CountModification mod : kAllModifications)
    CHECK(modification_from_string(to_string(mod)) == mod);
  CHECK(to_string(CountModification::kSqrtHarmonic) == "sqrt-harmonic");
  CHECK_THROWS_AS(modification_from_string("median"), std::invalid_argument);
}

TEST_CASE("experience weighting scales each voter by their weight") {
  Mat est(2, 3);
  est << 3.0, 2.0, 1.0,  // ranking 0 > 1 > 2
      1.0, 3.0, 2.0;     // ranking 1 > 2 > 0
  const VoteSet votes = derive_votes(est);
  CountMatrix counts(2, 3);
  counts << 1, 4, 4,   // arithmetic mean 3
      16, 16, 16;      // arithmetic mean 16
  const ScoreVector p = experience_weighted(
      BaseRule::kPlurality, votes, counts, CountModification::kArithmeticMean);
  CHECK(p[0] == doctest::Approx(3.0));
  CHECK(p[1] == doctest::Approx(16.0));
  CHECK(p[2] == 0.0);
  const ScoreVector b = experience_weighted(
      BaseRule::kBorda, votes, counts, CountModification::kArithmeticMean);
  CHECK(b[0] == doctest::Approx(3.0 * 2 + 16.0 * 0));
  CHECK(b[1] == doctest::Approx(3.0 * 1 + 16.0 * 2));
  CHECK(b[2] == doctest::Approx(3.0 * 0 + 16.0 * 1));
}

TEST_CASE("equal counts reduce every modification to the base rule ranking") {
  SeededRng rng(5, 0);
  SimConfig cfg;
  cfg.n_voters = 9;
  cfg.n_alternatives = 4;
  const Instance inst = sample_instance(cfg, rng);
  const CountMatrix flat = CountMatrix::Constant(9, 4, 7);
  const ScoreVector base = borda(inst.votes.rankings, 4);
  for (CountModification mod : kAllModifications) {
    const ScoreVector w =
        experience_weighted(BaseRule::kBorda, inst.votes, flat, mod);
    // Same scores up to the common factor voter_weight(7,...).
    const double scale = w.sum() / base.sum();
    CHECK((w - scale * base).cwiseAbs().maxCoeff() < 1e-12 * w.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("experience weighting matches a direct reimplementation") {
  SeededRng rng(29, 0);
  SimConfig cfg;
  cfg.n_voters = 6;
  cfg.n_alternatives = 5;
  const Instance inst = sample_instance(cfg, rng);
  const ScoreVector got =
      experience_weighted(BaseRule::kPlurality, inst.votes, inst.counts,
                          CountModification::kSqrtHarmonic);
  ScoreVector want = ScoreVector::Zero(5);
  for (int i = 0; i < 6; ++i) {
    double inv_sum = 0.0;
    for (int j = 0; j < 5; ++j) inv_sum += 1.0 / inst.counts(i, j);
    want[inst.votes.top_choices[static_cast<std::size_t>(i)]] +=
        std::sqrt(5.0 / inv_sum);
  }
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

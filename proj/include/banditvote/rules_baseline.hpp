#pragma once

#include "banditvote/types.hpp"

#include <array>
#include <string>

namespace banditvote {

enum class CountModification {
  kArithmeticMean,
  kHarmonicMean,
  kSqrtArithmetic,
  kSqrtHarmonic,
  kLogArithmetic,
  kLogHarmonic,
};

inline constexpr std::array<CountModification, 6> kAllModifications = {
    CountModification::kArithmeticMean, CountModification::kHarmonicMean,
    CountModification::kSqrtArithmetic, CountModification::kSqrtHarmonic,
    CountModification::kLogArithmetic,  CountModification::kLogHarmonic,
};

std::string to_string(CountModification mod);
CountModification modification_from_string(const std::string& name);

enum class BaseRule { kPlurality, kBorda };

// scores[j] = number of voters whose top choice is j.
ScoreVector plurality(const std::vector<int>& top_choices, int n);

// Rank position r (0 = top) contributes n-1-r points.
ScoreVector borda(const std::vector<std::vector<int>>& rankings, int n);

// Arithmetic or harmonic mean of a voter's counts, optionally passed through
// sqrt or log(1 + mean).
double voter_weight(const IVec& counts_row, CountModification mod);

// Base rule with each voter's per-alternative scores scaled by voter_weight.
ScoreVector experience_weighted(BaseRule base, const VoteSet& votes,
                                const CountMatrix& counts,
                                CountModification mod);

}  // namespace banditvote

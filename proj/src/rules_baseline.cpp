#include "banditvote/rules_baseline.hpp"

#include <cmath>

namespace banditvote {
namespace {

void check_permutation(const std::vector<int>& ranking, int n) {
  require(static_cast<int>(ranking.size()) == n, "ranking has wrong length");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int j : ranking) {
    require(j >= 0 && j < n, "ranking index out of range");
    require(!seen[static_cast<std::size_t>(j)], "ranking repeats an index");
    seen[static_cast<std::size_t>(j)] = 1;
  }
}

}  // namespace

std::string to_string(CountModification mod) {
  switch (mod) {
    case CountModification::kArithmeticMean: return "arithmetic-mean";
    case CountModification::kHarmonicMean: return "harmonic-mean";
    case CountModification::kSqrtArithmetic: return "sqrt-arithmetic";
    case CountModification::kSqrtHarmonic: return "sqrt-harmonic";
    case CountModification::kLogArithmetic: return "log-arithmetic";
    case CountModification::kLogHarmonic: return "log-harmonic";
  }
  throw std::invalid_argument("unknown count modification");
}

CountModification modification_from_string(const std::string& name) {
  for (CountModification mod : kAllModifications)
    if (to_string(mod) == name) return mod;
  throw std::invalid_argument("unknown count modification: " + name);
}

ScoreVector plurality(const std::vector<int>& top_choices, int n) {
  require(n >= 1, "need at least one alternative");
  ScoreVector scores = ScoreVector::Zero(n);
  for (int top : top_choices) {
    require(top >= 0 && top < n, "top choice out of range");
    scores[top] += 1.0;
  }
  return scores;
}

ScoreVector borda(const std::vector<std::vector<int>>& rankings, int n) {
  require(n >= 1, "need at least one alternative");
  ScoreVector scores = ScoreVector::Zero(n);
  for (const auto& ranking : rankings) {
    check_permutation(ranking, n);
    for (int r = 0; r < n; ++r)
      scores[ranking[static_cast<std::size_t>(r)]] += n - 1 - r;
  }
  return scores;
}

double voter_weight(const IVec& counts_row, CountModification mod) {
  require(counts_row.size() > 0, "empty count row");
  require(counts_row.minCoeff() >= 1, "counts must be >= 1");
  const int n = static_cast<int>(counts_row.size());
  double mean;
  switch (mod) {
    case CountModification::kArithmeticMean:
    case CountModification::kSqrtArithmetic:
    case CountModification::kLogArithmetic:
      mean = counts_row.cast<double>().mean();
      break;
    default:
      mean = n / counts_row.cast<double>().cwiseInverse().sum();
      break;
  }
  switch (mod) {
    case CountModification::kArithmeticMean:
    case CountModification::kHarmonicMean:
      return mean;
    case CountModification::kSqrtArithmetic:
    case CountModification::kSqrtHarmonic:
      return std::sqrt(mean);
    case CountModification::kLogArithmetic:
    case CountModification::kLogHarmonic:
      return std::log1p(mean);
  }
  throw std::invalid_argument("unknown count modification");
}

ScoreVector experience_weighted(BaseRule base, const VoteSet& votes,
                                const CountMatrix& counts,
                                CountModification mod) {
  const int m = votes.n_voters();
  require(static_cast<int>(counts.rows()) == m, "count shape mismatch");
  const int n = static_cast<int>(counts.cols());
  ScoreVector scores = ScoreVector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const double w = voter_weight(counts.row(i).transpose(), mod);
    if (base == BaseRule::kPlurality) {
      const int top = votes.top_choices[static_cast<std::size_t>(i)];
      require(top >= 0 && top < n, "top choice out of range");
      scores[top] += w;
    } else {
      const auto& ranking = votes.rankings[static_cast<std::size_t>(i)];
      check_permutation(ranking, n);
      for (int r = 0; r < n; ++r)
        scores[ranking[static_cast<std::size_t>(r)]] += w * (n - 1 - r);
    }
  }
  return scores;
}

}  // namespace banditvote

#include "banditvote/rng.hpp"

#include <vector>

namespace banditvote {

int argmax_random_tiebreak(const Vec& scores, SeededRng& rng) {
  require(scores.size() > 0, "argmax of empty score vector");
  const double best = scores.maxCoeff();
  std::vector<int> ties;
  for (int j = 0; j < scores.size(); ++j) {
    if (scores[j] >= best - 1e-12) ties.push_back(j);
  }
  if (ties.size() == 1) return ties.front();
  return ties[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<int>(ties.size()) - 1))];
}

}  // namespace banditvote

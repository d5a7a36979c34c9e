#pragma once

#include "banditvote/rng.hpp"
#include "banditvote/types.hpp"

namespace banditvote {

struct SimConfig {
  int n_alternatives = 10;
  int n_voters = 30;
  int count_min = 1;
  int count_max = 50;
  double obs_variance = 1000.0;
  GaussianParams mu_prior{0.0, 1.0};
};

// Best-to-worst order of x, ties broken toward the lower index.
std::vector<int> derive_ranking(const Vec& x);

// Rank positions: position[j] = 0 for the winner.
std::vector<int> rank_positions(const std::vector<int>& ranking);

// Pairwise indicators: entry pair_index(j, k) is 1 iff x[j] <= x[k], meaning
// k is preferred to j.
Eigen::Matrix<std::uint8_t, 1, Eigen::Dynamic> derive_pairwise(const Vec& x);

// Rebuild all three vote formats from per-voter cardinal estimates.
VoteSet derive_votes(const CardinalEstimates& estimates);

// Draw one election: arm qualities from the prior, counts uniform on
// [count_min, count_max], estimates x_ij ~ N(mu_j, sigma2_j / c_ij).
Instance sample_instance(const SimConfig& cfg, SeededRng& rng);

// Multiply a count by (1 + u), rounding half away from zero and clamping to
// at least one observation.
int perturbed_count(int c, double u);

CountMatrix perturb_counts_percentage(const CountMatrix& counts,
                                      SeededRng& rng, double max_pct = 0.5);

// Overwrite round(frac * m * n) distinct cells with uniform draws from
// [resample_min, resample_max].
CountMatrix perturb_counts_replacement(const CountMatrix& counts,
                                       SeededRng& rng, double frac = 1.0 / 3.0,
                                       int resample_min = 1,
                                       int resample_max = 50);

}  // namespace banditvote

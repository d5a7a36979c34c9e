#pragma once

#include "banditvote/rng.hpp"
#include "banditvote/types.hpp"

namespace banditvote {

// Two-arm ordinal query: delta is the hypothesized mu_2 - mu_1, s holds the
// per-voter standard deviations of x_i2 - x_i1, and y_i = 1 means voter i
// prefers arm 1.
struct Case3Query {
  double delta = 0.0;
  Vec s;
  std::vector<std::uint8_t> y;
};

enum class Case3Decision { kArm1, kArm2, kTie };

// Pooled sample mean: V_j = sum_i c_ij x_ij / sum_i c_ij.
ScoreVector case1_oracle(const CardinalEstimates& estimates,
                         const CountMatrix& counts);

// Inverse-variance weight for a reported difference x_i2 - x_i1.
double case2_weight(int c1, int c2, const SigmaRatio& sigma2);

// Weighted mean of the reported differences.
double case2_estimate(const Vec& diffs, const CountMatrix& counts,
                      const SigmaRatio& sigma2);

// w = 1/s_i.
double case3_weight(int c1, int c2, const SigmaRatio& sigma2);

// G = sum_i (1 - 2 y_i) w_i; positive G elects arm 2.
Case3Decision case3_decide(const std::vector<std::uint8_t>& y, const Vec& w,
                           double* g_out = nullptr);

double case3_loglik(const Case3Query& q);

// Analytic dF/d(delta), each voter contributing f_i+ or -f_i-.
double case3_loglik_derivative(const Case3Query& q);

// The two functions whose positivity establishes concavity of the Case 3
// log likelihood, as functions of x = delta / s_i.
double case3_concavity_witness_plus(double x);
double case3_concavity_witness_minus(double x);

// Symmetric pairwise weight for alternatives j, k of one voter.
double pair_weight(int c_j, int c_k, double sigma2_j, double sigma2_k);

// Naive-independence pairwise rule; normalized divides each score by the
// total absolute weight available to that alternative.
ScoreVector case4_scores(const VoteSet& votes, const CountMatrix& counts,
                         const SigmaRatio& sigma2, bool normalized);

// Pairwise rule restricted to pairs involving each voter's top choice.
ScoreVector case5_lower_bound(const std::vector<int>& tops,
                              const CountMatrix& counts,
                              const SigmaRatio& sigma2);

// V_j = sum over voters topping j of sqrt(c_ij); assumes equal variances.
ScoreVector case5_zero_approx(const std::vector<int>& tops,
                              const CountMatrix& counts);

// REINFORCE-style estimate of the likelihood gradient at V = 0.
ScoreVector case5_monte_carlo(const std::vector<int>& tops,
                              const CountMatrix& counts,
                              const SigmaRatio& sigma2, int n_samples,
                              SeededRng& rng);

}  // namespace banditvote

#include "banditvote/rules_mle.hpp"

#include "banditvote/special.hpp"

#include <algorithm>
#include <cmath>

namespace banditvote {
namespace {

void check_sigma(const SigmaRatio& sigma2, int n) {
  require(static_cast<int>(sigma2.size()) == n, "sigma2 length mismatch");
  require(sigma2.minCoeff() > 0.0, "sigma2 must be strictly positive");
}

// phi(t) / Phi(t), computed as 2 / (sqrt(2 pi) erfcx(-t / sqrt(2))) so the
// ratio survives far into the left tail.
double hazard(double t) {
  return 2.0 * kInvSqrt2Pi / erfcx(-t * kInvSqrt2);
}

}  // namespace

ScoreVector case1_oracle(const CardinalEstimates& estimates,
                         const CountMatrix& counts) {
  require(estimates.rows() == counts.rows() &&
              estimates.cols() == counts.cols(),
          "estimate/count shape mismatch");
  require(counts.minCoeff() >= 1, "counts must be >= 1");
  const Mat c = counts.cast<double>();
  const Vec weighted = (c.array() * estimates.array()).colwise().sum();
  const Vec totals = c.colwise().sum();
  return weighted.array() / totals.array();
}

double case2_weight(int c1, int c2, const SigmaRatio& sigma2) {
  require(c1 >= 1 && c2 >= 1, "counts must be >= 1");
  check_sigma(sigma2, 2);
  return static_cast<double>(c2) * c1 / (sigma2[1] * c1 + sigma2[0] * c2);
}

double case2_estimate(const Vec& diffs, const CountMatrix& counts,
                      const SigmaRatio& sigma2) {
  require(counts.cols() == 2, "case 2 needs exactly two arms");
  require(diffs.size() == counts.rows(), "diff/count shape mismatch");
  double num = 0.0, den = 0.0;
  for (int i = 0; i < diffs.size(); ++i) {
    const double w = case2_weight(counts(i, 0), counts(i, 1), sigma2);
    num += w * diffs[i];
    den += w;
  }
  require(den > 0.0, "no voters");
  return num / den;
}

double case3_weight(int c1, int c2, const SigmaRatio& sigma2) {
  return std::sqrt(case2_weight(c1, c2, sigma2));
}

Case3Decision case3_decide(const std::vector<std::uint8_t>& y, const Vec& w,
                           double* g_out) {
  require(static_cast<int>(y.size()) == w.size(), "vote/weight length mismatch");
  double g = 0.0;
  for (int i = 0; i < w.size(); ++i)
    g += (1.0 - 2.0 * y[static_cast<std::size_t>(i)]) * w[i];
  if (g_out) *g_out = g;
  if (std::fabs(g) <= 1e-12) return Case3Decision::kTie;
  return g > 0.0 ? Case3Decision::kArm2 : Case3Decision::kArm1;
}

double case3_loglik(const Case3Query& q) {
  require(q.s.size() == static_cast<int>(q.y.size()), "query length mismatch");
  require(q.s.size() == 0 || q.s.minCoeff() > 0.0, "s must be positive");
  double total = 0.0;
  for (int i = 0; i < q.s.size(); ++i) {
    const double t = q.delta / q.s[i];
    total += q.y[static_cast<std::size_t>(i)] ? log_gaussian_cdf(-t)
                                              : log_gaussian_cdf(t);
  }
  return total;
}

double case3_loglik_derivative(const Case3Query& q) {
  require(q.s.size() == static_cast<int>(q.y.size()), "query length mismatch");
  require(q.s.size() == 0 || q.s.minCoeff() > 0.0, "s must be positive");
  // Per voter, F' picks up f_i+ = g_i/h_i+ when y_i = 1 and -f_i- = -g_i/h_i-
  // when y_i = 0. Both collapse to hazard ratios of t = delta/s_i.
  double total = 0.0;
  for (int i = 0; i < q.s.size(); ++i) {
    const double t = q.delta / q.s[i];
    if (q.y[static_cast<std::size_t>(i)])
      total -= hazard(-t) / q.s[i];
    else
      total += hazard(t) / q.s[i];
  }
  return total;
}

// Written with erfc instead of exp * erfcx so neither factor can hit
// 0 * inf at large |x|; the two forms agree wherever both are finite.
double case3_concavity_witness_plus(double x) {
  return 2.0 * kInvSqrt2Pi * std::exp(-0.5 * x * x) - x * erfc(x * kInvSqrt2);
}

double case3_concavity_witness_minus(double x) {
  return 2.0 * kInvSqrt2Pi * std::exp(-0.5 * x * x) + x * erfc(-x * kInvSqrt2);
}

double pair_weight(int c_j, int c_k, double sigma2_j, double sigma2_k) {
  require(c_j >= 1 && c_k >= 1, "counts must be >= 1");
  require(sigma2_j > 0.0 && sigma2_k > 0.0, "sigma2 must be positive");
  return std::sqrt(static_cast<double>(c_j) * c_k /
                   (sigma2_k * c_j + sigma2_j * c_k));
}

ScoreVector case4_scores(const VoteSet& votes, const CountMatrix& counts,
                         const SigmaRatio& sigma2, bool normalized) {
  const int m = static_cast<int>(counts.rows());
  const int n = static_cast<int>(counts.cols());
  require(votes.n_voters() == m, "vote/count shape mismatch");
  require(votes.pairwise.cols() == n_pairs(n), "pairwise width mismatch");
  check_sigma(sigma2, n);
  ScoreVector scores = ScoreVector::Zero(n);
  Vec denom = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const double w =
            pair_weight(counts(i, j), counts(i, k), sigma2[j], sigma2[k]);
        if (votes.pairwise(i, pair_index(j, k, n))) {
          scores[k] += w;
          scores[j] -= w;
        } else {
          scores[j] += w;
          scores[k] -= w;
        }
        denom[j] += w;
        denom[k] += w;
      }
    }
  }
  if (normalized) {
    for (int j = 0; j < n; ++j)
      if (denom[j] > 0.0) scores[j] /= denom[j];
  }
  return scores;
}

ScoreVector case5_lower_bound(const std::vector<int>& tops,
                              const CountMatrix& counts,
                              const SigmaRatio& sigma2) {
  const int m = static_cast<int>(counts.rows());
  const int n = static_cast<int>(counts.cols());
  require(static_cast<int>(tops.size()) == m, "top/count shape mismatch");
  check_sigma(sigma2, n);
  ScoreVector scores = ScoreVector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int t = tops[static_cast<std::size_t>(i)];
    require(t >= 0 && t < n, "top choice out of range");
    for (int k = 0; k < n; ++k) {
      if (k == t) continue;
      const double w =
          pair_weight(counts(i, t), counts(i, k), sigma2[t], sigma2[k]);
      scores[t] += w;
      scores[k] -= w;
    }
  }
  return scores;
}

ScoreVector case5_zero_approx(const std::vector<int>& tops,
                              const CountMatrix& counts) {
  const int m = static_cast<int>(counts.rows());
  const int n = static_cast<int>(counts.cols());
  require(static_cast<int>(tops.size()) == m, "top/count shape mismatch");
  require(m == 0 || counts.minCoeff() >= 1, "counts must be >= 1");
  ScoreVector scores = ScoreVector::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int t = tops[static_cast<std::size_t>(i)];
    require(t >= 0 && t < n, "top choice out of range");
    scores[t] += std::sqrt(static_cast<double>(counts(i, t)));
  }
  return scores;
}

ScoreVector case5_monte_carlo(const std::vector<int>& tops,
                              const CountMatrix& counts,
                              const SigmaRatio& sigma2, int n_samples,
                              SeededRng& rng) {
  const int m = static_cast<int>(counts.rows());
  const int n = static_cast<int>(counts.cols());
  require(static_cast<int>(tops.size()) == m, "top/count shape mismatch");
  require(n_samples >= 1, "need at least one sample");
  check_sigma(sigma2, n);
  ScoreVector scores = ScoreVector::Zero(n);
  Vec sd(n), inv_sd(n), log_cdf(n);
  Vec numerator(n);
  for (int i = 0; i < m; ++i) {
    const int j = tops[static_cast<std::size_t>(i)];
    require(j >= 0 && j < n, "top choice out of range");
    for (int k = 0; k < n; ++k) {
      sd[k] = std::sqrt(sigma2[k] / counts(i, k));
      inv_sd[k] = 1.0 / sd[k];
    }
    numerator.setZero();
    double denominator = 0.0;
    for (int t = 0; t < n_samples; ++t) {
      const double x = rng.normal(0.0, sd[j]);
      double total_log = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        log_cdf[k] = log_gaussian_cdf(x * inv_sd[k]);
        total_log += log_cdf[k];
      }
      const double s = std::exp(total_log);
      numerator[j] += x * counts(i, j) / sigma2[j] * s;
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        numerator[k] -= gaussian_pdf(x * inv_sd[k]) * inv_sd[k] *
                        std::exp(total_log - log_cdf[k]);
      }
      denominator += s;
    }
    numerator /= n_samples;
    denominator /= n_samples;
    scores += numerator / std::max(denominator, 1e-12);
  }
  return scores;
}

}  // namespace banditvote

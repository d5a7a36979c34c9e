#include "banditvote/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace banditvote {

std::vector<int> derive_ranking(const Vec& x) {
  require(x.allFinite(), "non-finite estimate");
  std::vector<int> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&x](int a, int b) { return x[a] > x[b]; });
  return order;
}

std::vector<int> rank_positions(const std::vector<int>& ranking) {
  std::vector<int> pos(ranking.size());
  for (std::size_t r = 0; r < ranking.size(); ++r)
    pos[static_cast<std::size_t>(ranking[r])] = static_cast<int>(r);
  return pos;
}

Eigen::Matrix<std::uint8_t, 1, Eigen::Dynamic> derive_pairwise(const Vec& x) {
  require(x.allFinite(), "non-finite estimate");
  const int n = static_cast<int>(x.size());
  Eigen::Matrix<std::uint8_t, 1, Eigen::Dynamic> row(n_pairs(n));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      row[pair_index(j, k, n)] = static_cast<std::uint8_t>(x[j] <= x[k]);
  return row;
}

VoteSet derive_votes(const CardinalEstimates& estimates) {
  const int m = static_cast<int>(estimates.rows());
  const int n = static_cast<int>(estimates.cols());
  VoteSet votes;
  votes.rankings.reserve(static_cast<std::size_t>(m));
  votes.top_choices.reserve(static_cast<std::size_t>(m));
  votes.pairwise.resize(m, n_pairs(n));
  for (int i = 0; i < m; ++i) {
    const Vec xi = estimates.row(i).transpose();
    std::vector<int> ranking = derive_ranking(xi);
    votes.top_choices.push_back(ranking.front());
    votes.pairwise.row(i) = derive_pairwise(xi);
    votes.rankings.push_back(std::move(ranking));
  }
  return votes;
}

Instance sample_instance(const SimConfig& cfg, SeededRng& rng) {
  require(cfg.n_alternatives >= 2, "need at least two alternatives");
  require(cfg.n_voters >= 1, "need at least one voter");
  require(cfg.count_min >= 1 && cfg.count_max >= cfg.count_min,
          "bad count range");
  require(cfg.obs_variance >= 0.0, "negative observation variance");
  require(cfg.mu_prior.variance >= 0.0, "negative prior variance");

  const int m = cfg.n_voters;
  const int n = cfg.n_alternatives;
  Instance inst;
  inst.truth.mu.resize(n);
  inst.truth.sigma2 = Vec::Constant(n, cfg.obs_variance);
  for (int j = 0; j < n; ++j) {
    inst.truth.mu[j] =
        rng.normal(cfg.mu_prior.mean, std::sqrt(cfg.mu_prior.variance));
  }
  inst.counts.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      inst.counts(i, j) = rng.uniform_int(cfg.count_min, cfg.count_max);
  inst.estimates.resize(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double sd = std::sqrt(inst.truth.sigma2[j] / inst.counts(i, j));
      inst.estimates(i, j) = rng.normal(inst.truth.mu[j], sd);
    }
  }
  inst.votes = derive_votes(inst.estimates);
  int best = 0;
  for (int j = 1; j < n; ++j)
    if (inst.truth.mu[j] > inst.truth.mu[best]) best = j;
  inst.optimal = best;
  return inst;
}

int perturbed_count(int c, double u) {
  const int rounded = static_cast<int>(std::round(c * (1.0 + u)));
  return std::max(1, rounded);
}

CountMatrix perturb_counts_percentage(const CountMatrix& counts,
                                      SeededRng& rng, double max_pct) {
  require(max_pct >= 0.0 && max_pct < 1.0, "max_pct outside [0, 1)");
  CountMatrix out = counts;
  for (int i = 0; i < out.rows(); ++i)
    for (int j = 0; j < out.cols(); ++j)
      out(i, j) = perturbed_count(out(i, j), rng.uniform(-max_pct, max_pct));
  return out;
}

CountMatrix perturb_counts_replacement(const CountMatrix& counts,
                                       SeededRng& rng, double frac,
                                       int resample_min, int resample_max) {
  require(frac >= 0.0 && frac <= 1.0, "frac outside [0, 1]");
  require(resample_min >= 1 && resample_max >= resample_min,
          "bad resample range");
  CountMatrix out = counts;
  const int total = static_cast<int>(out.size());
  const int k = static_cast<int>(std::round(frac * total));
  std::vector<int> cells(static_cast<std::size_t>(total));
  std::iota(cells.begin(), cells.end(), 0);
  for (int t = 0; t < k; ++t) {
    const int pick = rng.uniform_int(t, total - 1);
    std::swap(cells[static_cast<std::size_t>(t)],
              cells[static_cast<std::size_t>(pick)]);
    const int cell = cells[static_cast<std::size_t>(t)];
    out(cell / out.cols(), cell % out.cols()) =
        rng.uniform_int(resample_min, resample_max);
  }
  return out;
}

}  // namespace banditvote

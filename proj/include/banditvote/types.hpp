#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace banditvote {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;
using IMat = Eigen::MatrixXi;

// Aggregate per-alternative scores V_j emitted by every rule.
using ScoreVector = Vec;

// Per-voter observation counts c_ij, m voters x n alternatives, entries >= 1.
using CountMatrix = IMat;

// Per-voter sample means x_ij, same shape as the count matrix.
using CardinalEstimates = Mat;

// Known (or assumed-equal) per-alternative observation variances.
using SigmaRatio = Vec;

struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

// Hidden arm qualities mu_j and their observation variances sigma2_j.
struct GroundTruth {
  Vec mu;
  Vec sigma2;

  int n_alternatives() const { return static_cast<int>(mu.size()); }
};

// Ordinal votes in the three formats the rules consume. pairwise(i, idx)
// holds y_{i,j<k} for the flattened pair (j, k), j < k: 1 means the voter
// ranks alternative k above alternative j.
struct VoteSet {
  std::vector<std::vector<int>> rankings;  // best-to-worst per voter
  std::vector<int> top_choices;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pairwise;

  int n_voters() const { return static_cast<int>(rankings.size()); }
};

// Flattened index of the unordered pair (j, k), j < k, among n alternatives.
inline int pair_index(int j, int k, int n) {
  return j * n - j * (j + 1) / 2 + (k - j - 1);
}

inline int n_pairs(int n) { return n * (n - 1) / 2; }

// One simulated election.
struct Instance {
  GroundTruth truth;
  CountMatrix counts;
  CardinalEstimates estimates;
  VoteSet votes;
  int optimal = 0;  // argmax of truth.mu

  int n_voters() const { return static_cast<int>(counts.rows()); }
  int n_alternatives() const { return static_cast<int>(counts.cols()); }
};

inline void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace banditvote

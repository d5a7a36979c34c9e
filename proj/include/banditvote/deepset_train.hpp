#pragma once

#include "banditvote/deepset.hpp"

#include <functional>

namespace banditvote {

struct TrainConfig {
  int batch_size = 128;
  int max_batches = 5000;
  int voters_min = 5;
  int voters_max = 350;
  int alts_min = 5;
  int alts_max = 15;
  double obs_variance = 1000.0;
  double learning_rate = 3e-4;
  int encoder_layers = 4;
  int decoder_layers = 2;  // hidden layers before the final width-1 layer
  Pool pool = Pool::kMax;
  VoterAgg agg = VoterAgg::kSum;
  int hidden_width = 64;
  bool percentage_count_noise = false;
  double count_noise_pct = 0.5;
};

void validate(const TrainConfig& cfg);

using TrainLogger = std::function<void(int batch, double loss)>;

// One mini-batch: a single (m, n) draw shared by all examples, then
// batch_size freshly simulated instances.
Batch make_training_batch(const TrainConfig& cfg, SeededRng& rng);

// Evaluation set sampled the same way, one (m, n) draw per example.
Batch make_eval_set(const TrainConfig& cfg, int n_examples, SeededRng& rng);

DeepSetModel train(const TrainConfig& cfg, SeededRng& rng,
                   const TrainLogger& log = nullptr);

struct SearchTrial {
  TrainConfig cfg;
  double frozen_loss = 0.0;
};

struct SearchResult {
  TrainConfig best;
  std::vector<SearchTrial> trials;
};

struct SearchParams {
  int n_trials = 20;
  int budget_batches = 300;
  int frozen_set_size = 512;
  TrainConfig base;  // carries the fields outside the Appendix C grid
};

// Samples n_trials configurations without replacement from the 144-point
// grid (4 learning rates x 3 encoder depths x 3 decoder depths x 2 pools x
// 2 aggregations), trains each at reduced budget, and keeps the one with the
// lowest loss on a shared frozen set.
SearchResult hyperparameter_search(const SearchParams& params, SeededRng& rng,
                                   const TrainLogger& log = nullptr);

}  // namespace banditvote

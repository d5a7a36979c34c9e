#include "banditvote/deepset_train.hpp"

#include "banditvote/simulate.hpp"

#include <array>
#include <numeric>
#include <utility>

namespace banditvote {
namespace {

std::pair<FeatureTensor, int> make_example(const TrainConfig& cfg, int m,
                                           int n, SeededRng& rng) {
  SimConfig sim;
  sim.n_alternatives = n;
  sim.n_voters = m;
  sim.obs_variance = cfg.obs_variance;
  Instance inst = sample_instance(sim, rng);
  CountMatrix reported = cfg.percentage_count_noise
                             ? perturb_counts_percentage(inst.counts, rng,
                                                         cfg.count_noise_pct)
                             : inst.counts;
  return {featurize(inst.votes, reported), inst.optimal};
}

}  // namespace

void validate(const TrainConfig& cfg) {
  require(cfg.batch_size >= 1, "batch size must be positive");
  require(cfg.max_batches >= 1, "batch count must be positive");
  require(cfg.voters_min >= 1 && cfg.voters_max >= cfg.voters_min,
          "bad voter range");
  require(cfg.alts_min >= 2 && cfg.alts_max >= cfg.alts_min,
          "bad alternative range");
  require(cfg.obs_variance >= 0.0, "negative observation variance");
  require(cfg.learning_rate > 0.0, "learning rate must be positive");
  require(cfg.encoder_layers >= 1, "need at least one encoder layer");
  require(cfg.decoder_layers >= 0, "negative decoder depth");
  require(cfg.hidden_width >= 1, "hidden width must be positive");
  require(cfg.count_noise_pct >= 0.0 && cfg.count_noise_pct < 1.0,
          "count noise outside [0, 1)");
}

Batch make_training_batch(const TrainConfig& cfg, SeededRng& rng) {
  validate(cfg);
  const int m = rng.uniform_int(cfg.voters_min, cfg.voters_max);
  const int n = rng.uniform_int(cfg.alts_min, cfg.alts_max);
  Batch batch;
  batch.examples.reserve(static_cast<std::size_t>(cfg.batch_size));
  batch.targets.reserve(static_cast<std::size_t>(cfg.batch_size));
  for (int e = 0; e < cfg.batch_size; ++e) {
    auto [features, target] = make_example(cfg, m, n, rng);
    batch.examples.push_back(std::move(features));
    batch.targets.push_back(target);
  }
  return batch;
}

Batch make_eval_set(const TrainConfig& cfg, int n_examples, SeededRng& rng) {
  validate(cfg);
  require(n_examples >= 1, "need at least one example");
  Batch batch;
  batch.examples.reserve(static_cast<std::size_t>(n_examples));
  batch.targets.reserve(static_cast<std::size_t>(n_examples));
  for (int e = 0; e < n_examples; ++e) {
    const int m = rng.uniform_int(cfg.voters_min, cfg.voters_max);
    const int n = rng.uniform_int(cfg.alts_min, cfg.alts_max);
    auto [features, target] = make_example(cfg, m, n, rng);
    batch.examples.push_back(std::move(features));
    batch.targets.push_back(target);
  }
  return batch;
}

DeepSetModel train(const TrainConfig& cfg, SeededRng& rng,
                   const TrainLogger& log) {
  validate(cfg);
  DeepSetModel model = make_model(cfg.encoder_layers, cfg.decoder_layers,
                                  cfg.hidden_width, cfg.pool, cfg.agg);
  init_model(model, rng);
  AdamState adam = make_adam(param_count(model), cfg.learning_rate);
  Vec grad;
  for (int b = 0; b < cfg.max_batches; ++b) {
    const Batch batch = make_training_batch(cfg, rng);
    const double loss = loss_and_grad(model, batch, grad);
    adam_step(model, grad, adam);
    if (log) log(b + 1, loss);
  }
  return model;
}

SearchResult hyperparameter_search(const SearchParams& params, SeededRng& rng,
                                   const TrainLogger& log) {
  constexpr std::array<double, 4> kRates = {3e-3, 1e-3, 3e-4, 1e-4};
  constexpr std::array<int, 3> kEncoderDepths = {2, 3, 4};
  constexpr std::array<int, 3> kDecoderDepths = {0, 1, 2};
  constexpr std::array<Pool, 2> kPools = {Pool::kMax, Pool::kMean};
  constexpr std::array<VoterAgg, 2> kAggs = {VoterAgg::kMean, VoterAgg::kSum};
  const int space =
      static_cast<int>(kRates.size() * kEncoderDepths.size() *
                       kDecoderDepths.size() * kPools.size() * kAggs.size());
  require(params.n_trials >= 1 && params.n_trials <= space,
          "trial count outside the search space");
  require(params.budget_batches >= 1, "budget must be positive");
  require(params.frozen_set_size >= 1, "frozen set must be nonempty");

  TrainConfig frozen_cfg = params.base;
  frozen_cfg.percentage_count_noise = false;
  SeededRng frozen_rng(rng.engine()(), stream::id(stream::kTuningInstance, 0));
  const Batch frozen =
      make_eval_set(frozen_cfg, params.frozen_set_size, frozen_rng);

  std::vector<int> order(static_cast<std::size_t>(space));
  std::iota(order.begin(), order.end(), 0);
  for (int t = 0; t < params.n_trials; ++t) {
    const int pick = rng.uniform_int(t, space - 1);
    std::swap(order[static_cast<std::size_t>(t)],
              order[static_cast<std::size_t>(pick)]);
  }

  SearchResult result;
  for (int t = 0; t < params.n_trials; ++t) {
    int idx = order[static_cast<std::size_t>(t)];
    TrainConfig cfg = params.base;
    cfg.max_batches = params.budget_batches;
    cfg.learning_rate = kRates[static_cast<std::size_t>(idx % 4)];
    idx /= 4;
    cfg.encoder_layers = kEncoderDepths[static_cast<std::size_t>(idx % 3)];
    idx /= 3;
    cfg.decoder_layers = kDecoderDepths[static_cast<std::size_t>(idx % 3)];
    idx /= 3;
    cfg.pool = kPools[static_cast<std::size_t>(idx % 2)];
    idx /= 2;
    cfg.agg = kAggs[static_cast<std::size_t>(idx % 2)];

    SeededRng trial_rng(rng.engine()(), stream::id(stream::kTrain,
                                                   static_cast<std::uint64_t>(t)));
    const DeepSetModel model = train(cfg, trial_rng, log);
    result.trials.push_back({cfg, batch_loss(model, frozen)});
  }
  std::size_t best = 0;
  for (std::size_t t = 1; t < result.trials.size(); ++t)
    if (result.trials[t].frozen_loss < result.trials[best].frozen_loss)
      best = t;
  result.best = result.trials[best].cfg;
  result.best.max_batches = params.base.max_batches;
  return result;
}

}  // namespace banditvote

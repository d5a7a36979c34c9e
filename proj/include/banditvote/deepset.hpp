#pragma once

#include "banditvote/rng.hpp"
#include "banditvote/types.hpp"

#include <string>

namespace banditvote {

enum class Pool { kMax, kMean };
enum class VoterAgg { kSum, kMean };

std::string to_string(Pool pool);
std::string to_string(VoterAgg agg);
Pool pool_from_string(const std::string& name);
VoterAgg agg_from_string(const std::string& name);

// Voter-major feature rows: row i*n + j holds alternative j of voter i.
// Column 0 is the count feature c_ij/50, column 1 the rank-interpolated vote
// feature (1 for the voter's top choice, 0 for the bottom).
struct FeatureTensor {
  int m = 0;
  int n = 0;
  Mat z;
};

FeatureTensor featurize(const VoteSet& votes, const CountMatrix& counts);

// Shared per-alternative map out = W (x - lambda(x)) + b.
struct EquivariantLayer {
  Mat W;  // out x in
  Vec b;
};

struct DeepSetModel {
  std::vector<EquivariantLayer> encoder;
  std::vector<EquivariantLayer> decoder;  // final layer always has width 1
  Pool pool = Pool::kMax;
  VoterAgg agg = VoterAgg::kSum;
  int input_width = 2;
  int hidden_width = 64;
};

// Zero-initialized architecture. decoder_hidden_layers counts the equivariant
// decoder layers before the final width-1 output layer.
DeepSetModel make_model(int encoder_layers, int decoder_hidden_layers,
                        int hidden_width, Pool pool, VoterAgg agg);

// Glorot-uniform weights, zero biases.
void init_model(DeepSetModel& model, SeededRng& rng);

int param_count(const DeepSetModel& model);
Vec get_params(const DeepSetModel& model);
void set_params(DeepSetModel& model, const Vec& theta);

// Probability distribution over the n alternatives.
Vec forward(const DeepSetModel& model, const FeatureTensor& features);

struct Batch {
  std::vector<FeatureTensor> examples;
  std::vector<int> targets;
};

// Mean cross-entropy over the batch; grad is resized to param_count and
// filled with the exact analytic gradient.
double loss_and_grad(const DeepSetModel& model, const Batch& batch, Vec& grad);

double batch_loss(const DeepSetModel& model, const Batch& batch);

struct AdamState {
  Vec m_acc;
  Vec v_acc;
  long step = 0;
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(int n_params, double lr);

// Bias-corrected Adam update, in place.
void adam_step(DeepSetModel& model, const Vec& grad, AdamState& state);

}  // namespace banditvote

#include "banditvote/deepset.hpp"

#include "banditvote/simulate.hpp"

#include <cmath>

namespace banditvote {
namespace {

// Fixed flattening order shared by get/set_params, gradients, and the model
// file format: encoder layers then decoder layers, W before b, W coefficients
// in Eigen's column-major storage order.
template <typename ModelT, typename Fn>
void for_each_block(ModelT& model, Fn&& fn) {
  for (auto& layer : model.encoder) {
    fn(layer.W);
    fn(layer.b);
  }
  for (auto& layer : model.decoder) {
    fn(layer.W);
    fn(layer.b);
  }
}

// Subtract the pooled value lambda(x), feature-wise, within each consecutive
// block of block_rows rows. For max pooling, argmax records the winning row
// offset per (block, column), first winner on ties.
void subtract_lambda(Mat& x, int block_rows, Pool pool,
                     std::vector<int>* argmax) {
  const int blocks = static_cast<int>(x.rows()) / block_rows;
  if (argmax) argmax->assign(static_cast<std::size_t>(blocks) * x.cols(), 0);
  for (int b = 0; b < blocks; ++b) {
    auto blk = x.middleRows(b * block_rows, block_rows);
    if (pool == Pool::kMean) {
      blk.rowwise() -= blk.colwise().mean();
    } else {
      for (int c = 0; c < blk.cols(); ++c) {
        int row = 0;
        const double top = blk.col(c).maxCoeff(&row);
        blk.col(c).array() -= top;
        if (argmax)
          (*argmax)[static_cast<std::size_t>(b) * x.cols() +
                    static_cast<std::size_t>(c)] = row;
      }
    }
  }
}

// Adjoint of subtract_lambda: g is the gradient wrt the subtracted output,
// rewritten in place as the gradient wrt the original input.
void subtract_lambda_backward(Mat& g, int block_rows, Pool pool,
                              const std::vector<int>& argmax) {
  const int blocks = static_cast<int>(g.rows()) / block_rows;
  for (int b = 0; b < blocks; ++b) {
    auto blk = g.middleRows(b * block_rows, block_rows);
    for (int c = 0; c < blk.cols(); ++c) {
      const double total = blk.col(c).sum();
      if (pool == Pool::kMean) {
        blk.col(c).array() -= total / block_rows;
      } else {
        blk(argmax[static_cast<std::size_t>(b) * g.cols() +
                   static_cast<std::size_t>(c)],
            c) -= total;
      }
    }
  }
}

struct LayerCache {
  Mat xc;   // subtracted input fed to the matmul
  Mat pre;  // pre-activation output
  std::vector<int> argmax;
};

// One example's forward pass, keeping what the backward pass needs.
struct ForwardTrace {
  std::vector<LayerCache> enc;
  std::vector<LayerCache> dec;
  Mat agg_in;  // encoder output, before voter aggregation
  Vec probs;
};

void run_layers(const std::vector<EquivariantLayer>& layers, Mat& x,
                int block_rows, Pool pool, bool relu_after_last,
                std::vector<LayerCache>* trace) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Mat xc = x;
    std::vector<int> argmax;
    subtract_lambda(xc, block_rows, pool,
                    pool == Pool::kMax ? &argmax : nullptr);
    Mat pre = xc * layers[l].W.transpose();
    pre.rowwise() += layers[l].b.transpose();
    const bool relu = relu_after_last || l + 1 < layers.size();
    if (relu)
      x = pre.cwiseMax(0.0);
    else
      x = pre;
    if (trace)
      trace->push_back({std::move(xc), std::move(pre), std::move(argmax)});
  }
}

Vec softmax(const Vec& logits) {
  const Vec shifted = logits.array() - logits.maxCoeff();
  Vec p = shifted.array().exp();
  return p / p.sum();
}

ForwardTrace forward_traced(const DeepSetModel& model,
                            const FeatureTensor& f, bool keep) {
  require(f.m >= 1, "need at least one voter");
  require(f.n >= 2, "need at least two alternatives");
  require(f.z.rows() == static_cast<Eigen::Index>(f.m) * f.n,
          "feature row count mismatch");
  require(static_cast<int>(f.z.cols()) == model.input_width,
          "feature width mismatch");
  require(!model.encoder.empty() && !model.decoder.empty(),
          "model has no layers");
  ForwardTrace t;
  Mat x = f.z;
  run_layers(model.encoder, x, f.n, model.pool, true, keep ? &t.enc : nullptr);
  if (keep) t.agg_in = x;
  Mat a = Mat::Zero(f.n, x.cols());
  for (int i = 0; i < f.m; ++i) a += x.middleRows(i * f.n, f.n);
  if (model.agg == VoterAgg::kMean) a /= f.m;
  run_layers(model.decoder, a, f.n, model.pool, false,
             keep ? &t.dec : nullptr);
  t.probs = softmax(a.col(0));
  return t;
}

void backward_layers(const std::vector<EquivariantLayer>& layers,
                     const std::vector<LayerCache>& trace, Mat& g,
                     int block_rows, Pool pool, bool relu_after_last,
                     std::vector<EquivariantLayer>& grads) {
  for (int l = static_cast<int>(layers.size()) - 1; l >= 0; --l) {
    const auto& cache = trace[static_cast<std::size_t>(l)];
    const bool relu = relu_after_last || l + 1 < static_cast<int>(layers.size());
    if (relu)
      g = g.cwiseProduct((cache.pre.array() > 0.0).cast<double>().matrix());
    auto& lg = grads[static_cast<std::size_t>(l)];
    lg.W.noalias() += g.transpose() * cache.xc;
    lg.b += g.colwise().sum().transpose();
    Mat gx = g * layers[static_cast<std::size_t>(l)].W;
    subtract_lambda_backward(gx, block_rows, pool, cache.argmax);
    g = std::move(gx);
  }
}

std::vector<EquivariantLayer> zero_like(
    const std::vector<EquivariantLayer>& layers) {
  std::vector<EquivariantLayer> z;
  z.reserve(layers.size());
  for (const auto& layer : layers)
    z.push_back({Mat::Zero(layer.W.rows(), layer.W.cols()),
                 Vec::Zero(layer.b.size())});
  return z;
}

}  // namespace

std::string to_string(Pool pool) {
  return pool == Pool::kMax ? "max" : "mean";
}

std::string to_string(VoterAgg agg) {
  return agg == VoterAgg::kSum ? "sum" : "mean";
}

Pool pool_from_string(const std::string& name) {
  if (name == "max") return Pool::kMax;
  if (name == "mean") return Pool::kMean;
  throw std::invalid_argument("unknown pool: " + name);
}

VoterAgg agg_from_string(const std::string& name) {
  if (name == "sum") return VoterAgg::kSum;
  if (name == "mean") return VoterAgg::kMean;
  throw std::invalid_argument("unknown voter aggregation: " + name);
}

FeatureTensor featurize(const VoteSet& votes, const CountMatrix& counts) {
  const int m = static_cast<int>(counts.rows());
  const int n = static_cast<int>(counts.cols());
  require(votes.n_voters() == m, "vote/count shape mismatch");
  require(n >= 2, "vote feature undefined for a single alternative");
  FeatureTensor f;
  f.m = m;
  f.n = n;
  f.z.resize(static_cast<Eigen::Index>(m) * n, 2);
  for (int i = 0; i < m; ++i) {
    const std::vector<int> pos =
        rank_positions(votes.rankings[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      f.z(static_cast<Eigen::Index>(i) * n + j, 0) = counts(i, j) / 50.0;
      f.z(static_cast<Eigen::Index>(i) * n + j, 1) =
          1.0 - static_cast<double>(pos[static_cast<std::size_t>(j)]) / (n - 1);
    }
  }
  return f;
}

DeepSetModel make_model(int encoder_layers, int decoder_hidden_layers,
                        int hidden_width, Pool pool, VoterAgg agg) {
  require(encoder_layers >= 1, "need at least one encoder layer");
  require(decoder_hidden_layers >= 0, "negative decoder depth");
  require(hidden_width >= 1, "hidden width must be positive");
  DeepSetModel model;
  model.pool = pool;
  model.agg = agg;
  model.hidden_width = hidden_width;
  int in = model.input_width;
  for (int l = 0; l < encoder_layers; ++l) {
    model.encoder.push_back({Mat::Zero(hidden_width, in),
                             Vec::Zero(hidden_width)});
    in = hidden_width;
  }
  for (int l = 0; l < decoder_hidden_layers; ++l) {
    model.decoder.push_back({Mat::Zero(hidden_width, in),
                             Vec::Zero(hidden_width)});
    in = hidden_width;
  }
  model.decoder.push_back({Mat::Zero(1, in), Vec::Zero(1)});
  return model;
}

void init_model(DeepSetModel& model, SeededRng& rng) {
  auto init_layers = [&rng](std::vector<EquivariantLayer>& layers) {
    for (auto& layer : layers) {
      const double r = std::sqrt(
          6.0 / (static_cast<double>(layer.W.rows()) + layer.W.cols()));
      for (Eigen::Index c = 0; c < layer.W.cols(); ++c)
        for (Eigen::Index i = 0; i < layer.W.rows(); ++i)
          layer.W(i, c) = rng.uniform(-r, r);
      layer.b.setZero();
    }
  };
  init_layers(model.encoder);
  init_layers(model.decoder);
}

int param_count(const DeepSetModel& model) {
  int total = 0;
  for_each_block(model, [&total](const auto& block) {
    total += static_cast<int>(block.size());
  });
  return total;
}

Vec get_params(const DeepSetModel& model) {
  Vec theta(param_count(model));
  Eigen::Index at = 0;
  for_each_block(model, [&](const auto& block) {
    theta.segment(at, block.size()) =
        Eigen::Map<const Vec>(block.data(), block.size());
    at += block.size();
  });
  return theta;
}

void set_params(DeepSetModel& model, const Vec& theta) {
  require(theta.size() == param_count(model), "parameter count mismatch");
  Eigen::Index at = 0;
  for_each_block(model, [&](auto& block) {
    Eigen::Map<Vec>(block.data(), block.size()) =
        theta.segment(at, block.size());
    at += block.size();
  });
}

Vec forward(const DeepSetModel& model, const FeatureTensor& features) {
  return forward_traced(model, features, false).probs;
}

double loss_and_grad(const DeepSetModel& model, const Batch& batch,
                     Vec& grad) {
  require(!batch.examples.empty(), "empty batch");
  require(batch.examples.size() == batch.targets.size(),
          "batch target count mismatch");
  auto enc_grads = zero_like(model.encoder);
  auto dec_grads = zero_like(model.decoder);
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.examples.size(); ++e) {
    const FeatureTensor& f = batch.examples[e];
    const int target = batch.targets[e];
    require(target >= 0 && target < f.n, "target out of range");
    ForwardTrace t = forward_traced(model, f, true);
    loss -= std::log(std::max(t.probs[target], 1e-300));

    Mat g = t.probs;
    g(target, 0) -= 1.0;
    backward_layers(model.decoder, t.dec, g, f.n, model.pool, false,
                    dec_grads);
    Mat ge(static_cast<Eigen::Index>(f.m) * f.n, g.cols());
    const double scale = model.agg == VoterAgg::kMean ? 1.0 / f.m : 1.0;
    for (int i = 0; i < f.m; ++i)
      ge.middleRows(i * f.n, f.n) = g * scale;
    backward_layers(model.encoder, t.enc, ge, f.n, model.pool, true,
                    enc_grads);
  }
  const double inv = 1.0 / static_cast<double>(batch.examples.size());
  loss *= inv;
  grad.resize(param_count(model));
  Eigen::Index at = 0;
  auto flatten = [&](const std::vector<EquivariantLayer>& layers) {
    for (const auto& layer : layers) {
      grad.segment(at, layer.W.size()) =
          Eigen::Map<const Vec>(layer.W.data(), layer.W.size()) * inv;
      at += layer.W.size();
      grad.segment(at, layer.b.size()) = layer.b * inv;
      at += layer.b.size();
    }
  };
  flatten(enc_grads);
  flatten(dec_grads);
  return loss;
}

double batch_loss(const DeepSetModel& model, const Batch& batch) {
  require(!batch.examples.empty(), "empty batch");
  require(batch.examples.size() == batch.targets.size(),
          "batch target count mismatch");
  double loss = 0.0;
  for (std::size_t e = 0; e < batch.examples.size(); ++e) {
    const int target = batch.targets[e];
    require(target >= 0 && target < batch.examples[e].n,
            "target out of range");
    const Vec probs = forward(model, batch.examples[e]);
    loss -= std::log(std::max(probs[target], 1e-300));
  }
  return loss / static_cast<double>(batch.examples.size());
}

AdamState make_adam(int n_params, double lr) {
  require(n_params >= 1, "empty parameter vector");
  require(lr > 0.0, "learning rate must be positive");
  AdamState state;
  state.m_acc = Vec::Zero(n_params);
  state.v_acc = Vec::Zero(n_params);
  state.lr = lr;
  return state;
}

void adam_step(DeepSetModel& model, const Vec& grad, AdamState& state) {
  require(grad.size() == state.m_acc.size(), "gradient shape mismatch");
  require(grad.size() == param_count(model), "gradient/model shape mismatch");
  state.step += 1;
  state.m_acc = state.beta1 * state.m_acc + (1.0 - state.beta1) * grad;
  state.v_acc = state.beta2 * state.v_acc.array() +
                (1.0 - state.beta2) * grad.array().square();
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);
  Vec theta = get_params(model);
  theta.array() -= state.lr * (state.m_acc.array() / bc1) /
                   ((state.v_acc.array() / bc2).sqrt() + state.eps);
  set_params(model, theta);
}

}  // namespace banditvote

#include "banditvote/io.hpp"

#include "banditvote/simulate.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace banditvote {
namespace {

using nlohmann::json;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_to_json(const IMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename MatT>
MatT matrix_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) throw std::runtime_error("instance file: empty matrix");
  const Eigen::Index c = static_cast<Eigen::Index>(rows.at(0).size());
  MatT m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != c)
      throw std::runtime_error("instance file: ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j)
      m(i, j) = row.at(static_cast<std::size_t>(j))
                    .get<typename MatT::Scalar>();
  }
  return m;
}

void digest_bytes(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const std::uint8_t*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
}

}  // namespace

void write_instances_jsonl(const std::vector<Instance>& instances,
                           std::ostream& out) {
  for (const Instance& inst : instances) {
    json doc;
    doc["mu"] = std::vector<double>(inst.truth.mu.begin(),
                                    inst.truth.mu.end());
    doc["sigma2"] = std::vector<double>(inst.truth.sigma2.begin(),
                                        inst.truth.sigma2.end());
    doc["counts"] = matrix_to_json(inst.counts);
    doc["estimates"] = matrix_to_json(inst.estimates);
    doc["rankings"] = inst.votes.rankings;
    out << doc.dump() << "\n";
  }
}

void write_instances_jsonl(const std::vector<Instance>& instances,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_instances_jsonl(instances, out);
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::vector<Instance> read_instances_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Instance> instances;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("instance file " + path + ": bad JSON line: " +
                               e.what());
    }
    Instance inst;
    const auto mu = doc.at("mu").get<std::vector<double>>();
    const auto sigma2 = doc.at("sigma2").get<std::vector<double>>();
    inst.truth.mu = Eigen::Map<const Vec>(mu.data(),
                                          static_cast<Eigen::Index>(mu.size()));
    inst.truth.sigma2 = Eigen::Map<const Vec>(
        sigma2.data(), static_cast<Eigen::Index>(sigma2.size()));
    inst.counts = matrix_from_json<IMat>(doc.at("counts"));
    inst.estimates = matrix_from_json<Mat>(doc.at("estimates"));
    inst.votes = derive_votes(inst.estimates);
    const auto rankings =
        doc.at("rankings").get<std::vector<std::vector<int>>>();
    if (rankings != inst.votes.rankings)
      throw std::runtime_error(
          "instance file " + path +
          ": rankings disagree with the stored estimates");
    int best = 0;
    for (int j = 1; j < inst.truth.mu.size(); ++j)
      if (inst.truth.mu[j] > inst.truth.mu[best]) best = j;
    inst.optimal = best;
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::uint64_t instance_digest(const Instance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  digest_bytes(h, inst.truth.mu.data(),
               static_cast<std::size_t>(inst.truth.mu.size()) * sizeof(double));
  digest_bytes(h, inst.truth.sigma2.data(),
               static_cast<std::size_t>(inst.truth.sigma2.size()) *
                   sizeof(double));
  digest_bytes(h, inst.counts.data(),
               static_cast<std::size_t>(inst.counts.size()) * sizeof(int));
  digest_bytes(h, inst.estimates.data(),
               static_cast<std::size_t>(inst.estimates.size()) *
                   sizeof(double));
  return h;
}

TrainConfig train_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad training config JSON: ") +
                             e.what());
  }
  TrainConfig cfg;
  auto grab = [&doc](const char* key, auto& field) {
    if (doc.contains(key)) doc.at(key).get_to(field);
  };
  grab("batch_size", cfg.batch_size);
  grab("max_batches", cfg.max_batches);
  grab("voters_min", cfg.voters_min);
  grab("voters_max", cfg.voters_max);
  grab("alts_min", cfg.alts_min);
  grab("alts_max", cfg.alts_max);
  grab("obs_variance", cfg.obs_variance);
  grab("learning_rate", cfg.learning_rate);
  grab("encoder_layers", cfg.encoder_layers);
  grab("decoder_layers", cfg.decoder_layers);
  grab("hidden_width", cfg.hidden_width);
  grab("percentage_count_noise", cfg.percentage_count_noise);
  grab("count_noise_pct", cfg.count_noise_pct);
  if (doc.contains("pool"))
    cfg.pool = pool_from_string(doc.at("pool").get<std::string>());
  if (doc.contains("agg"))
    cfg.agg = agg_from_string(doc.at("agg").get<std::string>());
  validate(cfg);
  return cfg;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return train_config_from_json(buf.str());
}

std::string train_config_to_json(const TrainConfig& cfg) {
  json doc;
  doc["batch_size"] = cfg.batch_size;
  doc["max_batches"] = cfg.max_batches;
  doc["voters_min"] = cfg.voters_min;
  doc["voters_max"] = cfg.voters_max;
  doc["alts_min"] = cfg.alts_min;
  doc["alts_max"] = cfg.alts_max;
  doc["obs_variance"] = cfg.obs_variance;
  doc["learning_rate"] = cfg.learning_rate;
  doc["encoder_layers"] = cfg.encoder_layers;
  doc["decoder_layers"] = cfg.decoder_layers;
  doc["pool"] = to_string(cfg.pool);
  doc["agg"] = to_string(cfg.agg);
  doc["hidden_width"] = cfg.hidden_width;
  doc["percentage_count_noise"] = cfg.percentage_count_noise;
  doc["count_noise_pct"] = cfg.count_noise_pct;
  return doc.dump(2);
}

}  // namespace banditvote

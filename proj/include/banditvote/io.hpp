#pragma once

#include "banditvote/deepset_train.hpp"
#include "banditvote/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace banditvote {

// One JSON object per line with fields mu, sigma2, counts, estimates,
// rankings; votes are rebuilt from the estimates on read.
void write_instances_jsonl(const std::vector<Instance>& instances,
                           std::ostream& out);
void write_instances_jsonl(const std::vector<Instance>& instances,
                           const std::string& path);
std::vector<Instance> read_instances_jsonl(const std::string& path);

// FNV-1a digest over the instance payload, for seed-pairing checks.
std::uint64_t instance_digest(const Instance& inst);

TrainConfig train_config_from_json(const std::string& text);
TrainConfig load_train_config(const std::string& path);
std::string train_config_to_json(const TrainConfig& cfg);

}  // namespace banditvote

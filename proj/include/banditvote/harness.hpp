#pragma once

#include "banditvote/deepset.hpp"
#include "banditvote/rules_baseline.hpp"
#include "banditvote/simulate.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace banditvote {

struct RegretSummary {
  std::string rule_name;
  double mean_regret = 0.0;
  double accuracy = 0.0;
  double std_error = 0.0;
  long n_instances = 0;
};

enum class NoiseKind { kNone, kPercentage, kReplacement };

struct CountNoise {
  NoiseKind kind = NoiseKind::kNone;
  double max_pct = 0.5;
  double frac = 1.0 / 3.0;
  int resample_min = 1;
  int resample_max = 50;
};

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

// What a rule sees for one instance. Under count noise, reported_counts
// differs from instance.counts; regret is always scored against the truth.
struct RuleContext {
  const Instance& instance;
  const CountMatrix& reported_counts;
  const SigmaRatio& sigma2;
  int mc_samples;
  SeededRng& rule_rng;
};

using RuleFn = std::function<ScoreVector(const RuleContext&)>;

class RuleRegistry {
 public:
  void add(const std::string& name, RuleFn fn);
  bool contains(const std::string& name) const;
  const RuleFn& at(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::vector<std::pair<std::string, RuleFn>> rules_;
};

// All built-in rules: plurality, borda, case1-oracle, case4, case4-norm,
// case5-lb, case5-zero, case5-mc, and the uniform "random" reference.
// Learned rules and the tuned +variants are added as closures.
RuleRegistry default_registry();

RuleFn make_experience_weighted_rule(BaseRule base, CountModification mod);
RuleFn make_learned_rule(std::shared_ptr<const DeepSetModel> model);

struct EvalConfig {
  SimConfig sim;
  long n_instances = 20000;
  CountNoise noise;
  std::uint64_t master_seed = 0;
  int mc_samples = 100;
  int threads = 1;
  bool tuning_streams = false;  // draw from the disjoint tuning stream family
};

RegretSummary evaluate_rule(const std::string& name, const RuleFn& fn,
                            const EvalConfig& cfg,
                            std::vector<double>* regrets_out = nullptr);

// Lowest tuning-set mean regret among the six count modifications, ties to
// the first in enumeration order.
CountModification select_best_modification(BaseRule base,
                                           const EvalConfig& tuning_cfg);

struct ExperimentSpec {
  SimConfig sim;
  std::vector<int> voter_counts{3, 10, 30, 100, 300};
  long n_instances = 20000;
  long tuning_instances = 5000;
  std::vector<std::string> rules;
  CountNoise noise;
  std::uint64_t master_seed = 0;
  int mc_samples = 100;
  int threads = 1;
};

struct ResultTable {
  std::vector<int> voter_counts;
  std::vector<std::string> rule_names;
  std::vector<std::vector<RegretSummary>> cells;  // [rule][voter index]
};

using ProgressFn =
    std::function<void(const std::string& rule, int voters,
                       const RegretSummary& summary)>;

// Evaluates every rule at every voter count on seed-paired instances.
// Plurality+/Borda+ are tuned per voter count on the tuning streams.
ResultTable run_experiment(const ExperimentSpec& spec,
                           const RuleRegistry& registry,
                           const ProgressFn& progress = nullptr);

std::string table_to_csv(const ResultTable& table);
std::string table_to_json(const ResultTable& table,
                          std::uint64_t master_seed);
std::string summary_to_json(const RegretSummary& summary,
                            std::uint64_t master_seed);

// Embedded copy of the preset shipped at presets/table<id>.json.
const char* preset_json(const std::string& table_id);

// Parses a preset document into a spec plus the ordered rule list.
ExperimentSpec parse_preset(const std::string& text);

}  // namespace banditvote

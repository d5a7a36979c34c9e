#include "banditvote/harness.hpp"

#include "banditvote/parallel.hpp"
#include "banditvote/rules_mle.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>

namespace banditvote {
namespace {

using nlohmann::json;

json summary_json(const RegretSummary& s) {
  return json{{"rule", s.rule_name},
              {"mean_regret", s.mean_regret},
              {"accuracy", s.accuracy},
              {"std_error", s.std_error},
              {"n_instances", s.n_instances}};
}

std::string format_cell(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "percentage") return NoiseKind::kPercentage;
  if (name == "replacement") return NoiseKind::kReplacement;
  throw std::invalid_argument("unknown count noise kind: " + name);
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone: return "none";
    case NoiseKind::kPercentage: return "percentage";
    case NoiseKind::kReplacement: return "replacement";
  }
  throw std::invalid_argument("unknown count noise kind");
}

void RuleRegistry::add(const std::string& name, RuleFn fn) {
  require(!contains(name), "rule already registered");
  rules_.emplace_back(name, std::move(fn));
}

bool RuleRegistry::contains(const std::string& name) const {
  for (const auto& [n, fn] : rules_)
    if (n == name) return true;
  return false;
}

const RuleFn& RuleRegistry::at(const std::string& name) const {
  for (const auto& [n, fn] : rules_)
    if (n == name) return fn;
  throw std::invalid_argument("rule not registered: " + name);
}

std::vector<std::string> RuleRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(rules_.size());
  for (const auto& [n, fn] : rules_) out.push_back(n);
  return out;
}

RuleRegistry default_registry() {
  RuleRegistry reg;
  reg.add("plurality", [](const RuleContext& ctx) {
    return plurality(ctx.instance.votes.top_choices,
                     ctx.instance.n_alternatives());
  });
  reg.add("borda", [](const RuleContext& ctx) {
    return borda(ctx.instance.votes.rankings, ctx.instance.n_alternatives());
  });
  reg.add("case1-oracle", [](const RuleContext& ctx) {
    return case1_oracle(ctx.instance.estimates, ctx.reported_counts);
  });
  reg.add("case4", [](const RuleContext& ctx) {
    return case4_scores(ctx.instance.votes, ctx.reported_counts, ctx.sigma2,
                        false);
  });
  reg.add("case4-norm", [](const RuleContext& ctx) {
    return case4_scores(ctx.instance.votes, ctx.reported_counts, ctx.sigma2,
                        true);
  });
  reg.add("case5-lb", [](const RuleContext& ctx) {
    return case5_lower_bound(ctx.instance.votes.top_choices,
                             ctx.reported_counts, ctx.sigma2);
  });
  reg.add("case5-zero", [](const RuleContext& ctx) {
    return case5_zero_approx(ctx.instance.votes.top_choices,
                             ctx.reported_counts);
  });
  reg.add("case5-mc", [](const RuleContext& ctx) {
    return case5_monte_carlo(ctx.instance.votes.top_choices,
                             ctx.reported_counts, ctx.sigma2, ctx.mc_samples,
                             ctx.rule_rng);
  });
  // Uniform reference: constant scores, so the tie-break picks uniformly.
  reg.add("random", [](const RuleContext& ctx) {
    return ScoreVector::Zero(ctx.instance.n_alternatives());
  });
  return reg;
}

RuleFn make_experience_weighted_rule(BaseRule base, CountModification mod) {
  return [base, mod](const RuleContext& ctx) {
    return experience_weighted(base, ctx.instance.votes, ctx.reported_counts,
                               mod);
  };
}

RuleFn make_learned_rule(std::shared_ptr<const DeepSetModel> model) {
  require(model != nullptr, "null model");
  return [model](const RuleContext& ctx) {
    const FeatureTensor f =
        featurize(ctx.instance.votes, ctx.reported_counts);
    return forward(*model, f);
  };
}

RegretSummary evaluate_rule(const std::string& name, const RuleFn& fn,
                            const EvalConfig& cfg,
                            std::vector<double>* regrets_out) {
  require(cfg.n_instances >= 1, "need at least one instance");
  const std::uint64_t inst_dom =
      cfg.tuning_streams ? stream::kTuningInstance : stream::kInstance;
  const std::uint64_t pert_dom =
      cfg.tuning_streams ? stream::kTuningPerturb : stream::kPerturb;
  const std::uint64_t tie_dom =
      cfg.tuning_streams ? stream::kTuningTiebreak : stream::kTiebreak;

  std::vector<double> regrets(static_cast<std::size_t>(cfg.n_instances));
  std::vector<std::uint8_t> correct(static_cast<std::size_t>(cfg.n_instances));
  parallel_for(0, cfg.n_instances, cfg.threads, [&](long i) {
    const auto idx = static_cast<std::uint64_t>(i);
    SeededRng inst_rng(cfg.master_seed, stream::id(inst_dom, idx));
    const Instance inst = sample_instance(cfg.sim, inst_rng);
    CountMatrix perturbed;
    const CountMatrix* reported = &inst.counts;
    if (cfg.noise.kind == NoiseKind::kPercentage) {
      SeededRng noise_rng(cfg.master_seed, stream::id(pert_dom, idx));
      perturbed =
          perturb_counts_percentage(inst.counts, noise_rng, cfg.noise.max_pct);
      reported = &perturbed;
    } else if (cfg.noise.kind == NoiseKind::kReplacement) {
      SeededRng noise_rng(cfg.master_seed, stream::id(pert_dom, idx));
      perturbed = perturb_counts_replacement(
          inst.counts, noise_rng, cfg.noise.frac, cfg.noise.resample_min,
          cfg.noise.resample_max);
      reported = &perturbed;
    }
    SeededRng rule_rng(cfg.master_seed, stream::id(stream::kRule, idx));
    const ScoreVector scores =
        fn({inst, *reported, inst.truth.sigma2, cfg.mc_samples, rule_rng});
    require(scores.size() == inst.truth.mu.size(), "rule returned bad shape");
    SeededRng tie_rng(cfg.master_seed, stream::id(tie_dom, idx));
    const int chosen = argmax_random_tiebreak(scores, tie_rng);
    regrets[static_cast<std::size_t>(i)] =
        inst.truth.mu[inst.optimal] - inst.truth.mu[chosen];
    correct[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(chosen == inst.optimal);
  });

  double sum = 0.0;
  long hits = 0;
  for (std::size_t i = 0; i < regrets.size(); ++i) {
    sum += regrets[i];
    hits += correct[i];
  }
  const double mean = sum / static_cast<double>(cfg.n_instances);
  double sq = 0.0;
  for (const double r : regrets) sq += (r - mean) * (r - mean);
  RegretSummary s;
  s.rule_name = name;
  s.mean_regret = mean;
  s.accuracy = static_cast<double>(hits) / static_cast<double>(cfg.n_instances);
  s.std_error =
      cfg.n_instances > 1
          ? std::sqrt(sq / (static_cast<double>(cfg.n_instances) - 1.0) /
                      static_cast<double>(cfg.n_instances))
          : 0.0;
  s.n_instances = cfg.n_instances;
  if (regrets_out) *regrets_out = std::move(regrets);
  return s;
}

CountModification select_best_modification(BaseRule base,
                                           const EvalConfig& tuning_cfg) {
  CountModification best = kAllModifications.front();
  double best_regret = 0.0;
  bool first = true;
  for (CountModification mod : kAllModifications) {
    const RegretSummary s = evaluate_rule(
        to_string(mod), make_experience_weighted_rule(base, mod), tuning_cfg);
    if (first || s.mean_regret < best_regret) {
      best = mod;
      best_regret = s.mean_regret;
      first = false;
    }
  }
  return best;
}

ResultTable run_experiment(const ExperimentSpec& spec,
                           const RuleRegistry& registry,
                           const ProgressFn& progress) {
  require(spec.n_instances >= 1, "need at least one instance");
  require(!spec.voter_counts.empty(), "need at least one voter count");
  for (const std::string& rule : spec.rules) {
    if (rule == "plurality+" || rule == "borda+") continue;
    require(registry.contains(rule), "rule not registered");
  }

  ResultTable table;
  table.voter_counts = spec.voter_counts;
  table.rule_names = spec.rules;
  table.cells.assign(spec.rules.size(),
                     std::vector<RegretSummary>(spec.voter_counts.size()));
  for (std::size_t mi = 0; mi < spec.voter_counts.size(); ++mi) {
    EvalConfig cfg;
    cfg.sim = spec.sim;
    cfg.sim.n_voters = spec.voter_counts[mi];
    cfg.n_instances = spec.n_instances;
    cfg.noise = spec.noise;
    cfg.master_seed = spec.master_seed;
    cfg.mc_samples = spec.mc_samples;
    cfg.threads = spec.threads;
    for (std::size_t ri = 0; ri < spec.rules.size(); ++ri) {
      const std::string& rule = spec.rules[ri];
      RuleFn tuned;
      const RuleFn* fn = nullptr;
      if (rule == "plurality+" || rule == "borda+") {
        const BaseRule base =
            rule == "plurality+" ? BaseRule::kPlurality : BaseRule::kBorda;
        EvalConfig tuning_cfg = cfg;
        tuning_cfg.n_instances = spec.tuning_instances;
        tuning_cfg.tuning_streams = true;
        tuned = make_experience_weighted_rule(
            base, select_best_modification(base, tuning_cfg));
        fn = &tuned;
      } else {
        fn = &registry.at(rule);
      }
      table.cells[ri][mi] = evaluate_rule(rule, *fn, cfg);
      if (progress)
        progress(rule, spec.voter_counts[mi], table.cells[ri][mi]);
    }
  }
  return table;
}

std::string table_to_csv(const ResultTable& table) {
  std::string out = "rule";
  for (const int m : table.voter_counts) out += ",m=" + std::to_string(m);
  out += "\n";
  for (std::size_t ri = 0; ri < table.rule_names.size(); ++ri) {
    out += table.rule_names[ri];
    for (const RegretSummary& cell : table.cells[ri])
      out += "," + format_cell(cell.mean_regret);
    out += "\n";
  }
  return out;
}

std::string table_to_json(const ResultTable& table,
                          std::uint64_t master_seed) {
  json doc;
  doc["master_seed"] = master_seed;
  doc["voter_counts"] = table.voter_counts;
  json rules = json::array();
  for (std::size_t ri = 0; ri < table.rule_names.size(); ++ri) {
    json cells = json::array();
    for (std::size_t mi = 0; mi < table.cells[ri].size(); ++mi) {
      json cell = summary_json(table.cells[ri][mi]);
      cell["voters"] = table.voter_counts[mi];
      cells.push_back(std::move(cell));
    }
    rules.push_back(json{{"rule", table.rule_names[ri]},
                         {"cells", std::move(cells)}});
  }
  doc["rules"] = std::move(rules);
  return doc.dump(2);
}

std::string summary_to_json(const RegretSummary& summary,
                            std::uint64_t master_seed) {
  json doc = summary_json(summary);
  doc["master_seed"] = master_seed;
  return doc.dump(2);
}

ExperimentSpec parse_preset(const std::string& text) {
  try {
    const json doc = json::parse(text);
    ExperimentSpec spec;
    const json& sim = doc.at("sim");
    spec.sim.n_alternatives = sim.at("n_alternatives").get<int>();
    spec.sim.count_min = sim.at("count_min").get<int>();
    spec.sim.count_max = sim.at("count_max").get<int>();
    spec.sim.obs_variance = sim.at("obs_variance").get<double>();
    spec.voter_counts = doc.at("voter_counts").get<std::vector<int>>();
    spec.n_instances = doc.at("n_instances").get<long>();
    spec.tuning_instances = doc.at("tuning_instances").get<long>();
    spec.mc_samples = doc.at("mc_samples").get<int>();
    spec.noise.kind =
        noise_kind_from_string(doc.at("count_noise").get<std::string>());
    spec.rules = doc.at("rules").get<std::vector<std::string>>();
    return spec;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("bad preset JSON: ") + e.what());
  }
}

const char* preset_json(const std::string& table_id) {
  static const char* k1a = R"PRESET({
  "table": "1a",
  "description": "High variance, ideal counts",
  "sim": {
    "n_alternatives": 10,
    "count_min": 1,
    "count_max": 50,
    "obs_variance": 1000.0
  },
  "voter_counts": [3, 10, 30, 100, 300],
  "n_instances": 20000,
  "tuning_instances": 5000,
  "mc_samples": 100,
  "count_noise": "none",
  "rules": [
    "case1-oracle",
    "borda",
    "borda+",
    "case4",
    "case4-norm",
    "learned",
    "plurality",
    "plurality+",
    "case5-lb",
    "case5-zero",
    "case5-mc"
  ]
}
)PRESET";
  static const char* k1b = R"PRESET({
  "table": "1b",
  "description": "Low variance, ideal counts",
  "sim": {
    "n_alternatives": 10,
    "count_min": 1,
    "count_max": 50,
    "obs_variance": 10.0
  },
  "voter_counts": [3, 10, 30, 100, 300],
  "n_instances": 20000,
  "tuning_instances": 5000,
  "mc_samples": 100,
  "count_noise": "none",
  "rules": [
    "case1-oracle",
    "borda",
    "borda+",
    "case4",
    "case4-norm",
    "learned",
    "plurality",
    "plurality+",
    "case5-lb",
    "case5-zero",
    "case5-mc"
  ]
}
)PRESET";
  static const char* k2a = R"PRESET({
  "table": "2a",
  "description": "High variance, 50% count noise",
  "sim": {
    "n_alternatives": 10,
    "count_min": 1,
    "count_max": 50,
    "obs_variance": 1000.0
  },
  "voter_counts": [3, 10, 30, 100, 300],
  "n_instances": 20000,
  "tuning_instances": 5000,
  "mc_samples": 100,
  "count_noise": "percentage",
  "rules": [
    "case1-oracle",
    "learned-noisy",
    "borda",
    "borda+",
    "case4",
    "case4-norm",
    "learned",
    "plurality",
    "plurality+",
    "case5-lb",
    "case5-zero",
    "case5-mc"
  ]
}
)PRESET";
  static const char* k2b = R"PRESET({
  "table": "2b",
  "description": "High variance, 33% count replacement",
  "sim": {
    "n_alternatives": 10,
    "count_min": 1,
    "count_max": 50,
    "obs_variance": 1000.0
  },
  "voter_counts": [3, 10, 30, 100, 300],
  "n_instances": 20000,
  "tuning_instances": 5000,
  "mc_samples": 100,
  "count_noise": "replacement",
  "rules": [
    "case1-oracle",
    "learned-noisy",
    "borda",
    "borda+",
    "case4",
    "case4-norm",
    "learned",
    "plurality",
    "plurality+",
    "case5-lb",
    "case5-zero",
    "case5-mc"
  ]
}
)PRESET";
  if (table_id == "1a") return k1a;
  if (table_id == "1b") return k1b;
  if (table_id == "2a") return k2a;
  if (table_id == "2b") return k2b;
  throw std::invalid_argument("unknown table id: " + table_id);
}

}  // namespace banditvote

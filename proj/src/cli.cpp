#include "banditvote/cli.hpp"

#include "banditvote/deepset_io.hpp"
#include "banditvote/deepset_train.hpp"
#include "banditvote/harness.hpp"
#include "banditvote/io.hpp"
#include "banditvote/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace banditvote {
namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
}

bool wants_json(const std::string& path) {
  return path.size() >= 5 && path.ends_with(".json");
}

void batch_logger(int b, double loss) {
  if (b % 100 == 0 || b == 1) {
    std::printf("  batch %d loss %.4f\n", b, loss);
    std::fflush(stdout);
  }
}

// Loads the model at `path` if it exists; otherwise trains one with the
// default protocol (optionally with percentage count noise) and, when a path
// was given, saves it there for reuse.
std::shared_ptr<const DeepSetModel> obtain_model(const std::string& path,
                                                 bool noisy,
                                                 std::uint64_t seed,
                                                 int batches) {
  if (!path.empty() && std::filesystem::exists(path)) {
    std::printf("loading model %s\n", path.c_str());
    return std::make_shared<const DeepSetModel>(load_model(path));
  }
  TrainConfig cfg;
  cfg.percentage_count_noise = noisy;
  cfg.max_batches = batches;
  validate(cfg);
  std::printf("training %s model, %d batches\n", noisy ? "noisy" : "clean",
              batches);
  std::fflush(stdout);
  SeededRng rng(seed, stream::id(stream::kTrain, noisy ? 1 : 0));
  DeepSetModel model = train(cfg, rng, batch_logger);
  if (!path.empty()) save_model(model, path);
  return std::make_shared<const DeepSetModel>(std::move(model));
}

RuleFn resolve_rule(const std::string& rule, const RuleRegistry& registry,
                    const EvalConfig& cfg, long tuning_instances,
                    const std::string& model_path, int train_batches) {
  if (rule == "plurality+" || rule == "borda+") {
    const BaseRule base =
        rule == "plurality+" ? BaseRule::kPlurality : BaseRule::kBorda;
    EvalConfig tuning_cfg = cfg;
    tuning_cfg.n_instances = tuning_instances;
    tuning_cfg.tuning_streams = true;
    const CountModification mod = select_best_modification(base, tuning_cfg);
    std::printf("%s tuned to %s\n", rule.c_str(), to_string(mod).c_str());
    return make_experience_weighted_rule(base, mod);
  }
  if (rule == "learned" || rule == "learned-noisy")
    return make_learned_rule(obtain_model(model_path, rule == "learned-noisy",
                                          cfg.master_seed, train_batches));
  if (!registry.contains(rule))
    throw std::invalid_argument("unknown rule: " + rule);
  return registry.at(rule);
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"maximum-likelihood vote aggregation under bandit noise",
               "banditvote"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  long instances = -1;
  int voters = 30;
  int alternatives = 10;
  double obs_variance = 1000.0;
  std::string count_noise = "none";
  int mc_samples = 100;
  std::string out;
  int threads = 0;
  std::string rule;
  std::string table_id;
  std::string model_path;
  std::string noisy_model_path;
  int train_batches = 5000;
  std::string config_path;
  long tuning_instances = 5000;
  int trials = 20;
  int budget_batches = 300;
  bool train_noise = false;

  const auto add_common = [&](CLI::App* cmd, bool with_noise) {
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--instances", instances, "number of instances");
    cmd->add_option("--voters", voters, "voters per instance");
    cmd->add_option("--alternatives", alternatives, "alternatives (arms)");
    cmd->add_option("--obs-variance", obs_variance,
                    "per-pull observation variance");
    if (with_noise)
      cmd->add_option("--count-noise", count_noise,
                      "count perturbation applied before rules see counts")
          ->check(CLI::IsMember({"none", "percentage", "replacement"}));
    cmd->add_option("--mc-samples", mc_samples,
                    "samples for the case5-mc estimator");
    cmd->add_option("--out", out, "output path");
    cmd->add_option("--threads", threads,
                    "worker threads, 0 = BANDITVOTE_THREADS or hardware");
  };

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "sample instances to a JSONL file");
  add_common(sim_cmd, false);
  sim_cmd->get_option("--out")->required();

  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "evaluate one rule on one spec");
  add_common(eval_cmd, true);
  eval_cmd->add_option("--rule", rule, "rule name")->required();
  eval_cmd->add_option("--tuning-instances", tuning_instances,
                       "tuning set size for the + rules");
  eval_cmd->add_option("--model", model_path,
                       "model file for learned rules, trained here if absent");
  eval_cmd->add_option("--train-batches", train_batches,
                       "batches when training a model on demand");

  CLI::App* table_cmd = app.add_subcommand(
      "reproduce-table", "run one of the shipped table presets");
  table_cmd->add_option("table", table_id, "preset id")
      ->required()
      ->check(CLI::IsMember({"1a", "1b", "2a", "2b"}));
  table_cmd->add_option("--seed", seed, "master seed");
  table_cmd->add_option("--instances", instances,
                        "instances per voter count, preset default 20000");
  table_cmd->add_option("--tuning-instances", tuning_instances,
                        "tuning set size for the + rules");
  table_cmd->add_option("--mc-samples", mc_samples,
                        "samples for the case5-mc estimator");
  table_cmd->add_option("--out", out, "output path, .json for JSON else CSV");
  table_cmd->add_option("--threads", threads,
                        "worker threads, 0 = BANDITVOTE_THREADS or hardware");
  table_cmd->add_option("--model", model_path, "clean-trained model file");
  table_cmd->add_option("--noisy-model", noisy_model_path,
                        "noise-trained model file");
  table_cmd->add_option("--train-batches", train_batches,
                        "batches when training a model on demand");

  CLI::App* train_cmd =
      app.add_subcommand("train", "train a model with the default protocol");
  train_cmd->add_option("--config", config_path, "training config JSON");
  train_cmd->add_option("--seed", seed, "master seed");
  train_cmd->add_option("--out", out, "model output path")->required();
  train_cmd->add_option("--batches", train_batches,
                        "override the configured batch budget");
  train_cmd->add_flag("--noise", train_noise,
                      "train with percentage count noise");

  CLI::App* search_cmd =
      app.add_subcommand("search", "random hyperparameter search");
  search_cmd->add_option("--trials", trials, "configurations to try");
  search_cmd->add_option("--seed", seed, "master seed");
  search_cmd->add_option("--budget-batches", budget_batches,
                         "training batches per trial");
  search_cmd->add_option("--out", out, "write the winning config JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(sim_cmd)) {
      if (instances < 0) instances = 100;
      SimConfig sim;
      sim.n_alternatives = alternatives;
      sim.n_voters = voters;
      sim.obs_variance = obs_variance;
      std::vector<Instance> batch;
      batch.reserve(static_cast<std::size_t>(instances));
      for (long i = 0; i < instances; ++i) {
        SeededRng rng(seed, stream::id(stream::kInstance,
                                       static_cast<std::uint64_t>(i)));
        batch.push_back(sample_instance(sim, rng));
      }
      write_instances_jsonl(batch, out);
      std::printf("wrote %ld instances to %s\n", instances, out.c_str());
    } else if (app.got_subcommand(eval_cmd)) {
      if (instances < 0) instances = 20000;
      EvalConfig cfg;
      cfg.sim.n_alternatives = alternatives;
      cfg.sim.n_voters = voters;
      cfg.sim.obs_variance = obs_variance;
      cfg.n_instances = instances;
      cfg.noise.kind = noise_kind_from_string(count_noise);
      cfg.master_seed = seed;
      cfg.mc_samples = mc_samples;
      cfg.threads = resolve_threads(threads);
      const RuleRegistry registry = default_registry();
      const RuleFn fn = resolve_rule(rule, registry, cfg, tuning_instances,
                                     model_path, train_batches);
      const RegretSummary summary = evaluate_rule(rule, fn, cfg);
      const std::string doc = summary_to_json(summary, seed) + "\n";
      if (out.empty())
        std::fputs(doc.c_str(), stdout);
      else
        write_text(out, doc);
    } else if (app.got_subcommand(table_cmd)) {
      ExperimentSpec spec = parse_preset(preset_json(table_id));
      if (instances >= 0) spec.n_instances = instances;
      spec.tuning_instances = tuning_instances;
      spec.master_seed = seed;
      spec.mc_samples = mc_samples;
      spec.threads = resolve_threads(threads);
      if (out.empty()) out = "table" + table_id + ".csv";
      RuleRegistry registry = default_registry();
      for (const std::string& r : spec.rules) {
        if (r == "learned")
          registry.add(r, make_learned_rule(obtain_model(
                              model_path, false, seed, train_batches)));
        else if (r == "learned-noisy")
          registry.add(r, make_learned_rule(obtain_model(
                              noisy_model_path, true, seed, train_batches)));
      }
      const std::string partial = out + ".partial";
      write_text(partial, "rule,m,mean_regret,accuracy,std_error,n\n");
      const ProgressFn progress = [&](const std::string& r, int m,
                                      const RegretSummary& s) {
        std::printf("%-14s m=%-4d regret %.4f acc %.4f se %.4f\n", r.c_str(),
                    m, s.mean_regret, s.accuracy, s.std_error);
        std::fflush(stdout);
        std::ofstream f(partial, std::ios::app);
        char line[160];
        std::snprintf(line, sizeof(line), "%s,%d,%.6f,%.6f,%.6f,%ld\n",
                      r.c_str(), m, s.mean_regret, s.accuracy, s.std_error,
                      s.n_instances);
        f << line << std::flush;
      };
      const ResultTable table = run_experiment(spec, registry, progress);
      write_text(out, wants_json(out) ? table_to_json(table, seed)
                                      : table_to_csv(table));
      std::filesystem::remove(partial);
      std::printf("wrote %s\n", out.c_str());
    } else if (app.got_subcommand(train_cmd)) {
      TrainConfig cfg;
      if (!config_path.empty()) cfg = load_train_config(config_path);
      if (train_cmd->count("--batches") > 0) cfg.max_batches = train_batches;
      if (train_noise) cfg.percentage_count_noise = true;
      validate(cfg);
      SeededRng rng(seed, stream::id(stream::kTrain, 0));
      const DeepSetModel model = train(cfg, rng, batch_logger);
      save_model(model, out);
      std::printf("wrote %s\n", out.c_str());
    } else if (app.got_subcommand(search_cmd)) {
      SearchParams params;
      params.n_trials = trials;
      params.budget_batches = budget_batches;
      SeededRng rng(seed, stream::id(stream::kTrain, 0));
      const SearchResult result = hyperparameter_search(params, rng);
      for (std::size_t t = 0; t < result.trials.size(); ++t) {
        const TrainConfig& c = result.trials[t].cfg;
        std::printf(
            "trial %2zu lr %.0e enc %d dec %d pool %-4s agg %-4s loss %.4f\n",
            t, c.learning_rate, c.encoder_layers, c.decoder_layers,
            to_string(c.pool).c_str(), to_string(c.agg).c_str(),
            result.trials[t].frozen_loss);
      }
      const TrainConfig& b = result.best;
      std::printf("best: lr %.0e enc %d dec %d pool %s agg %s\n",
                  b.learning_rate, b.encoder_layers, b.decoder_layers,
                  to_string(b.pool).c_str(), to_string(b.agg).c_str());
      if (!out.empty()) write_text(out, train_config_to_json(result.best));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace banditvote

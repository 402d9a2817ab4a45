// Command-line front end: scenario generation, request* precompute, PPO
// training, base-stock tuning, policy evaluation and report printing.
// Every run writes its outputs under a caller-supplied directory together
// with a digest manifest; reruns with the same inputs are bit-identical.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chainsim/demand.hpp"
#include "chainsim/manifest.hpp"
#include "chainsim/policies.hpp"
#include "chainsim/ppo.hpp"
#include "chainsim/scenario.hpp"
#include "chainsim/simulator.hpp"
#include "chainsim/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chainsim;

namespace {

// ---------------------------------------------------------------------------
// gen

void write_split(const fs::path& dir, const std::string& kind, uint64_t master,
                 const std::string& split, DemandSeries demand, int predictdays,
                 json provenance) {
  const AttributeRanges ranges;
  const ScenarioAttributes attrs =
      sample_attributes(demand, ranges, derive_seed(master, split + "-attributes"));
  Scenario s;
  s.config.kind = kind;
  s.config.seed = master;
  s.config.horizon = demand.sim_horizon;
  s.config.predictdays = predictdays;
  s.config.products = attrs.products;
  s.config.retailers = attrs.retailers;
  s.config.scale = scale_from_ranges(ranges);
  s.demand = std::move(demand);
  provenance["split"] = split;
  s.provenance = provenance.dump();
  save_scenario((dir / split).string(), s);
}

int cmd_gen_artificial(uint64_t seed, int products, int retailers, int horizon,
                       int predictdays, const fs::path& out) {
  ArtificialDemandParams params;
  params.products = products;
  params.retailers = retailers;
  params.horizon = horizon;
  params.predictdays = predictdays;
  for (const std::string split : {"train", "eval"}) {
    ArtificialDemand d =
        gen_artificial_demand(params, derive_seed(seed, split + "-demand"));
    json prov;
    prov["generator"] = "artificial";
    prov["master_seed"] = seed;
    write_split(out, "artificial", seed, split, std::move(d.series), predictdays, prov);
    std::cout << "wrote " << (out / split).string() << "\n";
  }
  return 0;
}

int cmd_gen_real(const std::string& orders_file, uint64_t seed, int products, int retailers,
                 int horizon, int predictdays, const fs::path& out) {
  IngestResult ingested = ingest_orders_file(orders_file);
  if (!ingested.row_errors.empty()) {
    std::cerr << "skipped " << ingested.row_errors.size() << " malformed rows (first: "
              << ingested.row_errors.front() << ")\n";
  }
  PreprocessParams params;
  params.product_count = products;
  params.retailer_count = retailers;
  params.horizon = horizon;
  params.predictdays = predictdays;
  PreprocessResult pre = preprocess_orders(ingested.rows, params, seed);
  for (const std::string split : {"train", "eval"}) {
    SplitData& data = split == "train" ? pre.train : pre.eval;
    json prov;
    prov["generator"] = "orders";
    prov["master_seed"] = seed;
    prov["source"] = fs::path(orders_file).filename().string();
    prov["product_ids"] = data.product_ids;
    json groups = json::array();
    for (const auto& g : data.retailer_customers) groups.push_back(g.size());
    prov["retailer_group_sizes"] = groups;
    json counts;
    for (const auto& [k, v] : pre.stage_counts) counts[k] = v;
    prov["stage_counts"] = counts;
    write_split(out, "real", seed, split, std::move(data.demand), params.predictdays, prov);
    std::cout << "wrote " << (out / split).string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// precompute / train / tune / eval / report

int cmd_precompute(const fs::path& scenario_dir) {
  const Scenario s = load_scenario(scenario_dir.string());
  const PrecomputeResult pre = precompute_request_star(s.config, s.demand);
  save_precompute(scenario_dir / "precompute", pre);
  write_manifest(scenario_dir / "precompute", {"request_star.bin", "precompute.json"});
  std::printf("maxorder %.17g\n", pre.maxorder);
  return 0;
}

PrecomputeResult need_precompute(const fs::path& scenario_dir) {
  const fs::path dir = scenario_dir / "precompute";
  require(fs::exists(dir / "request_star.bin"),
          "no precompute found in " + dir.string() + " (run the precompute command first)");
  return load_precompute(dir);
}

int cmd_train(const fs::path& scenario_dir, const fs::path& out, TrainConfig tc) {
  const Scenario s = load_scenario(scenario_dir.string());
  const PrecomputeResult pre = need_precompute(scenario_dir);
  const TrainResult result = train_ppo(s.config, s.demand, pre, tc);

  fs::create_directories(out);
  save_model(out / "model.bin", result.net);
  save_training_log(out / "training_log.tsv", result.log);
  json meta;
  meta["maxorder"] = pre.maxorder;
  meta["hidden"] = tc.hidden;
  meta["predictdays"] = s.config.predictdays;
  meta["seed"] = tc.seed;
  meta["total_steps"] = tc.total_steps;
  meta["steps_run"] = result.steps_run;
  meta["episodes"] = result.episodes;
  meta["scenario"] = scenario_dir.string();
  std::ofstream mf(out / "model_meta.json", std::ios::binary);
  require(mf.good(), "cannot write model_meta.json");
  mf << meta.dump(2) << "\n";
  mf.close();
  write_manifest(out, {"model.bin", "training_log.tsv", "model_meta.json"});
  std::printf("trained %lld steps (%d episodes), final eval %.17g\n",
              static_cast<long long>(result.steps_run), result.episodes,
              result.log.mean_reward.back());
  return 0;
}

int cmd_tune(const fs::path& scenario_dir, const fs::path& out, int budget) {
  const Scenario s = load_scenario(scenario_dir.string());
  const PrecomputeResult pre = need_precompute(scenario_dir);
  const BaseStockTune tuned = tune_base_stock(s.config, s.demand, pre, budget);

  fs::create_directories(out);
  json j;
  j["best_x"] = tuned.tune.best_x;
  j["best_gain"] = tuned.tune.best_gain;
  j["budget"] = budget;
  json hist = json::array();
  for (const TunePoint& p : tuned.tune.history) hist.push_back({{"x", p.x}, {"gain", p.gain}});
  j["history"] = hist;
  std::ofstream f(out / "tune.json", std::ios::binary);
  require(f.good(), "cannot write tune.json");
  f << j.dump(2) << "\n";
  f.close();
  write_manifest(out, {"tune.json"});
  std::printf("best_x %.17g best_gain %.17g\n", tuned.tune.best_x, tuned.tune.best_gain);
  return 0;
}

double read_tuned_x(const fs::path& tune_file) {
  std::ifstream f(tune_file, std::ios::binary);
  require(f.good(), "cannot open " + tune_file.string());
  return json::parse(f).at("best_x").get<double>();
}

int cmd_eval(const fs::path& scenario_dir, const fs::path& out, bool use_oracle,
             bool use_basestock, double x, const std::string& tune_file,
             const std::string& model_dir) {
  const Scenario s = load_scenario(scenario_dir.string());
  const PrecomputeResult pre = need_precompute(scenario_dir);
  fs::create_directories(out);

  std::vector<std::string> outputs;
  std::ofstream report(out / "report.tsv", std::ios::binary);
  require(report.good(), "cannot write report.tsv");
  report << "policy\tdaily_gain\ttotal_gain\n";
  char buf[64];
  auto add = [&](const std::string& name, OrderingPolicy& policy) {
    const EpisodeTrace trace = simulate_full(s.config, s.demand, policy);
    const std::string trace_name = "trace_" + name + ".tsv";
    export_trace(out / trace_name, trace);
    outputs.push_back(trace_name);
    report << name;
    std::snprintf(buf, sizeof buf, "%.17g", trace.daily_gain());
    report << '\t' << buf;
    std::snprintf(buf, sizeof buf, "%.17g", trace.total_gain());
    report << '\t' << buf << '\n';
    std::printf("%s daily_gain %.17g\n", name.c_str(), trace.daily_gain());
  };

  if (use_oracle) {
    OraclePolicy oracle(pre);
    add("oracle", oracle);
  }
  if (use_basestock) {
    const double xv = tune_file.empty() ? x : read_tuned_x(tune_file);
    require(xv >= 0.0, "base-stock multiplier must be >= 0");
    BaseStockPolicy policy(compute_base_stock_values(s.config, pre, xv));
    add("basestock", policy);
  }
  if (!model_dir.empty()) {
    // the action decode constant belongs to the scenario being evaluated,
    // so a checkpoint trained elsewhere orders in this scenario's units
    const fs::path file = fs::path(model_dir) / "model.bin";
    require(fs::exists(file), "missing model checkpoint " + file.string());
    NeuralOrderingPolicy policy(load_model(file), pre.maxorder);
    add("model", policy);
  }
  require(report.good(), "write to report.tsv failed");
  report.close();
  outputs.push_back("report.tsv");
  write_manifest(out, outputs);
  return 0;
}

int cmd_report(const std::string& log_file, const std::string& eval_dir) {
  require(!log_file.empty() || !eval_dir.empty(), "pass a training log or an eval directory");
  if (!log_file.empty()) {
    const TrainingLog log = load_training_log(log_file);
    std::printf("%12s %16s %16s\n", "step", "mean_reward", "ma50");
    double window_sum = 0.0;
    std::vector<double> window;
    for (std::size_t i = 0; i < log.step.size(); ++i) {
      window.push_back(log.mean_reward[i]);
      window_sum += log.mean_reward[i];
      if (window.size() > 50) {
        window_sum -= window[window.size() - 51];
      }
      const std::size_t n = std::min<std::size_t>(window.size(), 50);
      double ma = 0.0;
      for (std::size_t j = window.size() - n; j < window.size(); ++j) ma += window[j];
      ma /= n;
      std::printf("%12lld %16.6f %16.6f\n", static_cast<long long>(log.step[i]),
                  log.mean_reward[i], ma);
    }
  }
  if (!eval_dir.empty()) {
    std::ifstream f(fs::path(eval_dir) / "report.tsv", std::ios::binary);
    require(f.good(), "cannot open report.tsv in " + eval_dir);
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
      std::istringstream row(line);
      std::string policy, daily, total;
      std::getline(row, policy, '\t');
      std::getline(row, daily, '\t');
      std::getline(row, total, '\t');
      if (header) {
        std::printf("%-12s %18s %18s\n", policy.c_str(), daily.c_str(), total.c_str());
        header = false;
      } else {
        std::printf("%-12s %18.6f %18.6f\n", policy.c_str(), std::stod(daily),
                    std::stod(total));
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warehouse ordering simulator and training harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate train/ and eval/ scenario directories");
  std::string gen_kind = "artificial";
  std::string gen_orders;
  std::string gen_out;
  uint64_t gen_seed = 1;
  int gen_products = 20, gen_retailers = 20, gen_horizon = 300, gen_predictdays = 14;
  gen->add_option("--kind", gen_kind, "artificial or real")
      ->check(CLI::IsMember({"artificial", "real"}));
  gen->add_option("--orders", gen_orders, "order-history file (kind=real)");
  gen->add_option("--seed", gen_seed, "master seed");
  gen->add_option("--products", gen_products,
                  "products per split (artificial) or kept overall before the split (real)");
  gen->add_option("--retailers", gen_retailers,
                  "retailers per split (artificial) or customer groups overall (real)");
  gen->add_option("--horizon", gen_horizon, "simulated days");
  gen->add_option("--predictdays", gen_predictdays, "prediction window");
  gen->add_option("--out", gen_out, "output directory")->required();

  // precompute
  auto* prec = app.add_subcommand("precompute", "Run the infinite-warehouse request* pass");
  std::string prec_scenario;
  prec->add_option("--scenario", prec_scenario, "scenario directory")->required();

  // train
  auto* train = app.add_subcommand("train", "Train the ordering policy with PPO");
  std::string train_scenario, train_out;
  TrainConfig tc;
  tc.seed = 1;
  train->add_option("--scenario", train_scenario, "scenario directory")->required();
  train->add_option("--out", train_out, "run output directory")->required();
  train->add_option("--steps", tc.total_steps, "total environment steps");
  train->add_option("--eval-every", tc.eval_every, "steps between greedy evaluations");
  train->add_option("--eval-products", tc.eval_products, "products per evaluation");
  train->add_option("--seed", tc.seed, "training seed");
  train->add_option("--lr", tc.lr, "initial learning rate");
  train->add_option("--hidden", tc.hidden, "hidden layer width");
  train->add_option("--gamma", tc.gamma, "discount factor");
  train->add_option("--gae-lambda", tc.gae_lambda, "advantage smoothing");
  train->add_option("--clip", tc.ppo.clip, "surrogate clip range");
  train->add_option("--epochs", tc.ppo.epochs, "update epochs per episode");
  train->add_option("--minibatch", tc.ppo.minibatch, "minibatch size");
  train->add_option("--entropy-coef", tc.ppo.entropy_coef, "entropy bonus weight");
  train->add_option("--value-coef", tc.ppo.value_coef, "value loss weight");

  // tune
  auto* tune = app.add_subcommand("tune", "Tune the base-stock multiplier");
  std::string tune_scenario, tune_out;
  int tune_budget = 20;
  tune->add_option("--scenario", tune_scenario, "scenario directory")->required();
  tune->add_option("--out", tune_out, "output directory")->required();
  tune->add_option("--budget", tune_budget, "objective evaluations");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate policies on the full simulator");
  std::string eval_scenario, eval_out, eval_tune_file, eval_model;
  bool eval_oracle = false, eval_basestock = false;
  double eval_x = 1.0;
  eval->add_option("--scenario", eval_scenario, "scenario directory")->required();
  eval->add_option("--out", eval_out, "output directory")->required();
  eval->add_flag("--oracle", eval_oracle, "evaluate the clairvoyant upper bound");
  eval->add_flag("--basestock", eval_basestock, "evaluate the base-stock policy");
  eval->add_option("--x", eval_x, "base-stock multiplier (with --basestock)");
  eval->add_option("--tune-file", eval_tune_file, "tune.json to read the multiplier from");
  eval->add_option("--model", eval_model, "training run directory with model.bin");

  // report
  auto* report = app.add_subcommand("report", "Print a training log or eval report");
  std::string report_log, report_eval;
  report->add_option("--log", report_log, "training_log.tsv path");
  report->add_option("--eval", report_eval, "eval output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_kind == "artificial")
        return cmd_gen_artificial(gen_seed, gen_products, gen_retailers, gen_horizon,
                                  gen_predictdays, gen_out);
      require(!gen_orders.empty(), "kind=real needs --orders");
      return cmd_gen_real(gen_orders, gen_seed, gen_products, gen_retailers, gen_horizon,
                          gen_predictdays, gen_out);
    }
    if (prec->parsed()) return cmd_precompute(prec_scenario);
    if (train->parsed()) return cmd_train(train_scenario, train_out, tc);
    if (tune->parsed()) return cmd_tune(tune_scenario, tune_out, tune_budget);
    if (eval->parsed()) {
      require(eval_oracle || eval_basestock || !eval_model.empty(),
              "pick at least one policy (--oracle, --basestock, --model)");
      return cmd_eval(eval_scenario, eval_out, eval_oracle, eval_basestock, eval_x,
                      eval_tune_file, eval_model);
    }
    if (report->parsed()) return cmd_report(report_log, report_eval);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

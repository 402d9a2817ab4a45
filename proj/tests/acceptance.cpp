// Acceptance gate: ten end-to-end checks over the whole stack, one printed
// pass/fail line each. The heavy part is the desk-scale training comparison
// (three PPO seeds against the tuned base-stock baseline on held-out data);
// everything else is exact invariants, cross-checks against the naive
// reference simulator, gradient checks and a step-time scaling measurement.
//
// Prints progress to stderr while it works, then the ten result lines to
// stdout in order. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainsim/demand.hpp"
#include "chainsim/errors.hpp"
#include "chainsim/mlp.hpp"
#include "chainsim/policies.hpp"
#include "chainsim/ppo.hpp"
#include "chainsim/scenario.hpp"
#include "chainsim/simulator.hpp"
#include "chainsim/tensor.hpp"
#include "chainsim/tuner.hpp"
#include "reference_sim.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace chainsim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// Scenario builders

struct Scen {
  ScenarioConfig cfg;
  DemandSeries demand;
  PrecomputeResult pre;
};

Scen finish_scenario(std::string kind, uint64_t master, DemandSeries demand,
                     const ScenarioAttributes& attrs) {
  Scen s;
  s.cfg.kind = std::move(kind);
  s.cfg.seed = master;
  s.cfg.horizon = demand.sim_horizon;
  s.cfg.predictdays = 14;
  s.cfg.products = attrs.products;
  s.cfg.retailers = attrs.retailers;
  s.cfg.scale = scale_from_ranges(AttributeRanges{});
  s.demand = std::move(demand);
  s.pre = precompute_request_star(s.cfg, s.demand);
  return s;
}

// 20 products x 20 retailers x 300 days of seasonal demand, one independent
// draw per split; the same seed derivation the command-line generator uses.
Scen artificial_split(uint64_t master, const std::string& split) {
  ArtificialDemandParams p;
  p.products = 20;
  p.retailers = 20;
  p.horizon = 300;
  p.predictdays = 14;
  ArtificialDemand d = gen_artificial_demand(p, derive_seed(master, split + "-demand"));
  const ScenarioAttributes attrs = sample_attributes(
      d.series, AttributeRanges{}, derive_seed(master, split + "-attributes"));
  return finish_scenario("artificial", master, std::move(d.series), attrs);
}

// Synthetic order history through the full ingestion and preprocessing
// pipeline, split into disjoint train and eval scenarios.
std::pair<Scen, Scen> real_splits(uint64_t master) {
  const fs::path dir = testsup::temp_dir("chainsim_acceptance");
  const fs::path file = testsup::write_orders_fixture(dir / "orders.csv");
  const IngestResult ingested = ingest_orders_file(file.string());

  PreprocessParams params;
  params.product_count = 4;
  params.retailer_count = 6;
  params.horizon = 300;
  params.predictdays = 14;
  // Each split keeps half the products and half the retailer groups, so with
  // this per-product mass a split sees roughly 280 kg/day/product; that puts
  // total lack well above the sampled trucksize band and trucks dispatch on
  // most days. The default mass is sized for far wider scenarios and would
  // leave this 4x6 fixture without a single truck day.
  params.per_product_total = 200000.0;
  PreprocessResult pre = preprocess_orders(ingested.rows, params, master);

  const ScenarioAttributes train_attrs = sample_attributes(
      pre.train.demand, AttributeRanges{}, derive_seed(master, "train-attributes"));
  const ScenarioAttributes eval_attrs = sample_attributes(
      pre.eval.demand, AttributeRanges{}, derive_seed(master, "eval-attributes"));
  Scen train = finish_scenario("real", master, std::move(pre.train.demand), train_attrs);
  Scen eval = finish_scenario("real", master, std::move(pre.eval.demand), eval_attrs);
  return {std::move(train), std::move(eval)};
}

// ---------------------------------------------------------------------------
// Policies used by the cross-checks

class ScriptedPolicy final : public OrderingPolicy {
 public:
  ScriptedPolicy(std::vector<double> orders, int products)
      : orders_(std::move(orders)), products_(products) {}

  double order_quantity(int day, int product, double, std::span<const double>) override {
    const std::size_t n = static_cast<std::size_t>(day) * products_ + product;
    return n < orders_.size() ? orders_[n] : 0.0;
  }

 private:
  std::vector<double> orders_;
  int products_;
};

// ---------------------------------------------------------------------------
// Random small instances shared by the fidelity and equivalence checks

struct RandomInstance {
  ScenarioConfig cfg;
  DemandSeries demand;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_p, int max_r, int min_t,
                               int max_t, double truck_lo, double truck_hi) {
  std::uniform_real_distribution<double> price(1.0, 10.0), cost(0.05, 0.5);
  std::uniform_real_distribution<double> truck(truck_lo, truck_hi), bs(15.0, 60.0);
  std::uniform_real_distribution<double> dem(0.0, 12.0);
  const int P = 1 + static_cast<int>(rng() % max_p);
  const int R = 1 + static_cast<int>(rng() % max_r);
  const int T = min_t + static_cast<int>(rng() % (max_t - min_t + 1));
  const int pd = 2;

  std::vector<ProductSpec> products;
  for (int k = 0; k < P; ++k)
    products.push_back(testsup::product(price(rng), cost(rng), 1 + static_cast<int>(rng() % 5)));
  std::vector<RetailerSpec> retailers;
  for (int i = 0; i < R; ++i) {
    std::vector<double> b(static_cast<std::size_t>(P));
    for (int k = 0; k < P; ++k) b[static_cast<std::size_t>(k)] = bs(rng);
    retailers.push_back(testsup::retailer(truck(rng), 1 + static_cast<int>(rng() % 3), b));
  }

  RandomInstance inst;
  inst.cfg = testsup::make_config(std::move(products), std::move(retailers), T, pd);
  inst.demand.t_ext = T + pd;
  inst.demand.products = P;
  inst.demand.retailers = R;
  inst.demand.sim_horizon = T;
  inst.demand.values = Tensor3(T + pd, P, R);
  for (double& v : inst.demand.values.data()) v = dem(rng);
  return inst;
}

// ---------------------------------------------------------------------------
// Criterion bodies. Each returns pass plus a one-line detail.

using Verdict = std::pair<bool, std::string>;

// 1: the clairvoyant policy holds zero end-of-day stock and fills every
// request, on the artificial scenarios and on the preprocessed real-schema
// scenarios, in under ten seconds of simulation time.
Verdict check_oracle_zero(const std::vector<const Scen*>& scens) {
  const auto t0 = Clock::now();
  for (const Scen* s : scens) {
    OraclePolicy oracle(s->pre);
    const EpisodeTrace trace = simulate_full(s->cfg, s->demand, oracle, true);
    for (double c : trace.inventory_cost)
      if (c != 0.0) return {false, fmt("nonzero inventory cost %.17g", c)};
    for (std::size_t n = 0; n < trace.gain.size(); ++n)
      if (trace.gain[n] != trace.profit[n])
        return {false, "gain != profit with zero inventory cost"};
    for (std::size_t n = 0; n < trace.ship_total.size(); ++n)
      if (trace.ship_total[n] != trace.request_total[n])
        return {false, fmt("short shipment at row %zu", n)};
    for (int t = 0; t < trace.horizon; ++t)
      for (int k = 0; k < trace.products; ++k)
        for (int i = 0; i < static_cast<int>(s->cfg.retailers.size()); ++i)
          if (trace.ships.at(t, k, i) != trace.requests.at(t, k, i))
            return {false, "per-retailer shipment differs from request"};
  }
  const double secs = seconds_since(t0);
  if (secs >= 10.0) return {false, fmt("oracle runs took %.1f s (budget 10 s)", secs)};
  return {true, fmt("%zu scenarios, zero stock cost, every request filled, %.2f s",
                    scens.size(), secs)};
}

// Shared training artifacts for criteria 2, 3 and 10.
struct TrainedAgents {
  std::vector<TrainResult> seeds;
  double tuned_x_art = 0.0;
  double tuned_x_real = 0.0;
  double train_secs = 0.0;
};

TrainedAgents train_agents(const Scen& art_train, const Scen& real_train) {
  TrainedAgents out;
  const auto t0 = Clock::now();
  out.tuned_x_art = tune_base_stock(art_train.cfg, art_train.demand, art_train.pre, 20)
                        .tune.best_x;
  out.tuned_x_real = tune_base_stock(real_train.cfg, real_train.demand, real_train.pre, 20)
                         .tune.best_x;
  for (uint64_t seed : {1, 2, 3}) {
    TrainConfig tc;  // 200k environment steps, defaults everywhere else
    tc.seed = seed;
    std::fprintf(stderr, "  training seed %llu...\n", static_cast<unsigned long long>(seed));
    out.seeds.push_back(train_ppo(art_train.cfg, art_train.demand, art_train.pre, tc));
  }
  out.train_secs = seconds_since(t0);
  return out;
}

double eval_gain(const Scen& s, OrderingPolicy& policy) {
  return simulate_full(s.cfg, s.demand, policy).total_gain();
}

// 2: the clairvoyant upper bound dominates the tuned base-stock policy and
// every trained agent on both evaluation scenarios.
Verdict check_dominance(const Scen& art_eval, const Scen& real_eval,
                        const TrainedAgents& agents) {
  double worst_margin = std::numeric_limits<double>::infinity();
  int compared = 0;
  for (const auto& [scen, x] : {std::pair<const Scen*, double>{&art_eval, agents.tuned_x_art},
                                {&real_eval, agents.tuned_x_real}}) {
    OraclePolicy oracle(scen->pre);
    const double g_oracle = eval_gain(*scen, oracle);
    const double slack = 1e-6 * std::max(1.0, std::abs(g_oracle));

    std::vector<double> rivals;
    BaseStockPolicy bs(compute_base_stock_values(scen->cfg, scen->pre, x));
    rivals.push_back(eval_gain(*scen, bs));
    for (const TrainResult& r : agents.seeds) {
      NeuralOrderingPolicy agent(r.net, scen->pre.maxorder);
      rivals.push_back(eval_gain(*scen, agent));
    }
    for (double g : rivals) {
      ++compared;
      worst_margin = std::min(worst_margin, g_oracle - g);
      if (g_oracle + slack < g)
        return {false, fmt("policy gain %.1f exceeds oracle %.1f", g, g_oracle)};
    }
  }
  return {true, fmt("%d policies on 2 scenarios, smallest oracle margin %.1f", compared,
                    worst_margin)};
}

// 3: with the desk-scale budget (300-day scenario, 2e5 steps, three seeds)
// the trained agent's mean gain on held-out data beats the tuned base-stock
// policy. The whole phase must fit in 30 minutes.
Verdict check_desk_scale(const Scen& art_eval, const TrainedAgents& agents) {
  BaseStockPolicy bs(compute_base_stock_values(art_eval.cfg, art_eval.pre,
                                               agents.tuned_x_art));
  const double g_bs = eval_gain(art_eval, bs);

  double sum = 0.0;
  std::string per_seed;
  for (const TrainResult& r : agents.seeds) {
    NeuralOrderingPolicy agent(r.net, art_eval.pre.maxorder);
    const double g = eval_gain(art_eval, agent);
    sum += g;
    per_seed += fmt(" %.0f", g);
  }
  const double mean = sum / static_cast<double>(agents.seeds.size());

  const std::string detail =
      fmt("agent mean %.0f (seeds%s) vs tuned base-stock %.0f (x=%.3f), %.0f s",
          mean, per_seed.c_str(), g_bs, agents.tuned_x_art, agents.train_secs);
  if (agents.train_secs >= 1800.0)
    return {false, detail + " - training phase over the 30 min budget"};
  return {mean > g_bs, detail};
}

// 4: on a shared infinite-warehouse trajectory the schedule-based
// approximate request agrees with the exact truck-normalized request in
// sign everywhere, and on truck days up to the factor trucksize/total-lack.
Verdict check_approximation(int scenarios) {
  std::mt19937_64 rng(40404);
  double worst = 0.0;
  long points = 0;
  for (int n = 0; n < scenarios; ++n) {
    const RandomInstance inst = random_instance(rng, 5, 5, 10, 50, 5.0, 45.0);
    const PrecomputeResult pre = precompute_request_star(inst.cfg, inst.demand);
    const refsim::Setup ref = testsup::to_refsim(inst.cfg, inst.demand);
    const refsim::InfiniteDetail det = refsim::infinite_warehouse_detail(
        inst.cfg.horizon, ref.products, ref.retailers, ref.demand);

    const int P = static_cast<int>(inst.cfg.products.size());
    const int R = static_cast<int>(inst.cfg.retailers.size());
    for (int t = 0; t < inst.cfg.horizon; ++t)
      for (int i = 0; i < R; ++i) {
        const bool truck = pre.schedule.truck_day(t, i);
        for (int k = 0; k < P; ++k) {
          const double request = det.requests[t][k][i];
          if (pre.request_star.at(t, k, i) != request)
            return {false, fmt("request* differs from reference at t=%d k=%d i=%d", t, k, i)};
          const double approx = approx_request(pre.schedule, t, i, det.lacks[t][k][i]);
          ++points;
          if ((approx > 0.0) != (request > 0.0))
            return {false, fmt("sign mismatch at t=%d k=%d i=%d", t, k, i)};
          if (truck && det.lack_total[t][i] > 0.0) {
            const double expected =
                inst.cfg.retailers[i].trucksize / det.lack_total[t][i] * approx;
            const double err =
                std::abs(request - expected) / std::max(1.0, std::abs(request));
            worst = std::max(worst, err);
            if (err > 1e-9)
              return {false, fmt("truck-day ratio off by %.3g at t=%d k=%d i=%d", err, t, k, i)};
          }
        }
      }
  }
  return {true, fmt("%d scenarios, %ld points, worst truck-day ratio error %.2g", scenarios,
                    points, worst)};
}

// 5: the training environment's per-step cost does not grow with the product
// count (R fixed): mean step time at P=100 under 1.5x the mean at P=10.
double mean_step_ns(int P, int R, int T, long target_steps) {
  DemandSeries demand = testsup::make_series(T + 7, P, R, T, [](int, int, int) { return 8.0; });
  ScenarioConfig cfg = testsup::make_config(testsup::busy_products(P),
                                            testsup::busy_retailers(R, P), T, 7);
  const PrecomputeResult pre = precompute_request_star(cfg, demand);
  cfg.scale.kilograms = pre.maxorder;
  const Tensor3 predictions = build_predictions(demand, cfg.predictdays);
  ApproxEnv env(cfg, demand, pre.schedule, predictions);
  const double big = pre.maxorder;

  auto episode = [&](int product, bool timed, long& steps, double& ns) {
    env.reset(product);
    const auto t0 = Clock::now();
    bool done = false;
    long n = 0;
    while (!done) {
      done = env.step((n & 1) ? big : 0.0).done;
      ++n;
    }
    if (timed) {
      ns += std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
      steps += n;
    }
  };

  long warm_steps = 0;
  double warm_ns = 0.0;
  episode(0, false, warm_steps, warm_ns);

  double best = std::numeric_limits<double>::infinity();
  for (int run = 0; run < 2; ++run) {
    long steps = 0;
    double ns = 0.0;
    int product = 0;
    while (steps < target_steps) {
      episode(product, true, steps, ns);
      product = (product + 1) % P;
    }
    best = std::min(best, ns / static_cast<double>(steps));
  }
  return best;
}

Verdict check_step_scaling() {
  const long steps = 20000;
  const double ns10 = mean_step_ns(10, 50, 50, steps);
  const double ns100 = mean_step_ns(100, 50, 50, steps);
  const double ratio = ns100 / ns10;
  return {ratio < 1.5, fmt("P=10: %.0f ns/step, P=100: %.0f ns/step, ratio %.2f (budget 1.5)",
                           ns10, ns100, ratio)};
}

// 6: the optimized simulator reproduces the naive reference day loop bit for
// bit on random small instances under scripted and base-stock ordering.
Verdict check_reference_equivalence(int instances) {
  std::mt19937_64 rng(60606);
  std::uniform_real_distribution<double> order_u(0.0, 18.0), x_u(0.3, 2.5);
  for (int n = 0; n < instances; ++n) {
    const RandomInstance inst = random_instance(rng, 4, 4, 5, 30, 8.0, 60.0);
    const int P = static_cast<int>(inst.cfg.products.size());
    const int R = static_cast<int>(inst.cfg.retailers.size());
    const int T = inst.cfg.horizon;

    refsim::Setup ref = testsup::to_refsim(inst.cfg, inst.demand);
    EpisodeTrace trace;
    if (n % 2 == 0) {
      std::vector<double> orders(static_cast<std::size_t>(T) * P);
      for (double& o : orders) o = (rng() % 4 == 0) ? 0.0 : order_u(rng);
      ScriptedPolicy policy(orders, P);
      ref.order_policy = [orders, P](int t, int k, double) {
        return orders[static_cast<std::size_t>(t) * P + k];
      };
      trace = simulate_full(inst.cfg, inst.demand, policy, true);
    } else {
      const PrecomputeResult pre = precompute_request_star(inst.cfg, inst.demand);
      const Eigen::ArrayXd values = compute_base_stock_values(inst.cfg, pre, x_u(rng));
      std::vector<double> v(values.data(), values.data() + values.size());
      BaseStockPolicy policy(values);
      ref.order_policy = [v](int, int k, double position) {
        return std::max(0.0, v[static_cast<std::size_t>(k)] - position);
      };
      trace = simulate_full(inst.cfg, inst.demand, policy, true);
    }

    const refsim::Result expect = refsim::simulate(ref);
    for (int t = 0; t < T; ++t)
      for (int k = 0; k < P; ++k) {
        const refsim::Row& row = expect.rows[static_cast<std::size_t>(t) * P + k];
        const std::size_t idx = trace.idx(t, k);
        if (trace.order[idx] != row.order || trace.request_total[idx] != row.request_total ||
            trace.ship_total[idx] != row.ship_total || trace.stock[idx] != row.stock ||
            trace.profit[idx] != row.profit ||
            trace.inventory_cost[idx] != row.inventory_cost || trace.gain[idx] != row.gain)
          return {false, fmt("row mismatch at instance %d t=%d k=%d", n, t, k)};
        for (int i = 0; i < R; ++i)
          if (trace.requests.at(t, k, i) != expect.requests[idx][i] ||
              trace.ships.at(t, k, i) != expect.ships[idx][i])
            return {false, fmt("tensor mismatch at instance %d t=%d k=%d i=%d", n, t, k, i)};
      }
  }
  return {true, fmt("%d random instances bit-identical to the reference", instances)};
}

// 7: conservation and nonnegativity of the single-day kernels under a
// million randomized transitions (absolute tolerance 1e-9).
Verdict check_conservation(long transitions) {
  std::mt19937_64 rng(70707);
  std::uniform_real_distribution<double> stock_u(0.0, 50.0), pipe_u(0.0, 30.0);
  std::uniform_real_distribution<double> order_u(0.0, 40.0), req_u(0.0, 20.0);
  std::uniform_real_distribution<double> demand_u(0.0, 30.0), bs_u(1.0, 60.0);
  std::uniform_real_distribution<double> transit_u(0.0, 50.0), truck_u(5.0, 60.0);
  const double tol = 1e-9;
  double worst = 0.0;
  auto track = [&](double residual) { worst = std::max(worst, std::abs(residual)); };

  for (long n = 0; n < transitions; ++n) {
    // warehouse side
    {
      const int R = 1 + static_cast<int>(rng() % 6);
      const int L = 1 + static_cast<int>(rng() % 5);
      WarehouseProductState st = make_warehouse_state(L, stock_u(rng));
      for (Eigen::Index j = 0; j < L; ++j) st.pipeline[j] = pipe_u(rng);
      const double scale = (n % 3 == 0) ? 8.0 : ((n % 3 == 1) ? 1.0 : 0.2);
      ArrayXd req(R);
      for (int i = 0; i < R; ++i) req[i] = (rng() % 5 == 0) ? 0.0 : scale * req_u(rng);
      const double order = order_u(rng);
      const ProductSpec spec = testsup::product(3.0, 0.2, L);

      const double stock_plus = st.stock + st.pipeline[0];
      const WarehouseDayResult r = warehouse_day(st, spec, order, req);
      const double shipped = seq_sum(r.shipments);
      const double total_req = seq_sum(req);

      for (int i = 0; i < R; ++i) {
        if (r.shipments[i] < 0.0) return {false, "negative shipment"};
        if (r.shipments[i] > req[i] + tol) return {false, "shipment above request"};
      }
      if (shipped > stock_plus + tol) return {false, "shipped more than available"};
      if (r.state.stock < 0.0) return {false, "negative warehouse stock"};
      if (total_req <= stock_plus) {
        track(r.state.stock + shipped - stock_plus);
        if (std::abs(r.state.stock + shipped - stock_plus) > tol)
          return {false, "warehouse mass balance broken"};
      } else {
        // everything available leaves the warehouse, up to rounding in the
        // proportional split
        track(r.state.stock);
        if (r.state.stock > tol) return {false, "rationing left stock behind"};
        track(shipped + r.state.stock - stock_plus);
        if (std::abs(shipped + r.state.stock - stock_plus) > tol)
          return {false, "rationing did not ship the available stock"};
      }
      if (r.state.pipeline[L - 1] != order) return {false, "order not appended"};
      for (Eigen::Index j = 0; j + 1 < L; ++j)
        if (r.state.pipeline[j] != st.pipeline[j + 1]) return {false, "pipeline shift broken"};
      if (r.gain.gain != r.gain.profit - r.gain.inventory_cost)
        return {false, "gain identity broken"};
    }
    // retailer side
    {
      const double stock = stock_u(rng);
      const double demand = demand_u(rng);
      const SellResult sold = retailer_sell(stock, demand);
      if (sold.sales < 0.0 || sold.remaining < 0.0) return {false, "negative sale or stock"};
      if (sold.sales > demand + tol || sold.sales > stock + tol)
        return {false, "sold more than demand or stock"};
      track(sold.sales + sold.remaining - stock);
      if (std::abs(sold.sales + sold.remaining - stock) > tol)
        return {false, "retailer mass balance broken"};

      const double bs = bs_u(rng);
      const double lack = retailer_lack(bs, sold.remaining, transit_u(rng));
      if (lack < 0.0 || lack > bs + tol) return {false, "lack out of range"};

      const int P = 1 + static_cast<int>(rng() % 6);
      ArrayXd lacks(P);
      for (int k = 0; k < P; ++k) lacks[k] = (rng() % 4 == 0) ? 0.0 : req_u(rng);
      const double trucksize = truck_u(rng);
      const ArrayXd reqs = retailer_requests(lacks, trucksize);
      const double total = seq_sum(reqs);
      if (total > 0.0) {
        track(total - trucksize);
        if (std::abs(total - trucksize) > tol) return {false, "truck load differs from capacity"};
        for (int k = 0; k < P; ++k) {
          if (reqs[k] < 0.0 || reqs[k] > lacks[k] + tol) return {false, "request out of range"};
          if ((reqs[k] > 0.0) != (lacks[k] > 0.0)) return {false, "request support differs"};
        }
      } else {
        for (int k = 0; k < P; ++k)
          if (reqs[k] != 0.0) return {false, "partial truck dispatched"};
      }
    }
  }
  return {true, fmt("%ld transitions, worst balance residual %.2g", transitions, worst)};
}

// 8: analytic backpropagation against central finite differences on
// randomized tiny networks, every parameter entry.
Verdict check_gradients() {
  std::mt19937_64 rng(80808);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  long checked = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int input = 2 + trial % 4;
    const int hidden = 3 + (trial * 2) % 4;
    PolicyNet net(input, hidden, 8000 + static_cast<uint64_t>(trial));
    Eigen::VectorXd x(input);
    for (int j = 0; j < input; ++j) x[j] = u(rng);
    const Eigen::Vector2d wl(u(rng), u(rng));
    const double wv = u(rng);

    const auto loss = [&](const PolicyNet& n) {
      const PolicyNet::Activations a = n.forward(x);
      return wl.dot(a.logits) + wv * a.value;
    };

    PolicyNet::Params grads = net.zero_like();
    net.backward(net.forward(x), wl, wv, grads);

    for (int b = 0; b < PolicyNet::kBlockCount; ++b) {
      Eigen::MatrixXd& block = net.params()[static_cast<std::size_t>(b)];
      for (Eigen::Index r = 0; r < block.rows(); ++r)
        for (Eigen::Index c = 0; c < block.cols(); ++c) {
          const double keep = block(r, c);
          const double h = 1e-6;
          block(r, c) = keep + h;
          const double up = loss(net);
          block(r, c) = keep - h;
          const double dn = loss(net);
          block(r, c) = keep;
          const double fd = (up - dn) / (2.0 * h);
          const double g = grads[static_cast<std::size_t>(b)](r, c);
          const double err = std::abs(g - fd) / (1.0 + std::max(std::abs(g), std::abs(fd)));
          worst = std::max(worst, err);
          ++checked;
          if (err > 1e-4)
            return {false, fmt("gradient off by %.3g at net %d block %d (%ld, %ld)", err,
                               trial, b, static_cast<long>(r), static_cast<long>(c))};
        }
    }
  }
  return {true, fmt("5 networks, %ld entries, worst relative error %.2g", checked, worst)};
}

// 9: on constant demand the tuner lands on the multiplier that exactly
// matches inflow to outflow, cross-checked against a dense sweep.
Verdict check_tuner() {
  const ScenarioConfig cfg = testsup::constant_config(4.0, 3, 60);
  const DemandSeries demand = testsup::constant_series(4.0, 60, 14);
  const PrecomputeResult pre = precompute_request_star(cfg, demand);

  const BaseStockTune tuned = tune_base_stock(cfg, demand, pre, 24);

  double dense_best_x = 0.0;
  double dense_best_gain = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 800; ++j) {
    const double x = 4.0 * static_cast<double>(j) / 800.0;
    BaseStockPolicy policy(compute_base_stock_values(cfg, pre, x));
    const double gain = simulate_full(cfg, demand, policy).daily_gain();
    if (gain > dense_best_gain) {
      dense_best_gain = gain;
      dense_best_x = x;
    }
  }

  const std::string detail = fmt("tuned x=%.4f gain %.4f, dense sweep x=%.4f gain %.4f",
                                 tuned.tune.best_x, tuned.tune.best_gain, dense_best_x,
                                 dense_best_gain);
  const bool in_band = tuned.tune.best_x >= 0.9 && tuned.tune.best_x <= 1.1;
  const bool dense_agrees = dense_best_x >= 0.9 && dense_best_x <= 1.1;
  const bool matched_peak =
      tuned.tune.best_gain >= dense_best_gain - 1e-9 * std::max(1.0, std::abs(dense_best_gain));
  return {in_band && dense_agrees && matched_peak, detail};
}

// 10: the training log's last-decile mean reward beats the first decile for
// at least two of the three seeds.
Verdict check_learning_progress(const TrainedAgents& agents) {
  int improved = 0;
  std::string per_seed;
  for (std::size_t s = 0; s < agents.seeds.size(); ++s) {
    const TrainingLog& log = agents.seeds[s].log;
    const int n = static_cast<int>(log.mean_reward.size());
    if (n < 2) return {false, "training log too short"};
    const int d = std::max(1, n / 10);
    double first = 0.0, last = 0.0;
    for (int j = 0; j < d; ++j) {
      first += log.mean_reward[static_cast<std::size_t>(j)];
      last += log.mean_reward[static_cast<std::size_t>(n - d + j)];
    }
    first /= d;
    last /= d;
    const bool up = last > first;
    improved += up ? 1 : 0;
    per_seed += fmt(" seed%zu %.0f->%.0f", s + 1, first, last);
  }
  return {improved >= 2, fmt("%d/3 seeds improved:%s", improved, per_seed.c_str())};
}

}  // namespace

int main() {
  struct Line {
    bool pass = false;
    std::string text = "not run";
  };
  std::vector<Line> lines(10);
  const auto set = [&](int idx, const char* name, const Verdict& v) {
    lines[static_cast<std::size_t>(idx - 1)] = {v.first, std::string(name) + ": " + v.second};
  };
  const auto guarded = [&](int idx, const char* name, const std::function<Verdict()>& fn) {
    std::fprintf(stderr, "[acceptance] %d %s\n", idx, name);
    try {
      set(idx, name, fn());
    } catch (const std::exception& e) {
      set(idx, name, {false, std::string("exception: ") + e.what()});
    }
  };

  try {
    std::fprintf(stderr, "[acceptance] building scenarios\n");
    const Scen art_train = artificial_split(2024, "train");
    const Scen art_eval = artificial_split(2024, "eval");
    auto [real_train, real_eval] = real_splits(7);

    guarded(1, "oracle holds zero stock and fills every request", [&] {
      return check_oracle_zero({&art_train, &art_eval, &real_train, &real_eval});
    });

    std::fprintf(stderr, "[acceptance] tuning and training (three seeds, 2e5 steps each)\n");
    TrainedAgents agents;
    bool trained = false;
    try {
      agents = train_agents(art_train, real_train);
      trained = true;
    } catch (const std::exception& e) {
      const Verdict v{false, std::string("training failed: ") + e.what()};
      set(2, "oracle gain dominates every evaluated policy", v);
      set(3, "trained agent beats tuned base-stock on held-out data", v);
      set(10, "training reward rises from first to last decile", v);
    }
    if (trained) {
      guarded(2, "oracle gain dominates every evaluated policy",
              [&] { return check_dominance(art_eval, real_eval, agents); });
      guarded(3, "trained agent beats tuned base-stock on held-out data",
              [&] { return check_desk_scale(art_eval, agents); });
      guarded(10, "training reward rises from first to last decile",
              [&] { return check_learning_progress(agents); });
    }

    guarded(4, "schedule approximation keeps request sign and truck ratio",
            [&] { return check_approximation(120); });
    guarded(5, "training env step time stays flat as products grow",
            [&] { return check_step_scaling(); });
    guarded(6, "full simulator matches the naive reference bit for bit",
            [&] { return check_reference_equivalence(100); });
    guarded(7, "day kernels conserve mass and stay nonnegative under fuzz",
            [&] { return check_conservation(1000000); });
    guarded(8, "policy-net backprop matches finite differences",
            [&] { return check_gradients(); });
    guarded(9, "tuner recovers the constant-demand optimum",
            [&] { return check_tuner(); });
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[acceptance] setup failed: %s\n", e.what());
    std::printf("[FAIL] scenario setup: %s\n", e.what());
    return 10;
  }

  int failures = 0;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const Line& line = lines[n];
    failures += line.pass ? 0 : 1;
    std::printf("[%s] %2zu %s\n", line.pass ? "PASS" : "FAIL", n + 1, line.text.c_str());
  }
  std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
  return failures;
}

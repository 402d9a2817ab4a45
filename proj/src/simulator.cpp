#include "chainsim/simulator.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "chainsim/observation.hpp"

namespace chainsim {

namespace {

void check_dims(const ScenarioConfig& config, const DemandSeries& demand) {
  const int P = static_cast<int>(config.products.size());
  const int R = static_cast<int>(config.retailers.size());
  require(P > 0 && R > 0, "scenario has no products or no retailers");
  require(config.horizon > 0, "horizon must be positive");
  require(demand.products == P && demand.retailers == R,
          "demand tensor does not match scenario dimensions");
  require(demand.t_ext >= config.horizon + config.predictdays,
          "demand series shorter than horizon + predictdays");
  for (int i = 0; i < R; ++i)
    require(config.retailers[i].basestock.size() == P,
            "retailer basestock vector does not match product count");
}

}  // namespace

PrecomputeResult precompute_request_star(const ScenarioConfig& config,
                                         const DemandSeries& demand) {
  check_dims(config, demand);
  const int T = config.horizon;
  const int P = static_cast<int>(config.products.size());
  const int R = static_cast<int>(config.retailers.size());

  Tensor3 star(T, P, R);
  // Retailer states, product-major per retailer. The warehouse is treated as
  // infinite, so every request is shipped in full the same day.
  std::vector<std::vector<RetailerProductState>> ret(R);
  for (int i = 0; i < R; ++i) {
    ret[i].reserve(P);
    for (int k = 0; k < P; ++k)
      ret[i].emplace_back(make_retailer_state(config.retailers[i].delay,
                                              config.retailers[i].basestock[k]));
  }

  ArrayXd lacks(P);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < R; ++i) {
      const RetailerSpec& rs = config.retailers[i];
      for (int k = 0; k < P; ++k) {
        RetailerProductState& st = ret[i][k];
        const double arrival = advance_pipeline(st.inbound);
        const SellResult sold = retailer_sell(st.stock + arrival, demand.at(t, k, i));
        st.stock = sold.remaining;
        lacks[k] = retailer_lack(rs.basestock[k], st.stock, in_transit(st));
      }
      const ArrayXd req = retailer_requests(lacks, rs.trucksize);
      for (int k = 0; k < P; ++k) {
        star.at(t, k, i) = req[k];
        // Infinite warehouse: the full request ships immediately.
        ret[i][k].inbound[ret[i][k].inbound.size() - 1] = req[k];
      }
    }
  }
  return derive_precompute(std::move(star));
}

PrecomputeResult derive_precompute(Tensor3 request_star) {
  PrecomputeResult pre;
  const int T = request_star.d0();
  const int P = request_star.d1();
  const int R = request_star.d2();
  require(T > 0 && P > 0 && R > 0, "request* tensor is empty");
  pre.request_star = std::move(request_star);

  pre.schedule.horizon = T;
  pre.schedule.retailers = R;
  pre.schedule.on.assign(static_cast<std::size_t>(T) * R, 0);
  pre.total_by_day.resize(T, P);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < P; ++k) {
      const auto row = pre.request_star.slice(t, k);
      pre.total_by_day(t, k) = seq_sum(row);
      for (int i = 0; i < R; ++i)
        if (row[i] > 0.0) pre.schedule.on[static_cast<std::size_t>(t) * R + i] = 1;
    }
  }
  pre.mean_daily_request.resize(P);
  for (int k = 0; k < P; ++k)
    pre.mean_daily_request[k] = seq_sum(pre.total_by_day.col(k).array()) / T;
  pre.maxorder = 2.0 * seq_sum(pre.mean_daily_request) / P;
  return pre;
}

void save_precompute(const std::filesystem::path& dir, const PrecomputeResult& pre) {
  std::filesystem::create_directories(dir);
  save_tensor((dir / "request_star.bin").string(), pre.request_star, kRequestStarMagic);
  nlohmann::json j;
  j["format_version"] = 1;
  j["maxorder"] = pre.maxorder;
  j["horizon"] = pre.request_star.d0();
  j["products"] = pre.request_star.d1();
  j["retailers"] = pre.request_star.d2();
  std::ofstream out(dir / "precompute.json", std::ios::binary);
  require(out.good(), "cannot write precompute.json");
  out << j.dump(2) << "\n";
  require(out.good(), "write to precompute.json failed");
}

PrecomputeResult load_precompute(const std::filesystem::path& dir) {
  PrecomputeResult pre =
      derive_precompute(load_tensor((dir / "request_star.bin").string(), kRequestStarMagic));
  std::ifstream in(dir / "precompute.json", std::ios::binary);
  require(in.good(), "cannot open precompute.json");
  nlohmann::json j = nlohmann::json::parse(in);
  require(j.at("horizon").get<int>() == pre.request_star.d0() &&
              j.at("products").get<int>() == pre.request_star.d1() &&
              j.at("retailers").get<int>() == pre.request_star.d2(),
          "precompute.json dimensions do not match request_star.bin");
  pre.maxorder = j.at("maxorder").get<double>();
  require(pre.maxorder > 0.0, "precompute.json: maxorder must be positive");
  return pre;
}

double EpisodeTrace::total_gain() const {
  double s = 0.0;
  for (double g : gain) s += g;
  return s;
}

double EpisodeTrace::daily_gain() const {
  require(horizon > 0, "empty trace");
  return total_gain() / horizon;
}

namespace {

struct TraceRecorder {
  EpisodeTrace trace;

  TraceRecorder(int T, int P, int R, bool detail) {
    trace.horizon = T;
    trace.products = P;
    const std::size_t n = static_cast<std::size_t>(T) * P;
    trace.order.assign(n, 0.0);
    trace.request_total.assign(n, 0.0);
    trace.ship_total.assign(n, 0.0);
    trace.stock.assign(n, 0.0);
    trace.profit.assign(n, 0.0);
    trace.inventory_cost.assign(n, 0.0);
    trace.gain.assign(n, 0.0);
    if (detail) {
      trace.has_detail = true;
      trace.requests = Tensor3(T, P, R);
      trace.ships = Tensor3(T, P, R);
    }
  }
};

/// Shared day loop for simulate_full and replay_orders. order_for is called
/// on the end-of-day state and must return the day's order.
template <typename OrderFn>
EpisodeTrace run_full(const ScenarioConfig& config, const DemandSeries& demand,
                      OrderingPolicy* policy, OrderFn order_for, bool record_detail) {
  check_dims(config, demand);
  const int T = config.horizon;
  const int P = static_cast<int>(config.products.size());
  const int R = static_cast<int>(config.retailers.size());
  require(demand.sim_horizon == T, "demand sim_horizon does not match scenario horizon");

  const Tensor3 predictions = build_predictions(demand, config.predictdays);

  std::vector<WarehouseProductState> wh;
  wh.reserve(P);
  for (int k = 0; k < P; ++k) {
    WarehouseProductState st = make_warehouse_state(config.products[k].delay);
    if (policy != nullptr) {
      ArrayXd pipe = policy->initial_pipeline(k, config.products[k].delay);
      require(pipe.size() == config.products[k].delay,
              "initial_pipeline length must equal the product delay");
      for (Eigen::Index j = 0; j < pipe.size(); ++j)
        pipe[j] = require_nonneg(pipe[j], "initial pipeline entry");
      st.pipeline = std::move(pipe);
    }
    wh.push_back(std::move(st));
  }
  std::vector<std::vector<RetailerProductState>> ret(R);
  for (int i = 0; i < R; ++i) {
    ret[i].reserve(P);
    for (int k = 0; k < P; ++k)
      ret[i].emplace_back(make_retailer_state(config.retailers[i].delay,
                                              config.retailers[i].basestock[k]));
  }

  TraceRecorder rec(T, P, R, record_detail);
  EpisodeTrace& trace = rec.trace;
  Eigen::MatrixXd requests(R, P);
  ArrayXd lacks(P);

  for (int t = 0; t < T; ++t) {
    // Retailer phase: receive, sell, measure lack, place truck requests.
    for (int i = 0; i < R; ++i) {
      const RetailerSpec& rs = config.retailers[i];
      for (int k = 0; k < P; ++k) {
        RetailerProductState& st = ret[i][k];
        const double arrival = advance_pipeline(st.inbound);
        const SellResult sold = retailer_sell(st.stock + arrival, demand.at(t, k, i));
        st.stock = sold.remaining;
        lacks[k] = retailer_lack(rs.basestock[k], st.stock, in_transit(st));
      }
      requests.row(i) = retailer_requests(lacks, rs.trucksize).matrix().transpose();
    }

    // Warehouse phase: receive, ration, ship, then the evening order.
    for (int k = 0; k < P; ++k) {
      WarehouseProductState& st = wh[k];
      const ProductSpec& ps = config.products[k];
      const double arrival = advance_pipeline(st.pipeline);
      const double stock_plus = st.stock + arrival;
      const ArrayXd ships = allocate_shipments(stock_plus, requests.col(k).array());
      const double shipped = seq_sum(ships);
      st.stock = std::max(0.0, stock_plus - shipped);
      for (int i = 0; i < R; ++i)
        ret[i][k].inbound[ret[i][k].inbound.size() - 1] = ships[i];

      const double order = order_for(t, k, st, ps, predictions);
      st.pipeline[st.pipeline.size() - 1] = order;

      const std::size_t n = trace.idx(t, k);
      trace.order[n] = order;
      trace.request_total[n] = seq_sum(requests.col(k).array());
      trace.ship_total[n] = shipped;
      trace.stock[n] = st.stock;
      trace.profit[n] = ps.price * shipped;
      trace.inventory_cost[n] = ps.stockcost * st.stock;
      trace.gain[n] = trace.profit[n] - trace.inventory_cost[n];
      if (record_detail) {
        for (int i = 0; i < R; ++i) {
          trace.requests.at(t, k, i) = requests(i, k);
          trace.ships.at(t, k, i) = ships[i];
        }
      }
    }
  }
  return trace;
}

}  // namespace

EpisodeTrace simulate_full(const ScenarioConfig& config, const DemandSeries& demand,
                           OrderingPolicy& policy, bool record_detail) {
  policy.begin_episode(config);
  auto order_for = [&policy](int t, int k, const WarehouseProductState& st,
                             const ProductSpec&, const Tensor3& predictions) {
    const auto window = predictions.slice(t, k);
    const double order = policy.order_quantity(
        t, k, inventory_position(st), std::span<const double>(window.data(), window.size()));
    return require_nonneg(order, "policy order");
  };
  return run_full(config, demand, &policy, order_for, record_detail);
}

EpisodeTrace replay_orders(const ScenarioConfig& config, const DemandSeries& demand,
                           const std::vector<double>& orders, bool record_detail) {
  const std::size_t need = static_cast<std::size_t>(config.horizon) * config.products.size();
  require(orders.size() == need, "replay order sequence has the wrong length");
  auto order_for = [&orders, &config](int t, int k, const WarehouseProductState&,
                                      const ProductSpec&, const Tensor3&) {
    return require_nonneg(orders[static_cast<std::size_t>(t) * config.products.size() + k],
                          "replay order");
  };
  return run_full(config, demand, nullptr, order_for, record_detail);
}

void export_trace(const std::filesystem::path& file, const EpisodeTrace& trace) {
  std::ofstream out(file, std::ios::binary);
  require(out.good(), "cannot open trace file for writing");
  out << "day\tproduct\torder\trequest_total\tship_total\tstock\tprofit\tinventory_cost\tgain\n";
  char buf[64];
  auto col = [&buf, &out](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << '\t' << buf;
  };
  for (int t = 0; t < trace.horizon; ++t) {
    for (int k = 0; k < trace.products; ++k) {
      const std::size_t n = trace.idx(t, k);
      out << t << '\t' << k;
      col(trace.order[n]);
      col(trace.request_total[n]);
      col(trace.ship_total[n]);
      col(trace.stock[n]);
      col(trace.profit[n]);
      col(trace.inventory_cost[n]);
      col(trace.gain[n]);
      out << '\n';
    }
  }
  require(out.good(), "write to trace file failed");
}

ApproxEnv::ApproxEnv(const ScenarioConfig& config, const DemandSeries& demand,
                     const TruckSchedule& schedule, const Tensor3& predictions)
    : config_(&config), demand_(&demand), schedule_(&schedule), predictions_(&predictions) {
  check_dims(config, demand);
  const int R = static_cast<int>(config.retailers.size());
  require(schedule.horizon == config.horizon && schedule.retailers == R,
          "truck schedule does not match scenario dimensions");
  require(predictions.d0() == config.horizon &&
              predictions.d1() == static_cast<int>(config.products.size()) &&
              predictions.d2() == config.predictdays,
          "prediction tensor does not match scenario dimensions");
  require(config.scale.kilograms > 0.0,
          "observation scale is incomplete: kilograms (maxorder) is unset");
  // Day horizon+0 is still simulated (the last step), so demand must cover it.
  require(demand.t_ext >= config.horizon + 1, "demand series too short for the final day");
  requests_ = ArrayXd::Zero(R);
  ships_ = ArrayXd::Zero(R);
}

const Eigen::ArrayXd& ApproxEnv::reset(int product) {
  require(product >= 0 && product < products(), "reset: product index out of range");
  product_ = product;
  const ProductSpec& ps = config_->products[product_];
  warehouse_ = make_warehouse_state(ps.delay);
  const int R = static_cast<int>(config_->retailers.size());
  retailers_.clear();
  retailers_.reserve(R);
  for (int i = 0; i < R; ++i)
    retailers_.push_back(make_retailer_state(config_->retailers[i].delay,
                                             config_->retailers[i].basestock[product_]));
  day_ = 0;
  done_ = false;
  reward_ = run_day();  // day 0 needs no prior decision; its gain is not a step reward
  refresh_observation();
  return observation_;
}

EnvStep ApproxEnv::step(double order_kg) {
  require(product_ >= 0, "step called before reset");
  require(!done_, "step called on a finished episode");
  order_kg = require_nonneg(order_kg, "order");
  warehouse_.pipeline[warehouse_.pipeline.size() - 1] = order_kg;
  ++day_;
  reward_ = run_day();
  done_ = (day_ == config_->horizon);
  refresh_observation();
  return EnvStep{observation_, reward_, done_};
}

double ApproxEnv::run_day() {
  const int t = day_;
  const int R = static_cast<int>(config_->retailers.size());
  const ProductSpec& ps = config_->products[product_];

  for (int i = 0; i < R; ++i) {
    RetailerProductState& st = retailers_[i];
    const double arrival = advance_pipeline(st.inbound);
    const SellResult sold = retailer_sell(st.stock + arrival, demand_->at(t, product_, i));
    st.stock = sold.remaining;
    const double lack =
        retailer_lack(config_->retailers[i].basestock[product_], st.stock, in_transit(st));
    requests_[i] = approx_request(*schedule_, t, i, lack);
  }

  const double arrival = advance_pipeline(warehouse_.pipeline);
  const double stock_plus = warehouse_.stock + arrival;
  ships_ = allocate_shipments(stock_plus, requests_);
  const double shipped = seq_sum(ships_);
  warehouse_.stock = std::max(0.0, stock_plus - shipped);
  for (int i = 0; i < R; ++i)
    retailers_[i].inbound[retailers_[i].inbound.size() - 1] = ships_[i];

  const double profit = ps.price * shipped;
  const double inventory_cost = ps.stockcost * warehouse_.stock;
  return profit - inventory_cost;
}

void ApproxEnv::refresh_observation() {
  const ProductSpec& ps = config_->products[product_];
  if (day_ < predictions_->d0()) {
    const auto window = predictions_->slice(day_, product_);
    observation_ = build_observation(ps, config_->scale, inventory_position(warehouse_),
                                     std::span<const double>(window.data(), window.size()));
  } else {
    // Terminal evening: the prediction window runs past the demand series,
    // so it is zero-filled. No order is taken from this observation.
    const std::vector<double> zeros(static_cast<std::size_t>(config_->predictdays), 0.0);
    observation_ = build_observation(ps, config_->scale, inventory_position(warehouse_),
                                     std::span<const double>(zeros.data(), zeros.size()));
  }
}

}  // namespace chainsim

#include "chainsim/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>

namespace chainsim {

using nlohmann::json;

namespace {

json to_json(const ScenarioConfig& c) {
  json j;
  j["format_version"] = 1;
  j["kind"] = c.kind;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["predictdays"] = c.predictdays;
  json products = json::array();
  for (const auto& p : c.products) {
    products.push_back({{"price", p.price}, {"stockcost", p.stockcost}, {"delay", p.delay}});
  }
  j["products"] = products;
  json retailers = json::array();
  for (const auto& r : c.retailers) {
    std::vector<double> bs(r.basestock.data(), r.basestock.data() + r.basestock.size());
    retailers.push_back({{"trucksize", r.trucksize}, {"delay", r.delay}, {"basestock", bs}});
  }
  j["retailers"] = retailers;
  j["scale"] = {{"price", c.scale.price},
                {"stockcost", c.scale.stockcost},
                {"delay", c.scale.delay},
                {"kilograms", c.scale.kilograms}};
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig c;
  c.kind = j.at("kind").get<std::string>();
  c.seed = j.at("seed").get<uint64_t>();
  c.horizon = j.at("horizon").get<int>();
  c.predictdays = j.at("predictdays").get<int>();
  for (const auto& pj : j.at("products")) {
    ProductSpec p;
    p.price = pj.at("price").get<double>();
    p.stockcost = pj.at("stockcost").get<double>();
    p.delay = pj.at("delay").get<int>();
    c.products.push_back(p);
  }
  for (const auto& rj : j.at("retailers")) {
    RetailerSpec r;
    r.trucksize = rj.at("trucksize").get<double>();
    r.delay = rj.at("delay").get<int>();
    auto bs = rj.at("basestock").get<std::vector<double>>();
    r.basestock = Eigen::Map<const Eigen::ArrayXd>(bs.data(), static_cast<Eigen::Index>(bs.size()));
    c.retailers.push_back(std::move(r));
  }
  const auto& sj = j.at("scale");
  c.scale.price = sj.at("price").get<double>();
  c.scale.stockcost = sj.at("stockcost").get<double>();
  c.scale.delay = sj.at("delay").get<double>();
  c.scale.kilograms = sj.at("kilograms").get<double>();
  return c;
}

}  // namespace

void save_scenario(const std::string& dir, const Scenario& s) {
  std::filesystem::create_directories(dir);
  json j = to_json(s.config);
  j["demand_file"] = "demand.bin";
  j["t_ext"] = s.demand.t_ext;
  j["provenance"] = s.provenance.empty() ? json::object() : json::parse(s.provenance);
  std::ofstream f(dir + "/scenario.json", std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write scenario.json in " + dir);
  f << j.dump(2) << "\n";
  save_tensor(dir + "/demand.bin", s.demand.values, kDemandMagic);
}

Scenario load_scenario(const std::string& dir) {
  std::ifstream f(dir + "/scenario.json");
  if (!f) throw std::runtime_error("cannot open " + dir + "/scenario.json");
  json j = json::parse(f);
  Scenario s;
  s.config = config_from_json(j);
  s.provenance = j.value("provenance", json::object()).dump();

  s.demand.values = load_tensor(dir + "/" + j.value("demand_file", "demand.bin"), kDemandMagic);
  s.demand.t_ext = s.demand.values.d0();
  s.demand.products = s.demand.values.d1();
  s.demand.retailers = s.demand.values.d2();
  s.demand.sim_horizon = s.config.horizon;

  const auto& c = s.config;
  require(s.demand.products == static_cast<int>(c.products.size()),
          "scenario: product count mismatch between demand and specs");
  require(s.demand.retailers == static_cast<int>(c.retailers.size()),
          "scenario: retailer count mismatch between demand and specs");
  require(c.horizon > 0 && c.predictdays > 0, "scenario: horizon and predictdays must be positive");
  require(s.demand.t_ext >= c.horizon + c.predictdays,
          "scenario: demand series shorter than horizon + predictdays");
  for (const auto& p : c.products) {
    require(p.price > 0.0 && p.stockcost >= 0.0 && p.delay >= 1, "scenario: bad product spec");
  }
  for (const auto& r : c.retailers) {
    require(r.trucksize > 0.0 && r.delay >= 1, "scenario: bad retailer spec");
    require(r.basestock.size() == s.demand.products, "scenario: basestock length mismatch");
    for (Eigen::Index k = 0; k < r.basestock.size(); ++k) {
      require(r.basestock[k] > 0.0, "scenario: basestock values must be positive");
    }
  }
  for (double v : s.demand.values.data()) {
    require(v >= 0.0, "scenario: demand values must be nonnegative");
  }
  return s;
}

ObservationScale scale_from_ranges(const AttributeRanges& r) {
  ObservationScale s;
  s.price = 0.5 * (r.price_min + r.price_max);
  s.stockcost = 0.5 * (r.stockcost_min + r.stockcost_max);
  s.delay = static_cast<double>(r.delay_max);
  s.kilograms = 0.0;
  return s;
}

}  // namespace chainsim

#pragma once


#include <cstdint>
#include <string>
#include <vector>

#include "chainsim/demand.hpp"

namespace chainsim {

/// Fixed per-feature divisors for observation normalization. price/stockcost
/// use the midpoints of their sampling ranges, delay the maximum lead time,
/// and kilograms the scenario's maxorder (derived at precompute time, 0 until
/// then).
struct ObservationScale {
  double price = 1.0;
  double stockcost = 1.0;
  double delay = 1.0;
  double kilograms = 0.0;
};

struct ScenarioConfig {
  std::string kind;  // "artificial" or "real"
  uint64_t seed = 0;
  int horizon = 0;
  int predictdays = 0;
  std::vector<ProductSpec> products;
  std::vector<RetailerSpec> retailers;
  ObservationScale scale;
};

/// A scenario directory holds scenario.json plus demand.bin. provenance is
/// free-form metadata (split ids, stage counts, sampling parameters) carried
/// along for reproducibility; the library never interprets it.
struct Scenario {
  ScenarioConfig config;
  DemandSeries demand;
  std::string provenance;  // serialized JSON object, "{}" if none
};

void save_scenario(const std::string& dir, const Scenario& s);

/// Loads and validates: dimensions line up, demand is nonnegative,
/// t_ext >= horizon + predictdays, basestocks positive, delays >= 1.
Scenario load_scenario(const std::string& dir);

ObservationScale scale_from_ranges(const AttributeRanges& r);

}  // namespace chainsim

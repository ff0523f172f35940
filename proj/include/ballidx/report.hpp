#pragma once

#include <iosfwd>

#include <json.hpp>

#include "ballidx/bench.hpp"
#include "ballidx/forest.hpp"
#include "ballidx/geometry.hpp"
#include "ballidx/pipeline.hpp"

namespace ballidx {

inline constexpr const char* kStatsSchema = "ballidx.stats";
inline constexpr int kStatsSchemaVersion = 1;

nlohmann::json to_json(const CostCounters& c);
nlohmann::json to_json(const TreeStats& s);
nlohmann::json to_json(const PlanSummary& s);
nlohmann::json to_json(const OverlapReport& r);
nlohmann::json to_json(const QueryWorkload& w, bool include_rows = true);

/// Stats document of one build: per-phase costs, plan summary and per-tree structure.
nlohmann::json build_stats(const Forest& forest, const BuildReport& report);

/// Stats document of a query run against a saved forest.
nlohmann::json query_stats(const Forest& forest, const QueryWorkload& workload);

/// Side-by-side comparison of every method.
nlohmann::json bench_stats(const BenchResult& bench);

/// Raw per-query rows as CSV: method,k,query,distances,comparisons,elapsed_seconds,trees,recall
void write_rows_csv(std::ostream& out, std::string_view method, const QueryWorkload& w, bool header = true);

} // namespace ballidx

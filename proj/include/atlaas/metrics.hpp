#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "atlaas/types.hpp"

namespace atlaas {

/// One resolved query. Serializes to a single `query ...` line; every summary
/// number is recomputable from these records alone.
struct QueryRecord {
  uint64_t id = 0;
  uint64_t pair = 0; // id of the paired run (two-layer vs flood), 0 if none
  bool flood = false;
  PeerId entry = kNoPeer;
  uint32_t cycle = 0;
  double recall = 0.0;
  uint32_t n_matches = 0;
  double top_score = 0.0;
  uint64_t messages = 0;
  uint64_t comparisons = 0;
  uint64_t peers_contacted = 0;
  uint64_t dht_hops = 0;
  uint32_t drops = 0; // query messages lost to churn
  bool entry_left = false;

  std::string to_line() const;
  static QueryRecord from_line(const std::string& line);
};

std::vector<QueryRecord> read_query_records(std::istream& is);

/// Mean metrics over a record set with a deterministic bootstrap CI on
/// recall (resample B=1000, percentiles 2.5/97.5).
struct SummaryStats {
  size_t n = 0;
  double mean_recall = 0.0;
  double recall_ci_lo = 0.0;
  double recall_ci_hi = 0.0;
  double mean_messages = 0.0;
  double mean_comparisons = 0.0;
  double mean_peers = 0.0;
  double mean_dht_hops = 0.0;
};
SummaryStats summarize(std::span<const QueryRecord> records, uint64_t bootstrap_seed);

/// Cost ratios of a strategy against its paired flood baseline plus both
/// recalls; records are joined on (id, pair).
struct EfficiencyReport {
  size_t n_pairs = 0;
  double message_ratio = 0.0;
  double comparison_ratio = 0.0;
  double peers_ratio = 0.0;
  double recall_two_layer = 0.0;
  double recall_flood = 0.0;
};
EfficiencyReport efficiency_report(std::span<const QueryRecord> records);

/// %.9g, shared by every metric writer so streams are byte-stable.
std::string format_metric(double v);

/// FNV-1a 64 over a byte string; used for determinism checks.
uint64_t stream_hash(const std::string& s);

} // namespace atlaas

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace atlaas {

/// Full simulation configuration: one value per knob, fully serializable so a
/// run is reproducible from the config alone. Flat key=value text format.
struct SimConfig {
  // scale & timing
  uint32_t n_peers = 100;
  uint64_t seed = 1;
  uint32_t cycles = 50;
  uint32_t cycle_length = 10;
  uint32_t delay_min = 1;
  uint32_t delay_max = 5;
  double join_rate = 0.0;  // expected joins per cycle (Poisson)
  double leave_rate = 0.0; // expected leaves per cycle (Poisson)
  std::string bootstrap = "random"; // random | ring

  // dataset
  uint32_t n_labels = 200;
  uint32_t branch_min = 2;
  uint32_t branch_max = 5;
  double zipf_s = 1.0;
  uint32_t labels_per_peer = 3;
  double decay = 0.5;

  // gossip overlay
  uint32_t c_r = 20;
  uint32_t c_s = 10;

  // election
  double tau_adopt = 0.5;
  uint32_t e_conv = 30;
  uint32_t t_repair = 10;
  uint32_t reelect_period = 100;

  // dht
  uint32_t k_bucket = 8;
  uint32_t alpha = 3;
  uint32_t lsh_sets = 4;
  uint32_t lsh_bits = 16;
  uint32_t probe_radius = 1;
  uint32_t t_repub = 50;
  uint32_t record_ttl = 120;

  // query workload
  uint32_t n_queries = 0;
  uint32_t warmup_cycles = 40;
  uint32_t query_k = 10;
  uint32_t query_m = 3;
  uint32_t query_ttl = 3;
  uint32_t query_fanout = 3;
  double query_theta = 0.5;
  bool flood_baseline = false;

  // metrics
  uint32_t metrics_every = 1;
  uint32_t vq_sample = 0; // peers sampled for view quality; 0 = all

  /// Throws std::invalid_argument on any violated constraint.
  void validate() const;
};

/// Field reflection used by the parser, the CLI overrides and sweeps.
std::vector<std::string> config_keys();
bool config_has_key(const std::string& key);
void config_set(SimConfig& cfg, const std::string& key, const std::string& value);
std::string config_get(const SimConfig& cfg, const std::string& key);

std::string serialize_config(const SimConfig& cfg);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// A config plus replication seeds and optional sweep axes.
struct ExperimentSpec {
  SimConfig base;
  std::vector<uint64_t> seeds;       // empty => [1..5]
  std::vector<SweepAxis> axes;

  std::vector<uint64_t> effective_seeds() const;
  void validate() const;
};

/// Lines: `key = value`, `seeds = s1,s2,...`, `sweep.<key> = v1,v2,...`,
/// blank lines and `#` comments ignored. Unknown keys are errors.
ExperimentSpec parse_experiment(std::istream& is);
std::string serialize_experiment(const ExperimentSpec& spec);

} // namespace atlaas

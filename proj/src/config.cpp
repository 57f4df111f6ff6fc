#include "atlaas/config.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace atlaas {
namespace {

using Member = std::variant<uint32_t SimConfig::*, uint64_t SimConfig::*,
                            double SimConfig::*, bool SimConfig::*,
                            std::string SimConfig::*>;

struct FieldDef {
  const char* name;
  Member member;
};

const std::vector<FieldDef>& fields() {
  static const std::vector<FieldDef> defs = {
      {"n_peers", &SimConfig::n_peers},
      {"seed", &SimConfig::seed},
      {"cycles", &SimConfig::cycles},
      {"cycle_length", &SimConfig::cycle_length},
      {"delay_min", &SimConfig::delay_min},
      {"delay_max", &SimConfig::delay_max},
      {"join_rate", &SimConfig::join_rate},
      {"leave_rate", &SimConfig::leave_rate},
      {"bootstrap", &SimConfig::bootstrap},
      {"n_labels", &SimConfig::n_labels},
      {"branch_min", &SimConfig::branch_min},
      {"branch_max", &SimConfig::branch_max},
      {"zipf_s", &SimConfig::zipf_s},
      {"labels_per_peer", &SimConfig::labels_per_peer},
      {"decay", &SimConfig::decay},
      {"c_r", &SimConfig::c_r},
      {"c_s", &SimConfig::c_s},
      {"tau_adopt", &SimConfig::tau_adopt},
      {"e_conv", &SimConfig::e_conv},
      {"t_repair", &SimConfig::t_repair},
      {"reelect_period", &SimConfig::reelect_period},
      {"k_bucket", &SimConfig::k_bucket},
      {"alpha", &SimConfig::alpha},
      {"lsh_sets", &SimConfig::lsh_sets},
      {"lsh_bits", &SimConfig::lsh_bits},
      {"probe_radius", &SimConfig::probe_radius},
      {"t_repub", &SimConfig::t_repub},
      {"record_ttl", &SimConfig::record_ttl},
      {"n_queries", &SimConfig::n_queries},
      {"warmup_cycles", &SimConfig::warmup_cycles},
      {"query_k", &SimConfig::query_k},
      {"query_m", &SimConfig::query_m},
      {"query_ttl", &SimConfig::query_ttl},
      {"query_fanout", &SimConfig::query_fanout},
      {"query_theta", &SimConfig::query_theta},
      {"flood_baseline", &SimConfig::flood_baseline},
      {"metrics_every", &SimConfig::metrics_every},
      {"vq_sample", &SimConfig::vq_sample},
  };
  return defs;
}

const FieldDef& find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.name) return f;
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

} // namespace

void config_set(SimConfig& cfg, const std::string& key, const std::string& value) {
  const FieldDef& f = find_field(key);
  try {
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<T, uint32_t>) {
            cfg.*member = static_cast<uint32_t>(std::stoul(value));
          } else if constexpr (std::is_same_v<T, uint64_t>) {
            cfg.*member = std::stoull(value);
          } else if constexpr (std::is_same_v<T, double>) {
            cfg.*member = std::stod(value);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") cfg.*member = true;
            else if (value == "false" || value == "0") cfg.*member = false;
            else throw std::invalid_argument("bad bool");
          } else {
            cfg.*member = value;
          }
        },
        f.member);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
  }
}

std::string config_get(const SimConfig& cfg, const std::string& key) {
  const FieldDef& f = find_field(key);
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, double>) return format_double(cfg.*member);
        else if constexpr (std::is_same_v<T, bool>) return cfg.*member ? "true" : "false";
        else if constexpr (std::is_same_v<T, std::string>) return cfg.*member;
        else return std::to_string(cfg.*member);
      },
      f.member);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.name);
  return keys;
}

bool config_has_key(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.name) return true;
  return false;
}

std::string serialize_config(const SimConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.name;
    out += " = ";
    out += config_get(cfg, f.name);
    out += "\n";
  }
  return out;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (n_peers < 1) fail("n_peers >= 1");
  if (cycle_length < 1) fail("cycle_length >= 1");
  if (delay_min < 1 || delay_min > delay_max) fail("need 1 <= delay_min <= delay_max");
  if (delay_max >= cycle_length) fail("delay_max must be < cycle_length");
  if (join_rate < 0 || leave_rate < 0) fail("churn rates >= 0");
  if (bootstrap != "random" && bootstrap != "ring") fail("bootstrap must be random or ring");
  if (n_labels < 1) fail("n_labels >= 1");
  if (branch_min < 1 || branch_min > branch_max) fail("need 1 <= branch_min <= branch_max");
  if (!(zipf_s > 0)) fail("zipf_s > 0");
  if (labels_per_peer < 1) fail("labels_per_peer >= 1");
  if (!(decay > 0 && decay <= 1)) fail("decay in (0,1]");
  if (c_r < 2) fail("c_r >= 2");
  if (c_s < 1) fail("c_s >= 1");
  if (!(tau_adopt >= 0 && tau_adopt <= 1)) fail("tau_adopt in [0,1]");
  if (k_bucket < 1) fail("k_bucket >= 1");
  if (alpha < 1) fail("alpha >= 1");
  if (lsh_sets < 1) fail("lsh_sets >= 1");
  if (lsh_bits < 1 || lsh_bits > 64) fail("lsh_bits in [1,64]");
  if (probe_radius > 3) fail("probe_radius <= 3");
  if (query_k < 1 || query_m < 1 || query_fanout < 1) fail("query k, m, fanout >= 1");
  if (!(query_theta >= 0 && query_theta <= 1)) fail("query_theta in [0,1]");
  if (metrics_every < 1) fail("metrics_every >= 1");
}

std::vector<uint64_t> ExperimentSpec::effective_seeds() const {
  if (!seeds.empty()) return seeds;
  return {1, 2, 3, 4, 5};
}

void ExperimentSpec::validate() const {
  base.validate();
  std::set<uint64_t> uniq(seeds.begin(), seeds.end());
  if (uniq.size() != seeds.size())
    throw std::invalid_argument("experiment: replication seeds must be distinct");
  for (const auto& axis : axes) {
    if (!config_has_key(axis.key))
      throw std::invalid_argument("experiment: sweep axis '" + axis.key +
                                  "' is not a config key");
    if (axis.values.empty())
      throw std::invalid_argument("experiment: sweep axis '" + axis.key + "' is empty");
  }
}

ExperimentSpec parse_experiment(std::istream& is) {
  ExperimentSpec spec;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("experiment line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "seeds") {
      for (const auto& s : split_list(value)) spec.seeds.push_back(std::stoull(s));
    } else if (key.rfind("sweep.", 0) == 0) {
      spec.axes.push_back({key.substr(6), split_list(value)});
    } else {
      config_set(spec.base, key, value);
    }
  }
  spec.validate();
  return spec;
}

std::string serialize_experiment(const ExperimentSpec& spec) {
  std::string out = serialize_config(spec.base);
  if (!spec.seeds.empty()) {
    out += "seeds = ";
    for (size_t i = 0; i < spec.seeds.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(spec.seeds[i]);
    }
    out += "\n";
  }
  for (const auto& axis : spec.axes) {
    out += "sweep." + axis.key + " = ";
    for (size_t i = 0; i < axis.values.size(); ++i) {
      if (i) out += ",";
      out += axis.values[i];
    }
    out += "\n";
  }
  return out;
}

} // namespace atlaas

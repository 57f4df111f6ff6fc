#include "atlaas/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "atlaas/rng.hpp"

namespace atlaas {

std::string format_metric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

uint64_t stream_hash(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string QueryRecord::to_line() const {
  std::ostringstream os;
  os << "query id=" << id << " pair=" << pair
     << " mode=" << (flood ? "flood" : "two_layer") << " entry=" << entry
     << " cycle=" << cycle << " recall=" << format_metric(recall)
     << " matches=" << n_matches << " top=" << format_metric(top_score)
     << " messages=" << messages << " comparisons=" << comparisons
     << " peers=" << peers_contacted << " dht_hops=" << dht_hops
     << " drops=" << drops << " entry_left=" << (entry_left ? 1 : 0);
  return os.str();
}

QueryRecord QueryRecord::from_line(const std::string& line) {
  std::istringstream is(line);
  std::string tag;
  is >> tag;
  if (tag != "query") throw std::invalid_argument("query record: bad line '" + line + "'");
  QueryRecord r;
  std::string kv;
  while (is >> kv) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("query record: bad field '" + kv + "'");
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    if (key == "id") r.id = std::stoull(val);
    else if (key == "pair") r.pair = std::stoull(val);
    else if (key == "mode") r.flood = (val == "flood");
    else if (key == "entry") r.entry = static_cast<PeerId>(std::stoul(val));
    else if (key == "cycle") r.cycle = static_cast<uint32_t>(std::stoul(val));
    else if (key == "recall") r.recall = std::stod(val);
    else if (key == "matches") r.n_matches = static_cast<uint32_t>(std::stoul(val));
    else if (key == "top") r.top_score = std::stod(val);
    else if (key == "messages") r.messages = std::stoull(val);
    else if (key == "comparisons") r.comparisons = std::stoull(val);
    else if (key == "peers") r.peers_contacted = std::stoull(val);
    else if (key == "dht_hops") r.dht_hops = std::stoull(val);
    else if (key == "drops") r.drops = static_cast<uint32_t>(std::stoul(val));
    else if (key == "entry_left") r.entry_left = (val == "1");
    else throw std::invalid_argument("query record: unknown field '" + key + "'");
  }
  return r;
}

std::vector<QueryRecord> read_query_records(std::istream& is) {
  std::vector<QueryRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("query ", 0) == 0) out.push_back(QueryRecord::from_line(line));
  }
  return out;
}

SummaryStats summarize(std::span<const QueryRecord> records, uint64_t bootstrap_seed) {
  SummaryStats s;
  s.n = records.size();
  if (records.empty()) return s;
  for (const auto& r : records) {
    s.mean_recall += r.recall;
    s.mean_messages += static_cast<double>(r.messages);
    s.mean_comparisons += static_cast<double>(r.comparisons);
    s.mean_peers += static_cast<double>(r.peers_contacted);
    s.mean_dht_hops += static_cast<double>(r.dht_hops);
  }
  double n = static_cast<double>(records.size());
  s.mean_recall /= n;
  s.mean_messages /= n;
  s.mean_comparisons /= n;
  s.mean_peers /= n;
  s.mean_dht_hops /= n;

  constexpr size_t kResamples = 1000;
  Rng rng(bootstrap_seed ^ 0xb007);
  std::vector<double> means;
  means.reserve(kResamples);
  for (size_t b = 0; b < kResamples; ++b) {
    double acc = 0.0;
    for (size_t i = 0; i < records.size(); ++i)
      acc += records[rng.uniform_u64(records.size())].recall;
    means.push_back(acc / n);
  }
  std::sort(means.begin(), means.end());
  s.recall_ci_lo = means[static_cast<size_t>(0.025 * (kResamples - 1))];
  s.recall_ci_hi = means[static_cast<size_t>(0.975 * (kResamples - 1))];
  return s;
}

EfficiencyReport efficiency_report(std::span<const QueryRecord> records) {
  std::map<uint64_t, const QueryRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  EfficiencyReport rep;
  double msg = 0, cmp = 0, peers = 0, rec_a = 0, rec_b = 0;
  for (const auto& r : records) {
    if (r.flood || r.pair == 0) continue;
    auto it = by_id.find(r.pair);
    if (it == by_id.end() || !it->second->flood) continue;
    const QueryRecord& f = *it->second;
    auto ratio = [](uint64_t a, uint64_t b) {
      return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
    };
    msg += ratio(r.messages, f.messages);
    cmp += ratio(r.comparisons, f.comparisons);
    peers += ratio(r.peers_contacted, f.peers_contacted);
    rec_a += r.recall;
    rec_b += f.recall;
    ++rep.n_pairs;
  }
  if (rep.n_pairs == 0) return rep;
  double n = static_cast<double>(rep.n_pairs);
  rep.message_ratio = msg / n;
  rep.comparison_ratio = cmp / n;
  rep.peers_ratio = peers / n;
  rep.recall_two_layer = rec_a / n;
  rep.recall_flood = rec_b / n;
  return rep;
}

} // namespace atlaas

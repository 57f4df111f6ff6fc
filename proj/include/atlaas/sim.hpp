#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "atlaas/config.hpp"
#include "atlaas/dataset.hpp"
#include "atlaas/dht.hpp"
#include "atlaas/election.hpp"
#include "atlaas/gossip.hpp"
#include "atlaas/messages.hpp"
#include "atlaas/metrics.hpp"
#include "atlaas/routing_table.hpp"
#include "atlaas/simhash.hpp"

namespace atlaas {

struct QueryParams {
  size_t k = 10;
  size_t m = 3;
  uint32_t ttl = 3;
  size_t fanout = 3;
  double theta = 0.5;
};

/// Iterative lookup as an event-driven state machine: at most alpha probes in
/// flight, always aimed at the closest unqueried candidate among the k
/// closest non-failed ones; terminates when those k are all queried.
struct LookupState {
  enum class Purpose { SelfJoin, Register, QueryProbe, Test };
  enum class CandState : uint8_t { Fresh, Inflight, Done, Failed };
  struct Candidate {
    NodeId node;
    PeerId peer = kNoPeer;
    CandState state = CandState::Fresh;
    uint32_t depth = 0;
  };

  uint64_t token = 0;
  NodeId target;
  bool find_value = false;
  Purpose purpose = Purpose::SelfJoin;
  uint64_t query_id = 0; // QueryProbe
  std::optional<DescriptorRecord> reg_record;
  uint64_t query_tag = 0;
  size_t inflight = 0;
  uint32_t max_depth = 0;
  uint64_t requests = 0;
  bool any_failed = false;
  std::vector<Candidate> candidates; // ascending distance to target
  std::vector<DescriptorRecord> records;
};

/// Entry-side query resolution: probe lookups, then fan out to the top-m
/// representatives, then collect hits until no query-tagged work remains.
struct QueryRun {
  uint64_t id = 0;
  uint64_t pair = 0;
  bool flood = false;
  QueryParams params;
  ProfileRef sample;
  PeerId entry = kNoPeer;
  uint32_t launch_cycle = 0;
  int phase = 0; // 0 probing, 1 collecting
  size_t pending_probes = 0;
  std::map<PeerId, DescriptorRecord> candidates; // newest epoch per representative
  std::map<PeerId, std::pair<ProfileRef, double>> matches;
  std::vector<std::pair<PeerId, double>> descriptor_ranking;
  std::vector<PeerId> oracle; // global top-k at launch, for recall
};

struct Peer {
  PeerId id = kNoPeer;
  bool alive = true;
  uint32_t joined_cycle = 0;
  ProfileRef profile;

  GossipState gossip;
  ElectionState elect;
  std::map<PeerId, PeerId> known_community; // peer -> its last advertised candidate

  NodeId node;
  RoutingTable rt;
  HolderStore store;
  bool dht_joined = false;
  uint32_t last_register_cycle = 0;
  uint32_t registered_epoch = 0;
  bool ever_registered = false;

  std::map<uint64_t, LookupState> lookups;
  std::map<uint64_t, QueryRun> queries;      // this peer as entry
  std::map<uint64_t, uint32_t> seen_queries; // query id -> expiry cycle
};

struct SimCounters {
  static constexpr size_t kKinds = static_cast<size_t>(MsgKind::kCount);
  uint64_t sent = 0;
  uint64_t delivered = 0;
  uint64_t dropped_churn = 0;
  std::array<uint64_t, kKinds> sent_by_kind{};
  std::array<uint64_t, kKinds> delivered_by_kind{};
  std::array<uint64_t, kKinds> dropped_by_kind{};
};

struct LookupResultRow {
  NodeId target;
  std::vector<Contact> found;
  uint32_t rounds = 0;
  uint64_t requests = 0;
  bool incomplete = false;
};

/// Deterministic discrete-event simulator: owns all peers, the message bus,
/// churn and metrics. Identical configs produce byte-identical metric
/// streams.
class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg);

  /// Runs the full cycle budget, then drains in-flight events.
  void run(std::ostream* metrics_sink = nullptr);

  /// Test hooks: advance to the start of a given cycle / drain the queue.
  void run_until_cycle(uint32_t cycle);
  void drain();

  uint64_t schedule_lookup(PeerId start, const NodeId& target);
  /// Schedules a query at the next event time; entry must be alive then.
  uint64_t schedule_query(PeerId entry, ProfileRef sample, const QueryParams& params,
                          bool flood, uint64_t pair = 0);
  void schedule_leave(PeerId peer, uint32_t at_cycle);

  // inspection
  const SimConfig& config() const { return cfg_; }
  const std::vector<Peer>& peers() const { return peers_; }
  const std::vector<PeerId>& live() const { return live_; }
  const SimCounters& counters() const { return counters_; }
  const std::string& metrics_text() const { return metrics_; }
  const std::vector<QueryRecord>& query_records() const { return query_records_; }
  const std::vector<LookupResultRow>& lookup_results() const { return lookup_results_; }
  const PeerDataset& dataset() const { return dataset_; }
  uint32_t current_cycle() const { return cycle_; }

  /// Live representatives (gated on E_conv cycles into their epoch).
  std::vector<PeerId> representatives() const;
  /// Distinct candidate ids among live peers.
  size_t community_count() const;
  double mean_view_quality(uint32_t sample_limit = 0) const;
  std::vector<PeerId> oracle_top_for(PeerId peer, size_t k) const;
  std::vector<Contact> brute_force_closest(const NodeId& target, size_t k) const;

  /// sent == delivered + dropped_churn, per kind and in total.
  bool conservation_holds() const;

 private:
  struct EvTick { uint32_t cycle; };
  struct EvChurnJoin {};
  struct EvChurnLeave { PeerId peer; }; // kNoPeer = pick uniformly
  struct EvTimer { PeerId owner; uint64_t token; NodeId probed; uint64_t query_tag; };
  struct EvQueryLaunch {};
  struct EvTestQuery {
    PeerId entry;
    ProfileRef sample;
    QueryParams params;
    bool flood;
    uint64_t id;
    uint64_t pair;
  };
  struct EvLookupLaunch { PeerId start; NodeId target; uint64_t token; };
  using EventBody = std::variant<Message, EvTick, EvChurnJoin, EvChurnLeave, EvTimer,
                                 EvQueryLaunch, EvTestQuery, EvLookupLaunch>;
  struct Event {
    uint64_t time = 0;
    uint64_t seq = 0;
    EventBody body;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  struct QueryAccount {
    PeerId entry = kNoPeer;
    uint64_t messages = 0;
    uint64_t comparisons = 0;
    uint64_t dht_requests = 0;
    uint32_t drops = 0;
    std::set<PeerId> contacted;
    size_t inflight = 0;
    bool open = true;
  };

  // wiring
  void schedule(uint64_t time, EventBody body);
  void send(PeerId from, PeerId to, MsgKind kind, Payload payload, uint64_t qtag = 0);
  void schedule_probe_timeout(PeerId owner, uint64_t token, const NodeId& probed,
                              uint64_t qtag);
  void process(Event& ev);
  void after_query_work(uint64_t qtag);

  // lifecycle
  void make_peer(ProfileRef profile);
  void bootstrap_peer(Peer& p);
  void do_tick(uint32_t cycle);
  void peer_step(Peer& p);
  void do_join();
  void do_leave(PeerId victim);
  void check_view_invariants(const Peer& p) const;

  // message handlers
  void handle_message(const Message& msg);
  void on_shuffle_req(Peer& p, const Message& msg);
  void on_shuffle_rep(Peer& p, const Message& msg);
  void on_sim_req(Peer& p, const Message& msg);
  void on_sim_rep(Peer& p, const Message& msg);
  void on_election_payload(Peer& p, PeerId from, const CandidateInfo& cand);
  void on_find_node(Peer& p, const Message& msg);
  void on_find_value(Peer& p, const Message& msg);
  void on_lookup_reply(Peer& p, uint64_t token, PeerId from,
                       const std::vector<Contact>& contacts,
                       const std::vector<DescriptorRecord>& records);
  void on_store(Peer& p, const Message& msg);
  void on_query_fwd(Peer& p, const Message& msg);
  void on_query_hit(Peer& p, const Message& msg);

  // dht
  void dht_join(Peer& p);
  uint64_t start_lookup(Peer& p, const NodeId& target, bool find_value,
                        LookupState::Purpose purpose, uint64_t qtag,
                        uint64_t query_id = 0,
                        std::optional<DescriptorRecord> reg = std::nullopt,
                        uint64_t preassigned_token = 0);
  void lookup_pump(Peer& p, LookupState& ls);
  void lookup_timeout(Peer& p, uint64_t token, const NodeId& probed);
  void lookup_complete(Peer& p, LookupState ls);
  void start_register(Peer& p);

  // queries
  void launch_workload_query();
  void launch_query(PeerId entry, ProfileRef sample, const QueryParams& params,
                    bool flood, uint64_t id, uint64_t pair);
  void query_probe_done(Peer& entry_peer, LookupState& ls);
  void query_fanout(Peer& entry_peer, QueryRun& run);
  void query_finalize(Peer& entry_peer, QueryRun& run);
  void flood_from(Peer& p, const QueryFwdBody& q);
  void count_comparisons(uint64_t qtag, uint64_t n);

  // metrics
  void emit_frame();
  void emit_line(const std::string& line);
  void emit_final();

  SimConfig cfg_;
  GossipConfig gcfg_;
  ElectionConfig ecfg_;
  SimhashConfig lsh_;
  QueryParams default_query_;

  PeerDataset dataset_;
  std::vector<Peer> peers_;
  std::vector<PeerId> live_;
  Rng rng_;
  Rng metrics_rng_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  uint64_t seq_ = 0;
  uint64_t now_ = 0;
  uint32_t cycle_ = 0;
  uint32_t ticks_done_ = 0;
  uint64_t next_token_ = 1;

  SimCounters counters_;
  std::map<uint64_t, QueryAccount> accounts_;
  std::string metrics_;
  std::ostream* sink_ = nullptr;
  std::vector<QueryRecord> query_records_;
  std::vector<LookupResultRow> lookup_results_;
  uint32_t queries_launched_ = 0;
};

} // namespace atlaas

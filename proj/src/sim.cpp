#include "atlaas/sim.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace atlaas {

namespace {
constexpr uint64_t kTimerSlack = 1; // probe timeout = 2 * delay_max + slack
} // namespace

Simulation::Simulation(const SimConfig& cfg)
    : cfg_(cfg),
      gcfg_{cfg.c_r, cfg.c_s},
      ecfg_{cfg.tau_adopt, cfg.e_conv, cfg.t_repair, cfg.reelect_period},
      lsh_{cfg.seed, cfg.lsh_sets, cfg.lsh_bits},
      default_query_{cfg.query_k, cfg.query_m, cfg.query_ttl, cfg.query_fanout,
                     cfg.query_theta},
      dataset_(build_dataset(
          DatasetParams{cfg.n_labels, cfg.branch_min, cfg.branch_max, cfg.zipf_s,
                        cfg.labels_per_peer, cfg.decay},
          cfg.n_peers, cfg.seed)),
      rng_(cfg.seed),
      metrics_rng_(cfg.seed ^ 0x3e7a11) {
  cfg_.validate();
  if (dataset_.taxonomy.leaves().size() < cfg_.labels_per_peer)
    throw std::invalid_argument("config: taxonomy has fewer leaves than labels_per_peer");

  peers_.reserve(cfg_.n_peers + 64);
  for (uint32_t i = 0; i < cfg_.n_peers; ++i) make_peer(dataset_.profiles[i]);
  for (uint32_t i = 0; i < cfg_.n_peers; ++i) live_.push_back(i);

  if (cfg_.bootstrap == "ring") {
    if (cfg_.n_peers > 1) {
      for (uint32_t i = 0; i < cfg_.n_peers; ++i) {
        PeerId next = (i + 1) % cfg_.n_peers;
        peers_[i].gossip.random_view.push_back({next, peers_[next].profile, 0});
      }
    }
  } else {
    for (uint32_t i = 0; i < cfg_.n_peers; ++i) bootstrap_peer(peers_[i]);
  }

  schedule(0, EvTick{0});

  // workload injections, one per launch event, spread over post-warmup cycles
  if (cfg_.n_queries > 0) {
    uint32_t first = std::min(cfg_.warmup_cycles, cfg_.cycles - 1);
    uint32_t span = cfg_.cycles > first ? cfg_.cycles - first : 1;
    for (uint32_t q = 0; q < cfg_.n_queries; ++q) {
      uint32_t at = first + q % span;
      schedule(static_cast<uint64_t>(at) * cfg_.cycle_length + cfg_.cycle_length / 2,
               EvQueryLaunch{});
    }
  }
}

void Simulation::make_peer(ProfileRef profile) {
  Peer p;
  p.id = static_cast<PeerId>(peers_.size());
  p.profile = std::move(profile);
  p.joined_cycle = cycle_;
  p.node = NodeId::for_peer(p.id);
  p.rt = RoutingTable(p.node, cfg_.k_bucket);
  election_reset(p.elect, p.id, p.profile, 0.0, 0, cycle_);
  peers_.push_back(std::move(p));
}

void Simulation::bootstrap_peer(Peer& p) {
  size_t want = std::min(gcfg_.shuffle_len(),
                         live_.empty() ? peers_.size() - 1 : live_.size() - 1);
  std::set<PeerId> chosen;
  size_t population = live_.empty() ? peers_.size() : live_.size();
  if (population <= 1) return;
  while (chosen.size() < want) {
    PeerId pick = live_.empty()
                      ? static_cast<PeerId>(rng_.uniform_u64(peers_.size()))
                      : live_[rng_.uniform_u64(live_.size())];
    if (pick == p.id) continue;
    if (!peers_[pick].alive) continue;
    chosen.insert(pick);
  }
  for (PeerId c : chosen)
    p.gossip.random_view.push_back({c, peers_[c].profile, 0});
}

// ---------------------------------------------------------------------------
// event plumbing

void Simulation::schedule(uint64_t time, EventBody body) {
  queue_.push({time, seq_++, std::move(body)});
}

void Simulation::send(PeerId from, PeerId to, MsgKind kind, Payload payload,
                      uint64_t qtag) {
  uint64_t delay = rng_.uniform_int(cfg_.delay_min, cfg_.delay_max);
  if (qtag) {
    auto& acct = accounts_[qtag];
    acct.inflight++;
    if (to != from) {
      acct.messages++;
      if (to != acct.entry) acct.contacted.insert(to);
      if (kind == MsgKind::FindNode || kind == MsgKind::FindValue)
        acct.dht_requests++;
    }
  }
  if (to != from) {
    counters_.sent++;
    counters_.sent_by_kind[static_cast<size_t>(kind)]++;
  }
  schedule(now_ + delay, Message{from, to, kind, qtag, std::move(payload)});
}

void Simulation::schedule_probe_timeout(PeerId owner, uint64_t token,
                                        const NodeId& probed, uint64_t qtag) {
  if (qtag) accounts_[qtag].inflight++;
  schedule(now_ + 2 * cfg_.delay_max + kTimerSlack, EvTimer{owner, token, probed, qtag});
}

void Simulation::after_query_work(uint64_t qtag) {
  auto it = accounts_.find(qtag);
  if (it == accounts_.end()) return;
  if (it->second.inflight > 0) it->second.inflight--;
  if (it->second.inflight != 0 || !it->second.open) return;
  Peer& ep = peers_[it->second.entry];
  auto qit = ep.queries.find(qtag);
  if (qit != ep.queries.end() && qit->second.phase == 1) {
    query_finalize(ep, qit->second);
  }
}

void Simulation::process(Event& ev) {
  now_ = ev.time;
  uint64_t qtag = 0;
  if (auto* msg = std::get_if<Message>(&ev.body)) {
    qtag = msg->query_tag;
    Peer& dest = peers_[msg->to];
    if (!dest.alive) {
      if (msg->to != msg->from) {
        counters_.dropped_churn++;
        counters_.dropped_by_kind[static_cast<size_t>(msg->kind)]++;
        if (qtag) {
          auto it = accounts_.find(qtag);
          if (it != accounts_.end()) it->second.drops++;
        }
      }
    } else {
      if (msg->to != msg->from) {
        counters_.delivered++;
        counters_.delivered_by_kind[static_cast<size_t>(msg->kind)]++;
      }
      handle_message(*msg);
    }
  } else if (auto* tick = std::get_if<EvTick>(&ev.body)) {
    do_tick(tick->cycle);
  } else if (std::get_if<EvChurnJoin>(&ev.body)) {
    do_join();
  } else if (auto* leave = std::get_if<EvChurnLeave>(&ev.body)) {
    do_leave(leave->peer);
  } else if (auto* timer = std::get_if<EvTimer>(&ev.body)) {
    qtag = timer->query_tag;
    if (peers_[timer->owner].alive)
      lookup_timeout(peers_[timer->owner], timer->token, timer->probed);
  } else if (std::get_if<EvQueryLaunch>(&ev.body)) {
    launch_workload_query();
  } else if (auto* tq = std::get_if<EvTestQuery>(&ev.body)) {
    if (peers_[tq->entry].alive) {
      launch_query(tq->entry, tq->sample, tq->params, tq->flood, tq->id, tq->pair);
    } else {
      QueryRecord rec;
      rec.id = tq->id;
      rec.pair = tq->pair;
      rec.flood = tq->flood;
      rec.entry = tq->entry;
      rec.cycle = cycle_;
      rec.entry_left = true;
      query_records_.push_back(rec);
      emit_line(rec.to_line());
    }
  } else if (auto* ll = std::get_if<EvLookupLaunch>(&ev.body)) {
    if (peers_[ll->start].alive)
      start_lookup(peers_[ll->start], ll->target, false, LookupState::Purpose::Test, 0,
                   0, std::nullopt, ll->token);
  }
  if (qtag) after_query_work(qtag);
}

void Simulation::run(std::ostream* metrics_sink) {
  sink_ = metrics_sink;
  emit_line("# atlaas metrics v1");
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    process(ev);
  }
  emit_final();
}

void Simulation::run_until_cycle(uint32_t cycle) {
  while (!queue_.empty()) {
    const Event& top = queue_.top();
    if (const auto* tick = std::get_if<EvTick>(&top.body))
      if (tick->cycle >= cycle) return;
    Event ev = queue_.top();
    queue_.pop();
    process(ev);
  }
}

void Simulation::drain() {
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    process(ev);
  }
}

uint64_t Simulation::schedule_lookup(PeerId start, const NodeId& target) {
  uint64_t token = next_token_++;
  schedule(now_ + 1, EvLookupLaunch{start, target, token});
  return token;
}

uint64_t Simulation::schedule_query(PeerId entry, ProfileRef sample,
                                    const QueryParams& params, bool flood,
                                    uint64_t pair) {
  uint64_t id = next_token_++;
  schedule(now_ + 1, EvTestQuery{entry, std::move(sample), params, flood, id, pair});
  return id;
}

void Simulation::schedule_leave(PeerId peer, uint32_t at_cycle) {
  schedule(static_cast<uint64_t>(at_cycle) * cfg_.cycle_length + 1, EvChurnLeave{peer});
}

// ---------------------------------------------------------------------------
// cycle ticks, churn

void Simulation::do_tick(uint32_t cycle) {
  cycle_ = cycle;
  if (cfg_.join_rate > 0) {
    uint32_t joins = rng_.poisson(cfg_.join_rate);
    for (uint32_t j = 0; j < joins; ++j) schedule(now_, EvChurnJoin{});
  }
  if (cfg_.leave_rate > 0) {
    uint32_t leaves = rng_.poisson(cfg_.leave_rate);
    for (uint32_t l = 0; l < leaves; ++l) schedule(now_, EvChurnLeave{kNoPeer});
  }

  std::vector<PeerId> order = live_;
  rng_.shuffle(order);
  for (PeerId id : order) {
    Peer& p = peers_[id];
    if (p.alive) peer_step(p);
  }
  for (PeerId id : live_) check_view_invariants(peers_[id]);

  if (cycle % cfg_.metrics_every == 0) emit_frame();
  ticks_done_++;
  if (cycle + 1 < cfg_.cycles)
    schedule(now_ + cfg_.cycle_length, EvTick{cycle + 1});
}

void Simulation::peer_step(Peer& p) {
  age_views(p.gossip);
  // expire query dedup entries
  for (auto it = p.seen_queries.begin(); it != p.seen_queries.end();)
    it = it->second < cycle_ ? p.seen_queries.erase(it) : std::next(it);
  // keep community hints only for current view members
  if (!p.known_community.empty()) {
    std::set<PeerId> known;
    for (const auto& e : p.gossip.random_view) known.insert(e.peer);
    for (const auto& e : p.gossip.similar_view) known.insert(e.peer);
    for (auto it = p.known_community.begin(); it != p.known_community.end();)
      it = known.count(it->first) ? std::next(it) : p.known_community.erase(it);
  }

  // election epoch maintenance
  double own_score = centrality_score(*p.profile, p.gossip.similar_view);
  if (cfg_.reelect_period > 0 && cycle_ > 0 && cycle_ % cfg_.reelect_period == 0) {
    election_reset(p.elect, p.id, p.profile, own_score, p.elect.epoch + 1, cycle_);
  } else if (p.elect.candidate != p.id &&
             reelection_trigger(cycle_, p.elect.last_progress, ecfg_.t_repair)) {
    election_reset(p.elect, p.id, p.profile, own_score, p.elect.epoch + 1, cycle_);
  }
  election_self_check(p.elect, p.id, p.profile, own_score, cycle_);

  // one exchange per layer per cycle
  if (auto sb = shuffle_begin(p.gossip, p.id, p.profile, gcfg_, rng_))
    send(p.id, sb->partner, MsgKind::ShuffleReq, ShuffleReqBody{std::move(sb->entries)});
  if (auto partner = similar_partner(p.gossip, *p.profile);
      partner && partner->peer != p.id) {
    auto payload = similar_payload(p.gossip, p.id, p.profile, *partner->profile, gcfg_);
    send(p.id, partner->peer, MsgKind::SimReq,
         SimReqBody{std::move(payload), advertisement(p.elect), p.profile});
  }

  if (!p.dht_joined) dht_join(p);
  if (is_representative(p.elect, p.id) &&
      cycle_ >= p.elect.epoch_start + ecfg_.e_conv) {
    if (!p.ever_registered || p.registered_epoch != p.elect.epoch ||
        cycle_ - p.last_register_cycle >= cfg_.t_repub)
      start_register(p);
  }
  p.store.expire(cycle_, cfg_.record_ttl);
}

void Simulation::do_join() {
  ProfileRef prof = draw_fresh_profile(dataset_, rng_);
  make_peer(std::move(prof));
  Peer& p = peers_.back();
  live_.push_back(p.id);
  bootstrap_peer(p);
}

void Simulation::do_leave(PeerId victim) {
  if (live_.size() <= 1) return; // never remove the last peer
  if (victim == kNoPeer) {
    victim = live_[rng_.uniform_u64(live_.size())];
  } else if (victim >= peers_.size() || !peers_[victim].alive) {
    return;
  }
  peers_[victim].alive = false;
  live_.erase(std::find(live_.begin(), live_.end(), victim));
}

void Simulation::check_view_invariants(const Peer& p) const {
  auto check = [&](const std::vector<ViewEntry>& view, const char* which) {
    std::set<PeerId> seen;
    for (const auto& e : view) {
      if (e.peer == p.id)
        throw std::logic_error(std::string("gossip invariant: self entry in ") + which);
      if (!seen.insert(e.peer).second)
        throw std::logic_error(std::string("gossip invariant: duplicate in ") + which);
    }
    if (view.size() > (which[0] == 'r' ? gcfg_.c_r : gcfg_.c_s))
      throw std::logic_error("gossip invariant: view over capacity");
  };
  check(p.gossip.random_view, "random_view");
  check(p.gossip.similar_view, "similar_view");
}

// ---------------------------------------------------------------------------
// gossip + election message handlers

void Simulation::handle_message(const Message& msg) {
  Peer& p = peers_[msg.to];
  switch (msg.kind) {
    case MsgKind::ShuffleReq: on_shuffle_req(p, msg); break;
    case MsgKind::ShuffleRep: on_shuffle_rep(p, msg); break;
    case MsgKind::SimReq: on_sim_req(p, msg); break;
    case MsgKind::SimRep: on_sim_rep(p, msg); break;
    case MsgKind::Ping: {
      p.rt.observe(peers_[msg.from].node, msg.from);
      send(p.id, msg.from, MsgKind::Pong, PongBody{p.node});
      break;
    }
    case MsgKind::Pong:
      p.rt.observe(peers_[msg.from].node, msg.from);
      break;
    case MsgKind::FindNode: on_find_node(p, msg); break;
    case MsgKind::FindValue: on_find_value(p, msg); break;
    case MsgKind::FindNodeRep: {
      const auto& b = std::get<FindNodeRepBody>(msg.payload);
      p.rt.observe(peers_[msg.from].node, msg.from);
      on_lookup_reply(p, b.token, msg.from, b.contacts, {});
      break;
    }
    case MsgKind::FindValueRep: {
      const auto& b = std::get<FindValueRepBody>(msg.payload);
      p.rt.observe(peers_[msg.from].node, msg.from);
      on_lookup_reply(p, b.token, msg.from, b.contacts, b.records);
      break;
    }
    case MsgKind::Store: on_store(p, msg); break;
    case MsgKind::StoreRep:
      if (msg.to != msg.from) p.rt.observe(peers_[msg.from].node, msg.from);
      break;
    case MsgKind::QueryFwd: on_query_fwd(p, msg); break;
    case MsgKind::QueryHit: on_query_hit(p, msg); break;
    case MsgKind::kCount: break;
  }
}

void Simulation::on_shuffle_req(Peer& p, const Message& msg) {
  const auto& body = std::get<ShuffleReqBody>(msg.payload);
  auto reply = shuffle_handle_request(p.gossip, p.id, body.entries, gcfg_, rng_);
  send(p.id, msg.from, MsgKind::ShuffleRep, ShuffleRepBody{std::move(reply)});
}

void Simulation::on_shuffle_rep(Peer& p, const Message& msg) {
  const auto& body = std::get<ShuffleRepBody>(msg.payload);
  shuffle_handle_reply(p.gossip, p.id, body.entries, gcfg_);
}

void Simulation::on_election_payload(Peer& p, PeerId from, const CandidateInfo& cand) {
  if (cand.candidate != kNoPeer) p.known_community[from] = cand.candidate;
  double own_score = centrality_score(*p.profile, p.gossip.similar_view);
  election_step(p.elect, p.id, *p.profile, p.profile, own_score, cand, ecfg_, cycle_);
}

void Simulation::on_sim_req(Peer& p, const Message& msg) {
  const auto& body = std::get<SimReqBody>(msg.payload);
  on_election_payload(p, msg.from, body.candidate);
  similar_merge(p.gossip, p.id, *p.profile, body.entries, gcfg_);
  if (!body.sender_profile) return;
  auto payload = similar_payload(p.gossip, p.id, p.profile, *body.sender_profile, gcfg_);
  send(p.id, msg.from, MsgKind::SimRep,
       SimRepBody{std::move(payload), advertisement(p.elect)});
}

void Simulation::on_sim_rep(Peer& p, const Message& msg) {
  const auto& body = std::get<SimRepBody>(msg.payload);
  on_election_payload(p, msg.from, body.candidate);
  similar_merge(p.gossip, p.id, *p.profile, body.entries, gcfg_);
}

// ---------------------------------------------------------------------------
// dht

void Simulation::dht_join(Peer& p) {
  for (const auto& e : p.gossip.random_view) {
    p.rt.observe(peers_[e.peer].node, e.peer);
    send(p.id, e.peer, MsgKind::Ping, PingBody{p.node});
  }
  p.dht_joined = true;
  start_lookup(p, p.node, false, LookupState::Purpose::SelfJoin, 0);
}

void Simulation::on_find_node(Peer& p, const Message& msg) {
  const auto& body = std::get<FindNodeBody>(msg.payload);
  p.rt.observe(peers_[msg.from].node, msg.from);
  auto contacts = p.rt.closest(body.target, cfg_.k_bucket);
  send(p.id, msg.from, MsgKind::FindNodeRep,
       FindNodeRepBody{body.token, std::move(contacts)}, msg.query_tag);
}

void Simulation::on_find_value(Peer& p, const Message& msg) {
  const auto& body = std::get<FindValueBody>(msg.payload);
  p.rt.observe(peers_[msg.from].node, msg.from);
  auto contacts = p.rt.closest(body.key, cfg_.k_bucket);
  auto records = p.store.find(body.key);
  send(p.id, msg.from, MsgKind::FindValueRep,
       FindValueRepBody{body.token, std::move(contacts), std::move(records)},
       msg.query_tag);
}

void Simulation::on_store(Peer& p, const Message& msg) {
  const auto& body = std::get<StoreBody>(msg.payload);
  if (msg.to != msg.from) p.rt.observe(peers_[msg.from].node, msg.from);
  bool stored = p.store.store(body.key, body.record, cycle_);
  send(p.id, msg.from, MsgKind::StoreRep, StoreRepBody{body.token, stored});
}

uint64_t Simulation::start_lookup(Peer& p, const NodeId& target, bool find_value,
                                  LookupState::Purpose purpose, uint64_t qtag,
                                  uint64_t query_id,
                                  std::optional<DescriptorRecord> reg,
                                  uint64_t preassigned_token) {
  LookupState ls;
  ls.token = preassigned_token ? preassigned_token : next_token_++;
  ls.target = target;
  ls.find_value = find_value;
  ls.purpose = purpose;
  ls.query_id = query_id;
  ls.reg_record = std::move(reg);
  ls.query_tag = qtag;
  ls.candidates.push_back({p.node, p.id, LookupState::CandState::Done, 0});
  for (const auto& c : p.rt.closest(target, cfg_.k_bucket)) {
    if (c.peer == p.id) continue;
    ls.candidates.push_back({c.node, c.peer, LookupState::CandState::Fresh, 1});
  }
  std::sort(ls.candidates.begin(), ls.candidates.end(),
            [&](const auto& a, const auto& b) { return closer_to(target, a.node, b.node); });
  uint64_t token = ls.token;
  auto [it, ok] = p.lookups.emplace(token, std::move(ls));
  lookup_pump(p, it->second);
  return token;
}

void Simulation::lookup_pump(Peer& p, LookupState& ls) {
  const size_t k = cfg_.k_bucket;
  while (ls.inflight < cfg_.alpha) {
    LookupState::Candidate* next = nullptr;
    size_t seen = 0;
    for (auto& c : ls.candidates) {
      if (c.state == LookupState::CandState::Failed) continue;
      if (seen >= k) break;
      ++seen;
      if (c.state == LookupState::CandState::Fresh) {
        next = &c;
        break;
      }
    }
    if (!next) break;
    next->state = LookupState::CandState::Inflight;
    ls.inflight++;
    ls.requests++;
    ls.max_depth = std::max(ls.max_depth, next->depth);
    if (ls.find_value)
      send(p.id, next->peer, MsgKind::FindValue, FindValueBody{ls.token, ls.target},
           ls.query_tag);
    else
      send(p.id, next->peer, MsgKind::FindNode, FindNodeBody{ls.token, ls.target},
           ls.query_tag);
    schedule_probe_timeout(p.id, ls.token, next->node, ls.query_tag);
  }
  if (ls.inflight == 0) {
    LookupState finished = std::move(ls);
    p.lookups.erase(finished.token);
    lookup_complete(p, std::move(finished));
  }
}

void Simulation::on_lookup_reply(Peer& p, uint64_t token, PeerId from,
                                 const std::vector<Contact>& contacts,
                                 const std::vector<DescriptorRecord>& records) {
  auto it = p.lookups.find(token);
  if (it == p.lookups.end()) return; // lookup already completed
  LookupState& ls = it->second;
  uint32_t from_depth = 0;
  for (auto& c : ls.candidates) {
    if (c.peer != from) continue;
    from_depth = c.depth;
    if (c.state == LookupState::CandState::Inflight) {
      c.state = LookupState::CandState::Done;
      if (ls.inflight > 0) ls.inflight--;
    } else if (c.state == LookupState::CandState::Failed) {
      c.state = LookupState::CandState::Done; // reply beat the obituary
    }
    break;
  }
  for (const auto& c : contacts) {
    bool known = std::any_of(ls.candidates.begin(), ls.candidates.end(),
                             [&](const auto& x) { return x.node == c.node; });
    if (known) continue;
    if (!std::binary_search(live_.begin(), live_.end(), c.peer) &&
        c.peer >= peers_.size())
      continue;
    LookupState::Candidate cand{c.node, c.peer, LookupState::CandState::Fresh,
                                from_depth + 1};
    auto pos = std::lower_bound(
        ls.candidates.begin(), ls.candidates.end(), cand,
        [&](const auto& a, const auto& b) { return closer_to(ls.target, a.node, b.node); });
    ls.candidates.insert(pos, cand);
  }
  // cap the shortlist; far Fresh entries can never affect the result
  constexpr size_t kMaxCandidates = 128;
  if (ls.candidates.size() > kMaxCandidates) {
    for (size_t i = ls.candidates.size(); i > 0 && ls.candidates.size() > kMaxCandidates;
         --i) {
      auto& c = ls.candidates[i - 1];
      if (c.state == LookupState::CandState::Fresh)
        ls.candidates.erase(ls.candidates.begin() + static_cast<long>(i - 1));
    }
  }
  for (const auto& r : records) ls.records.push_back(r);
  lookup_pump(p, ls);
}

void Simulation::lookup_timeout(Peer& p, uint64_t token, const NodeId& probed) {
  auto it = p.lookups.find(token);
  if (it == p.lookups.end()) return;
  LookupState& ls = it->second;
  for (auto& c : ls.candidates) {
    if (c.node != probed) continue;
    if (c.state == LookupState::CandState::Inflight) {
      c.state = LookupState::CandState::Failed;
      ls.any_failed = true;
      if (ls.inflight > 0) ls.inflight--;
      p.rt.remove(probed);
      lookup_pump(p, ls);
    }
    return;
  }
}

void Simulation::lookup_complete(Peer& p, LookupState ls) {
  std::vector<Contact> result;
  for (const auto& c : ls.candidates) {
    if (c.state != LookupState::CandState::Done) continue;
    result.push_back({c.node, c.peer});
    if (result.size() >= cfg_.k_bucket) break;
  }
  bool incomplete = ls.any_failed && result.size() < cfg_.k_bucket;

  switch (ls.purpose) {
    case LookupState::Purpose::SelfJoin:
      break;
    case LookupState::Purpose::Register: {
      for (const auto& c : result)
        send(p.id, c.peer, MsgKind::Store,
             StoreBody{next_token_++, ls.target, *ls.reg_record});
      break;
    }
    case LookupState::Purpose::QueryProbe:
      query_probe_done(p, ls);
      break;
    case LookupState::Purpose::Test:
      lookup_results_.push_back(
          {ls.target, std::move(result), ls.max_depth, ls.requests, incomplete});
      break;
  }
}

void Simulation::start_register(Peer& p) {
  DescriptorRecord rec{p.id, p.profile, all_signatures(*p.profile, lsh_),
                       p.elect.epoch};
  p.last_register_cycle = cycle_;
  p.registered_epoch = p.elect.epoch;
  p.ever_registered = true;
  for (uint32_t set = 0; set < lsh_.num_sets; ++set) {
    NodeId key = signature_key(set, rec.signatures[set]);
    start_lookup(p, key, false, LookupState::Purpose::Register, 0, 0, rec);
  }
}

// ---------------------------------------------------------------------------
// queries

void Simulation::count_comparisons(uint64_t qtag, uint64_t n) {
  if (!qtag) return;
  auto it = accounts_.find(qtag);
  if (it != accounts_.end()) it->second.comparisons += n;
}

void Simulation::launch_workload_query() {
  if (live_.empty()) return;
  PeerId entry = live_[rng_.uniform_u64(live_.size())];
  PeerId src = live_[rng_.uniform_u64(live_.size())];
  ProfileRef sample = perturb_profile(dataset_, src, rng_);
  queries_launched_++;
  uint64_t id = next_token_++;
  uint64_t flood_id = cfg_.flood_baseline ? next_token_++ : 0;
  launch_query(entry, sample, default_query_, false, id, flood_id);
  if (cfg_.flood_baseline) {
    QueryParams flood_params = default_query_;
    flood_params.theta = 0.0; // exhaustive baseline evaluates everything
    launch_query(entry, sample, flood_params, true, flood_id, id);
  }
}

void Simulation::launch_query(PeerId entry, ProfileRef sample,
                              const QueryParams& params, bool flood, uint64_t id,
                              uint64_t pair) {
  Peer& ep = peers_[entry];
  QueryRun run;
  run.id = id;
  run.pair = pair;
  run.flood = flood;
  run.params = params;
  run.sample = sample;
  run.entry = entry;
  run.launch_cycle = cycle_;
  {
    std::vector<std::pair<PeerId, ProfileRef>> population;
    population.reserve(live_.size());
    for (PeerId id2 : live_) population.emplace_back(id2, peers_[id2].profile);
    for (const auto& [pid, score] : brute_force_top_k(*sample, population, params.k))
      run.oracle.push_back(pid);
  }
  auto& acct = accounts_[id];
  acct.entry = entry;

  if (flood) {
    run.phase = 1;
    auto [it, ok] = ep.queries.emplace(id, std::move(run));
    QueryFwdBody body{id,    sample, params.theta, 0,     0, params.fanout,
                      entry, kNoPeer, true,        {}};
    flood_from(ep, body);
    if (accounts_[id].inflight == 0) query_finalize(ep, it->second);
    return;
  }

  std::vector<NodeId> keys;
  for (uint32_t set = 0; set < lsh_.num_sets; ++set) {
    uint64_t sig = simhash_signature(*sample, lsh_, set);
    for (uint64_t probe : probe_signatures(sig, lsh_.bits, cfg_.probe_radius))
      keys.push_back(signature_key(set, probe));
  }
  run.pending_probes = keys.size();
  ep.queries.emplace(id, std::move(run));
  for (const NodeId& key : keys)
    start_lookup(ep, key, true, LookupState::Purpose::QueryProbe, id, id);
}

void Simulation::query_probe_done(Peer& entry_peer, LookupState& ls) {
  auto qit = entry_peer.queries.find(ls.query_id);
  if (qit == entry_peer.queries.end()) return;
  QueryRun& run = qit->second;
  for (const auto& rec : ls.records) {
    auto [it, inserted] = run.candidates.emplace(rec.representative, rec);
    if (!inserted && rec.epoch > it->second.epoch) it->second = rec;
  }
  if (run.pending_probes > 0) run.pending_probes--;
  if (run.pending_probes == 0 && run.phase == 0) query_fanout(entry_peer, run);
}

void Simulation::query_fanout(Peer& entry_peer, QueryRun& run) {
  run.phase = 1;
  std::vector<std::pair<PeerId, double>> ranked;
  ranked.reserve(run.candidates.size());
  for (const auto& [rep, rec] : run.candidates)
    ranked.emplace_back(rep, similarity(*run.sample, *rec.descriptor));
  count_comparisons(run.id, run.candidates.size());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  run.descriptor_ranking = ranked;

  size_t m = std::min(run.params.m, ranked.size());
  if (m == 0) {
    query_finalize(entry_peer, run);
    return;
  }
  std::vector<PeerId> visited;
  for (size_t i = 0; i < m; ++i) visited.push_back(ranked[i].first);
  for (size_t i = 0; i < m; ++i) {
    PeerId rep = ranked[i].first;
    QueryFwdBody body{run.id,        run.sample,        run.params.theta,
                      run.params.ttl, run.params.ttl,   run.params.fanout,
                      run.entry,     rep,               false,
                      visited};
    send(entry_peer.id, rep, MsgKind::QueryFwd, std::move(body), run.id);
  }
}

void Simulation::on_query_fwd(Peer& p, const Message& msg) {
  flood_from(p, std::get<QueryFwdBody>(msg.payload), msg.from);
}

void Simulation::flood_from(Peer& p, const QueryFwdBody& q, PeerId from) {
  if (p.seen_queries.count(q.query_id)) return; // duplicate: no messages at all
  p.seen_queries[q.query_id] = cycle_ + 2 * std::max(1u, q.orig_ttl);

  double score = similarity(*q.sample, *p.profile);
  count_comparisons(q.query_id, 1);
  if (score >= q.theta) {
    if (p.id == q.entry) {
      auto it = p.queries.find(q.query_id);
      if (it != p.queries.end()) it->second.matches[p.id] = {p.profile, score};
    } else {
      send(p.id, q.entry, MsgKind::QueryHit,
           QueryHitBody{q.query_id, p.id, p.profile, score}, q.query_id);
    }
  }

  if (q.flood) {
    std::set<PeerId> targets;
    for (const auto& e : p.gossip.random_view) targets.insert(e.peer);
    for (const auto& e : p.gossip.similar_view) targets.insert(e.peer);
    targets.erase(p.id);
    if (from != kNoPeer) targets.erase(from);
    for (PeerId t : targets) send(p.id, t, MsgKind::QueryFwd, q, q.query_id);
    return;
  }
  if (q.ttl == 0) return;

  // community-gated greedy forwarding toward the sample
  std::vector<std::pair<double, ViewEntry>> ranked;
  for (const auto& e : p.gossip.similar_view) {
    if (std::find(q.visited.begin(), q.visited.end(), e.peer) != q.visited.end())
      continue;
    auto hint = p.known_community.find(e.peer);
    if (hint != p.known_community.end() && q.community != kNoPeer &&
        hint->second != q.community)
      continue;
    ranked.emplace_back(similarity(*q.sample, *e.profile), e);
  }
  count_comparisons(q.query_id, ranked.size());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.peer < b.second.peer;
  });
  size_t fanout = std::min(static_cast<size_t>(q.fanout), ranked.size());
  if (fanout == 0) return;
  QueryFwdBody child = q;
  child.ttl = q.ttl - 1;
  for (size_t i = 0; i < fanout; ++i) child.visited.push_back(ranked[i].second.peer);
  for (size_t i = 0; i < fanout; ++i)
    send(p.id, ranked[i].second.peer, MsgKind::QueryFwd, child, q.query_id);
}

void Simulation::on_query_hit(Peer& p, const Message& msg) {
  const auto& body = std::get<QueryHitBody>(msg.payload);
  auto it = p.queries.find(body.query_id);
  if (it == p.queries.end()) return;
  auto& slot = it->second.matches[body.peer];
  if (!slot.first || body.score > slot.second) slot = {body.profile, body.score};
}

void Simulation::query_finalize(Peer& entry_peer, QueryRun& run) {
  auto acct_it = accounts_.find(run.id);
  QueryAccount acct = acct_it == accounts_.end() ? QueryAccount{} : acct_it->second;

  std::vector<std::pair<PeerId, std::pair<ProfileRef, double>>> ms(
      run.matches.begin(), run.matches.end());
  std::sort(ms.begin(), ms.end(), [](const auto& a, const auto& b) {
    if (a.second.second != b.second.second) return a.second.second > b.second.second;
    return a.first < b.first;
  });
  std::erase_if(ms, [&](const auto& m) { return m.second.second < run.params.theta; });
  if (ms.size() > run.params.k) ms.resize(run.params.k);

  size_t hits = 0;
  for (const auto& [pid, pr] : ms)
    if (std::find(run.oracle.begin(), run.oracle.end(), pid) != run.oracle.end())
      ++hits;

  QueryRecord rec;
  rec.id = run.id;
  rec.pair = run.pair;
  rec.flood = run.flood;
  rec.entry = run.entry;
  rec.cycle = run.launch_cycle;
  rec.recall = run.oracle.empty()
                   ? 1.0
                   : static_cast<double>(hits) / static_cast<double>(run.oracle.size());
  rec.n_matches = static_cast<uint32_t>(ms.size());
  rec.top_score = ms.empty() ? 0.0 : ms.front().second.second;
  rec.messages = acct.messages;
  rec.comparisons = acct.comparisons;
  rec.peers_contacted = acct.contacted.size();
  rec.dht_hops = acct.dht_requests;
  rec.drops = acct.drops;
  rec.entry_left = !entry_peer.alive;
  query_records_.push_back(rec);
  emit_line(rec.to_line());

  if (acct_it != accounts_.end()) acct_it->second.open = false;
  entry_peer.queries.erase(run.id);
}

// ---------------------------------------------------------------------------
// metrics & inspection

std::vector<PeerId> Simulation::representatives() const {
  std::vector<PeerId> reps;
  for (PeerId id : live_) {
    const Peer& p = peers_[id];
    if (is_representative(p.elect, p.id) &&
        cycle_ >= p.elect.epoch_start + ecfg_.e_conv)
      reps.push_back(id);
  }
  return reps;
}

size_t Simulation::community_count() const {
  std::set<PeerId> cands;
  for (PeerId id : live_) cands.insert(peers_[id].elect.candidate);
  return cands.size();
}

std::vector<PeerId> Simulation::oracle_top_for(PeerId peer, size_t k) const {
  std::vector<std::pair<PeerId, ProfileRef>> population;
  population.reserve(live_.size());
  for (PeerId id : live_)
    if (id != peer) population.emplace_back(id, peers_[id].profile);
  std::vector<PeerId> out;
  if (population.empty()) return out;
  for (const auto& [pid, score] :
       brute_force_top_k(*peers_[peer].profile, population, k))
    out.push_back(pid);
  return out;
}

double Simulation::mean_view_quality(uint32_t sample_limit) const {
  if (live_.empty()) return 1.0;
  std::vector<PeerId> sample = live_;
  if (sample_limit > 0 && sample_limit < sample.size()) {
    // metrics_rng_ is mutable state only through this const_cast-free path:
    // sampling must not disturb protocol randomness
    Rng& mrng = const_cast<Simulation*>(this)->metrics_rng_;
    mrng.shuffle(sample);
    sample.resize(sample_limit);
  }
  double acc = 0.0;
  for (PeerId id : sample) {
    auto oracle = oracle_top_for(id, gcfg_.c_s);
    acc += view_quality(peers_[id].gossip, oracle, gcfg_);
  }
  return acc / static_cast<double>(sample.size());
}

std::vector<Contact> Simulation::brute_force_closest(const NodeId& target,
                                                     size_t k) const {
  std::vector<Contact> all;
  for (PeerId id : live_) all.push_back({peers_[id].node, id});
  std::sort(all.begin(), all.end(), [&](const Contact& a, const Contact& b) {
    return closer_to(target, a.node, b.node);
  });
  if (all.size() > k) all.resize(k);
  return all;
}

bool Simulation::conservation_holds() const {
  if (counters_.sent != counters_.delivered + counters_.dropped_churn) return false;
  for (size_t k = 0; k < SimCounters::kKinds; ++k)
    if (counters_.sent_by_kind[k] !=
        counters_.delivered_by_kind[k] + counters_.dropped_by_kind[k])
      return false;
  return true;
}

void Simulation::emit_line(const std::string& line) {
  metrics_ += line;
  metrics_ += "\n";
  if (sink_) (*sink_) << line << "\n";
}

void Simulation::emit_frame() {
  uint64_t records = 0;
  for (PeerId id : live_) records += peers_[id].store.size();
  std::ostringstream os;
  os << "frame cycle=" << cycle_ << " live=" << live_.size()
     << " vq=" << format_metric(mean_view_quality(cfg_.vq_sample))
     << " reps=" << representatives().size() << " communities=" << community_count()
     << " records=" << records << " sent=" << counters_.sent
     << " delivered=" << counters_.delivered << " dropped=" << counters_.dropped_churn;
  for (size_t k = 0; k < SimCounters::kKinds; ++k)
    os << " m." << to_string(static_cast<MsgKind>(k)) << "="
       << counters_.sent_by_kind[k];
  emit_line(os.str());
}

void Simulation::emit_final() {
  std::ostringstream os;
  os << "final cycle=" << cycle_ << " live=" << live_.size()
     << " reps=" << representatives().size() << " communities=" << community_count()
     << " sent=" << counters_.sent << " delivered=" << counters_.delivered
     << " dropped=" << counters_.dropped_churn
     << " conservation=" << (conservation_holds() ? "ok" : "BROKEN");
  emit_line(os.str());
  std::map<PeerId, size_t> members;
  for (PeerId id : live_) members[peers_[id].elect.candidate]++;
  for (PeerId rep : representatives()) {
    std::ostringstream rs;
    rs << "rep id=" << rep << " members=" << members[rep]
       << " epoch=" << peers_[rep].elect.epoch;
    emit_line(rs.str());
  }
}

} // namespace atlaas

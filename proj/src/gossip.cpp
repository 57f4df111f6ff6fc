#include "atlaas/gossip.hpp"

#include <algorithm>
#include <map>

namespace atlaas {
namespace {

// Merge incoming entries into the random view. Duplicate peers keep the
// fresher entry; once full, evict preferred victims first, then the oldest.
void merge_random(GossipState& state, PeerId self, std::span<const ViewEntry> incoming,
                  std::span<const PeerId> prefer_evict, size_t capacity) {
  for (const ViewEntry& in : incoming) {
    if (in.peer == self) continue;
    auto dup = std::find_if(state.random_view.begin(), state.random_view.end(),
                            [&](const ViewEntry& e) { return e.peer == in.peer; });
    if (dup != state.random_view.end()) {
      if (in.age < dup->age) *dup = in;
      continue;
    }
    if (state.random_view.size() < capacity) {
      state.random_view.push_back(in);
      continue;
    }
    auto victim = state.random_view.end();
    for (PeerId pe : prefer_evict) {
      victim = std::find_if(state.random_view.begin(), state.random_view.end(),
                            [&](const ViewEntry& e) { return e.peer == pe; });
      if (victim != state.random_view.end()) break;
    }
    if (victim == state.random_view.end()) {
      victim = std::max_element(state.random_view.begin(), state.random_view.end(),
                                [](const ViewEntry& a, const ViewEntry& b) {
                                  if (a.age != b.age) return a.age < b.age;
                                  return a.peer > b.peer;
                                });
    }
    *victim = in;
  }
}

std::vector<size_t> pick_indices(size_t n, size_t count, Rng& rng) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  if (count < idx.size()) idx.resize(count);
  return idx;
}

} // namespace

bool GossipState::contains(const std::vector<ViewEntry>& view, PeerId p) const {
  return std::any_of(view.begin(), view.end(),
                     [&](const ViewEntry& e) { return e.peer == p; });
}

void age_views(GossipState& state) {
  for (auto& e : state.random_view) ++e.age;
  for (auto& e : state.similar_view) ++e.age;
  state.pending.reset();
}

std::optional<ShuffleBegin> shuffle_begin(GossipState& state, PeerId self,
                                          const ProfileRef& self_profile,
                                          const GossipConfig& cfg, Rng& rng) {
  if (state.random_view.empty()) return std::nullopt;
  auto oldest = std::max_element(state.random_view.begin(), state.random_view.end(),
                                 [](const ViewEntry& a, const ViewEntry& b) {
                                   if (a.age != b.age) return a.age < b.age;
                                   return a.peer > b.peer;
                                 });
  ShuffleBegin begin;
  begin.partner = oldest->peer;
  state.random_view.erase(oldest);

  begin.entries.push_back({self, self_profile, 0});
  size_t others = std::min(cfg.shuffle_len() - 1, state.random_view.size());
  PendingShuffle pending{begin.partner, {}};
  for (size_t i : pick_indices(state.random_view.size(), others, rng)) {
    begin.entries.push_back(state.random_view[i]);
    pending.sent.push_back(state.random_view[i].peer);
  }
  state.pending = std::move(pending);
  return begin;
}

std::vector<ViewEntry> shuffle_handle_request(GossipState& state, PeerId self,
                                              std::span<const ViewEntry> incoming,
                                              const GossipConfig& cfg, Rng& rng) {
  std::vector<ViewEntry> reply;
  std::vector<PeerId> sent;
  size_t count = std::min(cfg.shuffle_len(), state.random_view.size());
  for (size_t i : pick_indices(state.random_view.size(), count, rng)) {
    reply.push_back(state.random_view[i]);
    sent.push_back(state.random_view[i].peer);
  }
  merge_random(state, self, incoming, sent, cfg.c_r);
  return reply;
}

void shuffle_handle_reply(GossipState& state, PeerId self,
                          std::span<const ViewEntry> incoming,
                          const GossipConfig& cfg) {
  std::vector<PeerId> prefer;
  if (state.pending) prefer = state.pending->sent;
  merge_random(state, self, incoming, prefer, cfg.c_r);
  state.pending.reset();
}

std::optional<ViewEntry> similar_partner(const GossipState& state,
                                         const Profile& self_profile) {
  if (!state.similar_view.empty()) return state.similar_view.front();
  if (state.random_view.empty()) return std::nullopt;
  const ViewEntry* best = nullptr;
  double best_sim = -1.0;
  for (const auto& e : state.random_view) {
    double s = similarity(self_profile, *e.profile);
    if (s > best_sim || (s == best_sim && best && e.peer < best->peer)) {
      best = &e;
      best_sim = s;
    }
  }
  return *best;
}

namespace {

// union of views keyed by peer, keeping the freshest entry per peer
std::map<PeerId, ViewEntry> view_union(const GossipState& state, PeerId self,
                                       const ProfileRef& self_profile,
                                       bool include_self) {
  std::map<PeerId, ViewEntry> u;
  auto add = [&](const ViewEntry& e) {
    auto [it, inserted] = u.emplace(e.peer, e);
    if (!inserted && e.age < it->second.age) it->second = e;
  };
  for (const auto& e : state.similar_view) add(e);
  for (const auto& e : state.random_view) add(e);
  if (include_self && self_profile) add({self, self_profile, 0});
  return u;
}

void rank_by_similarity(std::vector<ViewEntry>& entries, const Profile& target) {
  std::vector<std::pair<double, ViewEntry>> scored;
  scored.reserve(entries.size());
  for (auto& e : entries) scored.emplace_back(similarity(target, *e.profile), std::move(e));
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.peer < b.second.peer;
  });
  entries.clear();
  for (auto& [s, e] : scored) entries.push_back(std::move(e));
}

} // namespace

std::vector<ViewEntry> similar_payload(const GossipState& state, PeerId self,
                                       const ProfileRef& self_profile,
                                       const Profile& partner_profile,
                                       const GossipConfig& cfg) {
  std::vector<ViewEntry> entries;
  for (auto& [id, e] : view_union(state, self, self_profile, true))
    entries.push_back(std::move(e));
  rank_by_similarity(entries, partner_profile);
  if (entries.size() > cfg.c_r) entries.resize(cfg.c_r);
  return entries;
}

void similar_merge(GossipState& state, PeerId self, const Profile& self_profile,
                   std::span<const ViewEntry> incoming, const GossipConfig& cfg) {
  std::map<PeerId, ViewEntry> u = view_union(state, self, nullptr, false);
  for (const ViewEntry& in : incoming) {
    if (in.peer == self) continue;
    auto [it, inserted] = u.emplace(in.peer, in);
    if (!inserted && in.age < it->second.age) it->second = in;
  }
  std::vector<ViewEntry> entries;
  entries.reserve(u.size());
  for (auto& [id, e] : u) entries.push_back(std::move(e));
  rank_by_similarity(entries, self_profile);
  if (entries.size() > cfg.c_s) entries.resize(cfg.c_s);
  state.similar_view = std::move(entries);
}

double view_quality(const GossipState& state, std::span<const PeerId> oracle_top,
                    const GossipConfig& cfg) {
  size_t denom = std::min(cfg.c_s, oracle_top.size());
  if (denom == 0) return 1.0;
  size_t hit = 0;
  for (const auto& e : state.similar_view)
    if (std::find(oracle_top.begin(), oracle_top.end(), e.peer) != oracle_top.end())
      ++hit;
  return static_cast<double>(hit) / static_cast<double>(denom);
}

} // namespace atlaas

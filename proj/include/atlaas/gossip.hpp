#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "atlaas/profile.hpp"
#include "atlaas/rng.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

struct ViewEntry {
  PeerId peer = kNoPeer;
  ProfileRef profile;
  uint32_t age = 0;
};

struct GossipConfig {
  size_t c_r = 20; // random view capacity
  size_t c_s = 10; // similar view capacity
  size_t shuffle_len() const { return (c_r + 1) / 2; }
};

/// Outstanding Cyclon shuffle: entries sent to the partner are the preferred
/// eviction victims when its reply arrives.
struct PendingShuffle {
  PeerId partner = kNoPeer;
  std::vector<PeerId> sent;
};

/// Per-peer overlay state. random_view is unordered; similar_view is kept
/// sorted by (similarity to the owner, descending; peer id ascending).
struct GossipState {
  std::vector<ViewEntry> random_view;
  std::vector<ViewEntry> similar_view;
  std::optional<PendingShuffle> pending;

  bool contains(const std::vector<ViewEntry>& view, PeerId p) const;
};

/// Ages every entry by one cycle and abandons a shuffle whose reply never
/// arrived (the partner entry was already removed on initiation).
void age_views(GossipState& state);

struct ShuffleBegin {
  PeerId partner = kNoPeer;
  std::vector<ViewEntry> entries; // first entry is the sender, age 0
};

/// Cyclon initiator step: picks the oldest random-view entry as partner,
/// removes it, and sends ⌈c_r/2⌉ entries including a fresh self-entry.
std::optional<ShuffleBegin> shuffle_begin(GossipState& state, PeerId self,
                                          const ProfileRef& self_profile,
                                          const GossipConfig& cfg, Rng& rng);

/// Responder side: replies with a random subset of its view, then merges the
/// received entries, evicting the entries it just sent first.
std::vector<ViewEntry> shuffle_handle_request(GossipState& state, PeerId self,
                                              std::span<const ViewEntry> incoming,
                                              const GossipConfig& cfg, Rng& rng);

void shuffle_handle_reply(GossipState& state, PeerId self,
                          std::span<const ViewEntry> incoming,
                          const GossipConfig& cfg);

/// Highest-similarity known peer: best similar_view entry, falling back to
/// the most similar random_view entry.
std::optional<ViewEntry> similar_partner(const GossipState& state,
                                         const Profile& self_profile);

/// Entries offered to a partner: the union of both views plus a fresh
/// self-entry, ranked by similarity to the partner, capped at c_r.
std::vector<ViewEntry> similar_payload(const GossipState& state, PeerId self,
                                       const ProfileRef& self_profile,
                                       const Profile& partner_profile,
                                       const GossipConfig& cfg);

/// Keeps the top-c_s of (current similar view ∪ incoming ∪ own random view)
/// ranked by similarity to the owner. Candidate sets always include the
/// current view, so per-peer view quality is monotone in a static network.
void similar_merge(GossipState& state, PeerId self, const Profile& self_profile,
                   std::span<const ViewEntry> incoming, const GossipConfig& cfg);

/// Overlap between similar_view and the true top-c_s neighbor set, normalized
/// by the achievable maximum min(c_s, |oracle|); 1.0 when the oracle is empty.
double view_quality(const GossipState& state, std::span<const PeerId> oracle_top,
                    const GossipConfig& cfg);

} // namespace atlaas

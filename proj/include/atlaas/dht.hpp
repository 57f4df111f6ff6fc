#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "atlaas/node_id.hpp"
#include "atlaas/profile.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

/// A representative's community descriptor as registered on the DHT.
struct DescriptorRecord {
  PeerId representative = kNoPeer;
  ProfileRef descriptor;               // the representative's own profile
  std::vector<uint64_t> signatures;    // one simhash per hyperplane set
  uint32_t epoch = 0;
};

/// Per-node record storage. Indexed by representative id so a holder never
/// serves two records for one representative: a newer epoch replaces the
/// older record together with all keys it was stored under.
class HolderStore {
 public:
  /// Returns false when an equal-or-newer epoch for this representative is
  /// already held (the key is still remembered for the newer record).
  bool store(const NodeId& key, const DescriptorRecord& rec, uint32_t now_cycle);

  std::vector<DescriptorRecord> find(const NodeId& key) const;

  /// Drop records not refreshed within ttl cycles.
  void expire(uint32_t now_cycle, uint32_t ttl);

  size_t size() const { return records_.size(); }
  bool holds_representative(PeerId rep) const { return records_.count(rep) > 0; }
  uint32_t epoch_of(PeerId rep) const;

 private:
  struct Held {
    DescriptorRecord record;
    std::set<NodeId> keys;
    uint32_t stored_cycle = 0;
  };
  std::map<PeerId, Held> records_;
};

} // namespace atlaas

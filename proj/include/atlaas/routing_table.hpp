#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "atlaas/node_id.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

struct Contact {
  NodeId node;
  PeerId peer = kNoPeer;
};

/// Kademlia k-buckets: bucket j holds nodes whose XOR distance to self has
/// highest set bit j. Each bucket is ordered least-recently-seen first; a
/// full bucket evicts its least-recently-seen entry. Buckets whose distance
/// range holds fewer than k live nodes therefore never evict, which is what
/// iterative lookups rely on for exactness.
class RoutingTable {
 public:
  RoutingTable() = default;
  RoutingTable(const NodeId& self, size_t k) : self_(self), k_(k) {}

  /// Insert or refresh (move to most-recently-seen).
  void observe(const NodeId& node, PeerId peer);
  void remove(const NodeId& node);

  /// The count globally closest known contacts to target, ascending distance.
  std::vector<Contact> closest(const NodeId& target, size_t count) const;

  size_t size() const;
  const NodeId& self() const { return self_; }

 private:
  NodeId self_{};
  size_t k_ = 8;
  std::array<std::vector<Contact>, NodeId::kBits> buckets_{};
};

} // namespace atlaas

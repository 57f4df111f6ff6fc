#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "atlaas/types.hpp"

namespace atlaas {

/// 160-bit DHT identifier, big-endian (bit 0 is the MSB of bytes[0]).
struct NodeId {
  std::array<uint8_t, 20> bytes{};

  static constexpr int kBits = 160;

  /// SHA-1 of a peer-id tag; uniform in the key space.
  static NodeId for_peer(PeerId peer);
  /// SHA-1 of (set-index, signature) with the set index as the top byte, so
  /// signature sets occupy disjoint key regions.
  static NodeId for_signature(uint32_t set_index, uint64_t signature);
  static NodeId from_hash(const std::string& data);

  auto operator<=>(const NodeId&) const = default;

  std::string hex() const;
};

NodeId xor_distance(const NodeId& a, const NodeId& b);

/// Index of the highest set bit (159 = MSB), -1 when zero. Bucket index for
/// a distance.
int highest_bit(const NodeId& d);

/// Lexicographic compare of XOR distances (big-endian bytes = numeric order).
inline bool distance_less(const NodeId& a, const NodeId& b) { return a.bytes < b.bytes; }

/// d(a, target) < d(b, target)
bool closer_to(const NodeId& target, const NodeId& a, const NodeId& b);

} // namespace atlaas

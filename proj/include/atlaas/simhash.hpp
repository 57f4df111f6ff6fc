#pragma once

#include <cstdint>
#include <vector>

#include "atlaas/node_id.hpp"
#include "atlaas/profile.hpp"

namespace atlaas {

/// Random-hyperplane sketches. A hyperplane's sign for a label is a pure
/// function of (seed, set_index, plane, label), so signatures are
/// recomputable from a profile without materializing the hyperplanes.
struct SimhashConfig {
  uint64_t seed = 1;
  uint32_t num_sets = 4; // L
  uint32_t bits = 16;    // b, <= 64
};

/// Bit j set iff dot(p, hyperplane_j) >= 0. Invariant under positive scaling
/// of p; expected Hamming distance between two profiles is bits * θ / π.
uint64_t simhash_signature(const Profile& p, const SimhashConfig& cfg,
                           uint32_t set_index);

std::vector<uint64_t> all_signatures(const Profile& p, const SimhashConfig& cfg);

/// Every signature within Hamming distance <= radius, deterministic order
/// (distance ascending, flipped bit positions ascending). radius <= 3.
std::vector<uint64_t> probe_signatures(uint64_t signature, uint32_t bits,
                                       uint32_t radius);

int hamming(uint64_t a, uint64_t b);

/// DHT key for one signature of one set.
NodeId signature_key(uint32_t set_index, uint64_t signature);

} // namespace atlaas

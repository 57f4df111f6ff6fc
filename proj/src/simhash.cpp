#include "atlaas/simhash.hpp"

#include <bit>
#include <stdexcept>

#include "atlaas/rng.hpp"

namespace atlaas {

uint64_t simhash_signature(const Profile& p, const SimhashConfig& cfg,
                           uint32_t set_index) {
  if (cfg.bits < 1 || cfg.bits > 64)
    throw std::invalid_argument("simhash: bits must be in [1,64]");
  uint64_t sig = 0;
  for (uint32_t j = 0; j < cfg.bits; ++j) {
    double acc = 0.0;
    for (const auto& [label, w] : p.weights()) {
      uint64_t h = mix64(cfg.seed, set_index, j, label);
      acc += (h & 1) ? w : -w;
    }
    if (acc >= 0.0) sig |= (1ULL << j);
  }
  return sig;
}

std::vector<uint64_t> all_signatures(const Profile& p, const SimhashConfig& cfg) {
  std::vector<uint64_t> sigs(cfg.num_sets);
  for (uint32_t i = 0; i < cfg.num_sets; ++i) sigs[i] = simhash_signature(p, cfg, i);
  return sigs;
}

std::vector<uint64_t> probe_signatures(uint64_t signature, uint32_t bits,
                                       uint32_t radius) {
  if (radius > 3) throw std::invalid_argument("probe_signatures: radius <= 3");
  std::vector<uint64_t> out{signature};
  if (radius >= 1)
    for (uint32_t i = 0; i < bits; ++i) out.push_back(signature ^ (1ULL << i));
  if (radius >= 2)
    for (uint32_t i = 0; i < bits; ++i)
      for (uint32_t j = i + 1; j < bits; ++j)
        out.push_back(signature ^ (1ULL << i) ^ (1ULL << j));
  if (radius >= 3)
    for (uint32_t i = 0; i < bits; ++i)
      for (uint32_t j = i + 1; j < bits; ++j)
        for (uint32_t l = j + 1; l < bits; ++l)
          out.push_back(signature ^ (1ULL << i) ^ (1ULL << j) ^ (1ULL << l));
  return out;
}

int hamming(uint64_t a, uint64_t b) { return std::popcount(a ^ b); }

NodeId signature_key(uint32_t set_index, uint64_t signature) {
  return NodeId::for_signature(set_index, signature);
}

} // namespace atlaas

#include "atlaas/node_id.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <stdexcept>

namespace atlaas {
namespace {

std::array<uint8_t, 20> sha1(const std::string& data) {
  std::array<uint8_t, 20> out{};
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha1(), nullptr) ||
      len != out.size())
    throw std::runtime_error("sha1 failed");
  return out;
}

} // namespace

NodeId NodeId::from_hash(const std::string& data) {
  NodeId id;
  id.bytes = sha1(data);
  return id;
}

NodeId NodeId::for_peer(PeerId peer) {
  return from_hash("atlaas-node:" + std::to_string(peer));
}

NodeId NodeId::for_signature(uint32_t set_index, uint64_t signature) {
  NodeId id = from_hash("atlaas-key:" + std::to_string(set_index) + ":" +
                        std::to_string(signature));
  id.bytes[0] = static_cast<uint8_t>(set_index);
  return id;
}

std::string NodeId::hex() const {
  std::string s(40, '0');
  for (size_t i = 0; i < bytes.size(); ++i)
    std::snprintf(s.data() + 2 * i, 3, "%02x", bytes[i]);
  return s;
}

NodeId xor_distance(const NodeId& a, const NodeId& b) {
  NodeId d;
  for (size_t i = 0; i < d.bytes.size(); ++i) d.bytes[i] = a.bytes[i] ^ b.bytes[i];
  return d;
}

int highest_bit(const NodeId& d) {
  for (size_t i = 0; i < d.bytes.size(); ++i) {
    if (d.bytes[i] == 0) continue;
    int msb = 7;
    while (!(d.bytes[i] & (1u << msb))) --msb;
    return static_cast<int>((d.bytes.size() - 1 - i) * 8) + msb;
  }
  return -1;
}

bool closer_to(const NodeId& target, const NodeId& a, const NodeId& b) {
  return distance_less(xor_distance(target, a), xor_distance(target, b));
}

} // namespace atlaas

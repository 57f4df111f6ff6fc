#include "atlaas/routing_table.hpp"

#include <algorithm>

namespace atlaas {

void RoutingTable::observe(const NodeId& node, PeerId peer) {
  int bit = highest_bit(xor_distance(self_, node));
  if (bit < 0) return; // self
  auto& bucket = buckets_[static_cast<size_t>(bit)];
  auto it = std::find_if(bucket.begin(), bucket.end(),
                         [&](const Contact& c) { return c.node == node; });
  if (it != bucket.end()) {
    Contact c = *it;
    bucket.erase(it);
    bucket.push_back(c);
    return;
  }
  if (bucket.size() >= k_) bucket.erase(bucket.begin());
  bucket.push_back({node, peer});
}

void RoutingTable::remove(const NodeId& node) {
  int bit = highest_bit(xor_distance(self_, node));
  if (bit < 0) return;
  auto& bucket = buckets_[static_cast<size_t>(bit)];
  std::erase_if(bucket, [&](const Contact& c) { return c.node == node; });
}

std::vector<Contact> RoutingTable::closest(const NodeId& target, size_t count) const {
  std::vector<Contact> all;
  all.reserve(size());
  for (const auto& bucket : buckets_)
    all.insert(all.end(), bucket.begin(), bucket.end());
  std::sort(all.begin(), all.end(), [&](const Contact& a, const Contact& b) {
    return closer_to(target, a.node, b.node);
  });
  if (all.size() > count) all.resize(count);
  return all;
}

size_t RoutingTable::size() const {
  size_t n = 0;
  for (const auto& b : buckets_) n += b.size();
  return n;
}

} // namespace atlaas

#include "atlaas/dht.hpp"

namespace atlaas {

bool HolderStore::store(const NodeId& key, const DescriptorRecord& rec,
                        uint32_t now_cycle) {
  auto it = records_.find(rec.representative);
  if (it == records_.end()) {
    Held h{rec, {key}, now_cycle};
    records_.emplace(rec.representative, std::move(h));
    return true;
  }
  if (rec.epoch > it->second.record.epoch) {
    it->second.record = rec;
    it->second.keys = {key};
    it->second.stored_cycle = now_cycle;
    return true;
  }
  if (rec.epoch == it->second.record.epoch) {
    it->second.keys.insert(key);
    it->second.stored_cycle = now_cycle;
    return true;
  }
  return false; // older epoch
}

std::vector<DescriptorRecord> HolderStore::find(const NodeId& key) const {
  std::vector<DescriptorRecord> out;
  for (const auto& [rep, held] : records_)
    if (held.keys.count(key)) out.push_back(held.record);
  return out;
}

void HolderStore::expire(uint32_t now_cycle, uint32_t ttl) {
  for (auto it = records_.begin(); it != records_.end();) {
    if (now_cycle > it->second.stored_cycle &&
        now_cycle - it->second.stored_cycle > ttl) {
      it = records_.erase(it);
    } else {
      ++it;
    }
  }
}

uint32_t HolderStore::epoch_of(PeerId rep) const {
  auto it = records_.find(rep);
  return it == records_.end() ? 0 : it->second.record.epoch;
}

} // namespace atlaas

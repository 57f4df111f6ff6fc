#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "atlaas/dht.hpp"
#include "atlaas/election.hpp"
#include "atlaas/gossip.hpp"
#include "atlaas/node_id.hpp"
#include "atlaas/routing_table.hpp"
#include "atlaas/types.hpp"

namespace atlaas {

enum class MsgKind : uint8_t {
  ShuffleReq,
  ShuffleRep,
  SimReq,
  SimRep,
  Ping,
  Pong,
  FindNode,
  FindNodeRep,
  FindValue,
  FindValueRep,
  Store,
  StoreRep,
  QueryFwd,
  QueryHit,
  kCount
};

const char* to_string(MsgKind k);

struct ShuffleReqBody {
  std::vector<ViewEntry> entries; // first entry is the sender, age 0
};
struct ShuffleRepBody {
  std::vector<ViewEntry> entries;
};
struct SimReqBody {
  std::vector<ViewEntry> entries; // ranked for the recipient, capped at c_r
  CandidateInfo candidate;
  ProfileRef sender_profile; // lets the recipient rank its reply
};
struct SimRepBody {
  std::vector<ViewEntry> entries;
  CandidateInfo candidate;
};
struct PingBody {
  NodeId node;
};
struct PongBody {
  NodeId node;
};
struct FindNodeBody {
  uint64_t token = 0;
  NodeId target;
};
struct FindNodeRepBody {
  uint64_t token = 0;
  std::vector<Contact> contacts;
};
struct FindValueBody {
  uint64_t token = 0;
  NodeId key;
};
struct FindValueRepBody {
  uint64_t token = 0;
  std::vector<Contact> contacts;
  std::vector<DescriptorRecord> records;
};
struct StoreBody {
  uint64_t token = 0;
  NodeId key;
  DescriptorRecord record;
};
struct StoreRepBody {
  uint64_t token = 0;
  bool stored = false;
};
struct QueryFwdBody {
  uint64_t query_id = 0;
  ProfileRef sample;
  double theta = 0.0;
  uint32_t ttl = 0;       // remaining forwards after this hop
  uint32_t orig_ttl = 0;  // for dedup-table expiry
  uint32_t fanout = 0;
  PeerId entry = kNoPeer;     // where hits are sent
  PeerId community = kNoPeer; // representative whose community this flood serves
  bool flood = false;         // global flood baseline: forward to all neighbors
  std::vector<PeerId> visited;
};
struct QueryHitBody {
  uint64_t query_id = 0;
  PeerId peer = kNoPeer;
  ProfileRef profile;
  double score = 0.0;
};

using Payload =
    std::variant<ShuffleReqBody, ShuffleRepBody, SimReqBody, SimRepBody, PingBody,
                 PongBody, FindNodeBody, FindNodeRepBody, FindValueBody,
                 FindValueRepBody, StoreBody, StoreRepBody, QueryFwdBody,
                 QueryHitBody>;

struct Message {
  PeerId from = kNoPeer;
  PeerId to = kNoPeer;
  MsgKind kind = MsgKind::Ping;
  uint64_t query_tag = 0; // nonzero: costs attributed to this query
  Payload payload;
};

} // namespace atlaas

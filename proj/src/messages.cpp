#include "atlaas/messages.hpp"

namespace atlaas {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::ShuffleReq: return "SHUFFLE_REQ";
    case MsgKind::ShuffleRep: return "SHUFFLE_REP";
    case MsgKind::SimReq: return "SIM_REQ";
    case MsgKind::SimRep: return "SIM_REP";
    case MsgKind::Ping: return "PING";
    case MsgKind::Pong: return "PONG";
    case MsgKind::FindNode: return "FIND_NODE";
    case MsgKind::FindNodeRep: return "FIND_NODE_REP";
    case MsgKind::FindValue: return "FIND_VALUE";
    case MsgKind::FindValueRep: return "FIND_VALUE_REP";
    case MsgKind::Store: return "STORE";
    case MsgKind::StoreRep: return "STORE_REP";
    case MsgKind::QueryFwd: return "QUERY_FWD";
    case MsgKind::QueryHit: return "QUERY_HIT";
    case MsgKind::kCount: break;
  }
  return "UNKNOWN";
}

} // namespace atlaas

#pragma once

#include <cstdint>
#include <memory>

namespace atlaas {

using PeerId = uint32_t;
using LabelId = uint32_t;

class Profile;
/// Profiles are immutable after construction; entries in views, messages and
/// records share one instance per peer.
using ProfileRef = std::shared_ptr<const Profile>;

constexpr PeerId kNoPeer = static_cast<PeerId>(-1);

} // namespace atlaas

// Control and data packet vocabulary shared by every routing agent.
#pragma once

#include "wsnsim/kernel.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace wsnsim {

using SeqNo = std::uint32_t;

inline constexpr std::uint32_t kInfiniteMetric = std::numeric_limits<std::uint32_t>::max();
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max() - 2;

/// Sequence numbers never wrap within a run.
inline constexpr bool
seqnoNewer(SeqNo a, SeqNo b)
{
    return a > b;
}

struct Rreq
{
    NodeId origin = 0;
    std::uint32_t rreqId = 0;
    NodeId dest = 0;
    SeqNo originSeqno = 0;
    SeqNo destSeqno = 0;
    bool destSeqnoKnown = false;
    std::uint32_t hopCount = 0;
    /// Neighbor of the origin this copy went through (multipath only).
    NodeId firstHop = kNoNode;
};

struct Rrep
{
    NodeId origin = 0; ///< node that asked for the route
    NodeId dest = 0;
    SeqNo destSeqno = 0;
    std::uint32_t hopCount = 0;
    double lifetimeS = 0.0;
    /// Neighbor of the destination on this reply's path (multipath only).
    NodeId firstHop = kNoNode;
};

struct UnreachableDest
{
    NodeId dest = 0;
    SeqNo seqno = 0;
};

struct Rerr
{
    std::vector<UnreachableDest> unreachable;
};

struct Hello
{
    NodeId sender = 0;
    SeqNo seqno = 0;
};

struct DsdvAdvert
{
    NodeId dest = 0;
    std::uint32_t metric = 0;
    SeqNo seqno = 0;
};

struct DsdvUpdate
{
    NodeId origin = 0;
    std::vector<DsdvAdvert> entries;
};

using ControlPacket = std::variant<Rreq, Rrep, Rerr, Hello, DsdvUpdate>;

enum class ControlKind
{
    Rreq,
    Rrep,
    Rerr,
    Hello,
    DsdvUpdate,
};

ControlKind kindOf(const ControlPacket& packet);
std::string_view toString(ControlKind kind);

/// Wire sizes used for airtime and energy.
struct ControlSizes
{
    int helloBytes = 32;
    int rreqBytes = 48;
    int rrepBytes = 44;
    int rerrBytes = 32;
    int dsdvHeaderBytes = 20;
    int dsdvEntryBytes = 12;

    int sizeOf(const ControlPacket& packet) const;
};

struct DataPacket
{
    std::uint64_t uid = 0; ///< index into the run's packet log
    std::uint32_t flowId = 0;
    std::uint32_t seqInFlow = 0;
    NodeId src = 0;
    NodeId dst = 0;
    int payloadBytes = 512;
    SimTime createdAt;
    std::uint32_t ttl = 35;
    /// Nodes visited so far, source first.
    std::vector<NodeId> path;
    /// Route state at the previous forwarder, for per-hop monotonicity checks.
    SeqNo prevRouteSeqno = 0;
    std::uint32_t prevRouteHops = 0;
    bool prevRouteStamped = false;
};

enum class DropReason
{
    QueueFull,
    CsmaFailure,
    NoRoute,
    Collision,
    OutOfRange,
    HopLimit,
};

std::string_view toString(DropReason reason);

using Packet = std::variant<DataPacket, ControlPacket>;

} // namespace wsnsim

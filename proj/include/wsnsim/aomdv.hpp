// Multipath on-demand routing: link-disjoint, loop-free alternate paths per
// destination, used as backups in discovery order.
#pragma once

#include "wsnsim/aodv.hpp"
#include "wsnsim/ondemand.hpp"
#include "wsnsim/routing.hpp"

#include <map>
#include <set>
#include <vector>

namespace wsnsim {

struct PathRecord
{
    NodeId nextHop = kNoNode;
    /// Last hop before the endpoint, used to keep paths link-disjoint.
    NodeId lastHop = kNoNode;
    std::uint32_t hopCount = 0;
    SimTime expiry;
};

struct AomdvEntry
{
    NodeId destination = 0;
    SeqNo destSeqno = 0;
    bool seqnoKnown = false;
    /// Frozen for the current seqno; every path must be at most this long.
    std::uint32_t advertisedHopCount = kInfiniteMetric;
    std::vector<PathRecord> paths;
    std::set<NodeId> precursors;
    /// RREPs already forwarded toward each origin for the current seqno.
    std::map<NodeId, std::size_t> rrepsForwarded;
};

enum class RouteUpdateResult
{
    Reset,
    Appended,
    Refreshed,
    Rejected,
};

/// The multipath route update rule for an advertisement (seqno, hopCount)
/// received via (nextHop, lastHop). Appends are checked against the
/// disjointness and advertised-hop-count invariants; failures bump `stats`.
RouteUpdateResult aomdvRouteUpdate(AomdvEntry& entry, SeqNo seqno, std::uint32_t hopCount,
                                   NodeId nextHop, NodeId lastHop, SimTime expiry,
                                   std::size_t maxPaths, AgentStats* stats = nullptr);

/// First unexpired path's next hop; expired paths are discarded. kNoNode if none.
NodeId selectPath(AomdvEntry& entry, SimTime now);

/// Removes every path through `neighbor`. Returns true if any was removed.
bool removePathsVia(AomdvEntry& entry, NodeId neighbor);

class AomdvAgent : public RoutingAgent
{
  public:
    using RreqAction = AodvAgent::RreqAction;

    AomdvAgent(AgentHost& host, const ProtocolParams& params, double helloIntervalS);

    void start() override;
    ForwardAction onAppSend(DataPacket packet) override;
    ForwardAction onData(DataPacket packet, NodeId from) override;
    void onControl(const ControlPacket& packet, NodeId from) override;
    void onFrameHeard(NodeId from) override;
    void onLinkFailure(NodeId neighbor) override;

    RreqAction processRreqCopy(const Rreq& rreq, NodeId from);
    void processRrep(const Rrep& rrep, NodeId from);
    void processRerr(const Rerr& rerr, NodeId from);
    void processHello(const Hello& hello, NodeId from);

    const AomdvEntry* route(NodeId dest) const;
    SeqNo ownSeqno() const { return m_ownSeqno; }
    const NeighborMonitor& neighbors() const { return m_neighbors; }
    const PendingBuffer& pending() const { return m_pending; }

  private:
    bool hasUsablePath(NodeId dest);
    RouteUpdateResult update(NodeId dest, SeqNo seqno, std::uint32_t hops, NodeId next,
                             NodeId last, double lifetimeS);
    void refreshPath(NodeId dest, NodeId next);
    ForwardAction forward(DataPacket packet, bool originated, NodeId from);
    void routeAvailable(NodeId dest);
    void originateRreq(NodeId dest);
    void giveUp(NodeId dest);
    void expirePending();
    void broadcastRerr(std::vector<UnreachableDest> list);
    double jitter();

    AgentHost& m_host;
    ProtocolParams m_params;
    NeighborMonitor m_neighbors;
    PendingBuffer m_pending;
    RouteDiscovery m_discovery;
    RreqCache m_rreqCache;
    std::map<NodeId, AomdvEntry> m_table;
    /// RREPs sent as destination per (origin, rreq id).
    std::map<std::pair<NodeId, std::uint32_t>, std::size_t> m_repliesSent;
    SeqNo m_ownSeqno = 0;
    std::uint32_t m_rreqId = 0;
};

} // namespace wsnsim

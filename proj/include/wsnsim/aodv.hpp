// Reactive distance-vector routing: RREQ flood, unicast RREP, RERR, HELLO.
#pragma once

#include "wsnsim/ondemand.hpp"
#include "wsnsim/routing.hpp"

#include <map>
#include <set>
#include <utility>

namespace wsnsim {

struct AodvEntry
{
    NodeId destination = 0;
    SeqNo destSeqno = 0;
    bool seqnoKnown = false;
    std::uint32_t hopCount = 0;
    NodeId nextHop = kNoNode;
    SimTime expiry;
    std::set<NodeId> precursors;
    bool valid = false;
};

/// Duplicate suppression for flooded RREQs.
class RreqCache
{
  public:
    explicit RreqCache(double lifetimeS)
        : m_lifetimeS(lifetimeS)
    {
    }

    /// True if (origin, id) was already seen and has not expired; records it otherwise.
    bool seenOrInsert(NodeId origin, std::uint32_t rreqId, SimTime now);
    bool contains(NodeId origin, std::uint32_t rreqId, SimTime now) const;

  private:
    double m_lifetimeS;
    std::map<std::pair<NodeId, std::uint32_t>, SimTime> m_expiry;
    std::uint64_t m_inserts = 0;
};

class AodvAgent : public RoutingAgent
{
  public:
    enum class RreqAction
    {
        Reply,
        Rebroadcast,
        Discard,
    };

    AodvAgent(AgentHost& host, const ProtocolParams& params, double helloIntervalS);

    void start() override;
    ForwardAction onAppSend(DataPacket packet) override;
    ForwardAction onData(DataPacket packet, NodeId from) override;
    void onControl(const ControlPacket& packet, NodeId from) override;
    void onFrameHeard(NodeId from) override;
    void onLinkFailure(NodeId neighbor) override;

    RreqAction processRreq(const Rreq& rreq, NodeId from);
    void processRrep(const Rrep& rrep, NodeId from);
    void processRerr(const Rerr& rerr, NodeId from);
    void processHello(const Hello& hello, NodeId from);

    const AodvEntry* route(NodeId dest) const;
    /// Valid and unexpired route, or null.
    const AodvEntry* usableRoute(NodeId dest) const;
    SeqNo ownSeqno() const { return m_ownSeqno; }
    std::uint32_t lastRreqId() const { return m_rreqId; }
    const NeighborMonitor& neighbors() const { return m_neighbors; }
    const PendingBuffer& pending() const { return m_pending; }
    bool discoveryInProgress(NodeId dest) const { return m_discovery.inProgress(dest); }

  private:
    ForwardAction forward(DataPacket packet, bool originated, NodeId from);
    bool updateRoute(NodeId dest, SeqNo seqno, bool seqnoKnown, std::uint32_t hops, NodeId next,
                     double lifetimeS);
    void touchNeighborRoute(NodeId neighbor);
    void refresh(NodeId dest);
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
    std::map<NodeId, AodvEntry> m_table;
    SeqNo m_ownSeqno = 0;
    std::uint32_t m_rreqId = 0;
};

} // namespace wsnsim

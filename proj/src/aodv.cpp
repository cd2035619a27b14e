#include "wsnsim/aodv.hpp"

#include <algorithm>

namespace wsnsim {

bool
RreqCache::seenOrInsert(NodeId origin, std::uint32_t rreqId, SimTime now)
{
    if (contains(origin, rreqId, now))
    {
        return true;
    }
    if (++m_inserts % 256 == 0)
    {
        std::erase_if(m_expiry, [now](const auto& kv) { return kv.second <= now; });
    }
    m_expiry[{origin, rreqId}] = now + m_lifetimeS;
    return false;
}

bool
RreqCache::contains(NodeId origin, std::uint32_t rreqId, SimTime now) const
{
    const auto it = m_expiry.find({origin, rreqId});
    return it != m_expiry.end() && it->second > now;
}

AodvAgent::AodvAgent(AgentHost& host, const ProtocolParams& params, double helloIntervalS)
    : m_host(host),
      m_params(params),
      m_neighbors(host, helloIntervalS, params.aodv.allowedHelloLoss, params.routing.broadcastJitterS),
      m_pending(params.routing.bufferCapacity, params.routing.bufferTimeoutS),
      m_discovery(host, params.aodv.rreqRetries, params.netTraversalTimeS(),
                  RouteDiscovery::Hooks{
                      [this](NodeId d) { originateRreq(d); },
                      [this](NodeId d) { return usableRoute(d) != nullptr; },
                      [this](NodeId d) { giveUp(d); },
                  }),
      m_rreqCache(params.aodv.pathDiscoveryTimeS)
{
}

void
AodvAgent::start()
{
    m_neighbors.start([this] { return Hello{m_host.self(), m_ownSeqno}; },
                      [this](NodeId n) { onLinkFailure(n); });
}

double
AodvAgent::jitter()
{
    const double j = m_params.routing.broadcastJitterS;
    return j > 0.0 ? m_host.rng().uniform(0.0, j) : 0.0;
}

const AodvEntry*
AodvAgent::route(NodeId dest) const
{
    const auto it = m_table.find(dest);
    return it == m_table.end() ? nullptr : &it->second;
}

const AodvEntry*
AodvAgent::usableRoute(NodeId dest) const
{
    const AodvEntry* e = route(dest);
    if (e == nullptr || !e->valid || e->expiry <= m_host.now())
    {
        return nullptr;
    }
    return e;
}

bool
AodvAgent::updateRoute(NodeId dest, SeqNo seqno, bool seqnoKnown, std::uint32_t hops, NodeId next,
                       double lifetimeS)
{
    if (dest == m_host.self())
    {
        return false;
    }
    auto [it, created] = m_table.try_emplace(dest);
    AodvEntry& e = it->second;
    const bool usable = e.valid && e.expiry > m_host.now();
    bool accept = created || !e.seqnoKnown;
    if (!accept && seqnoKnown)
    {
        accept = seqnoNewer(seqno, e.destSeqno) ||
                 (seqno == e.destSeqno && (!usable || hops < e.hopCount));
    }
    if (!accept)
    {
        if (usable && e.nextHop == next && e.hopCount == hops && (!seqnoKnown || seqno == e.destSeqno))
        {
            e.expiry = std::max(e.expiry, m_host.now() + lifetimeS);
        }
        return false;
    }
    e.destination = dest;
    if (seqnoKnown)
    {
        e.destSeqno = seqno;
        e.seqnoKnown = true;
    }
    e.hopCount = hops;
    e.nextHop = next;
    e.expiry = m_host.now() + lifetimeS;
    e.valid = true;
    return true;
}

void
AodvAgent::touchNeighborRoute(NodeId neighbor)
{
    if (neighbor == m_host.self())
    {
        return;
    }
    auto [it, created] = m_table.try_emplace(neighbor);
    AodvEntry& e = it->second;
    const bool usable = e.valid && e.expiry > m_host.now();
    if (!usable || e.hopCount != 1 || e.nextHop != neighbor)
    {
        e.destination = neighbor;
        e.hopCount = 1;
        e.nextHop = neighbor;
        e.valid = true;
        e.expiry = m_host.now() + m_params.aodv.activeRouteTimeoutS;
    }
    else
    {
        e.expiry = std::max(e.expiry, m_host.now() + m_params.aodv.activeRouteTimeoutS);
    }
    routeAvailable(neighbor);
}

void
AodvAgent::refresh(NodeId dest)
{
    auto it = m_table.find(dest);
    if (it != m_table.end() && it->second.valid)
    {
        it->second.expiry =
            std::max(it->second.expiry, m_host.now() + m_params.aodv.activeRouteTimeoutS);
    }
}

void
AodvAgent::routeAvailable(NodeId dest)
{
    const AodvEntry* e = usableRoute(dest);
    if (e == nullptr)
    {
        return;
    }
    m_discovery.resolved(dest);
    if (!m_pending.hasPendingFor(dest))
    {
        return;
    }
    for (DataPacket& p : m_pending.take(dest))
    {
        forward(std::move(p), true, m_host.self());
    }
}

ForwardAction
AodvAgent::onAppSend(DataPacket packet)
{
    return forward(std::move(packet), true, m_host.self());
}

ForwardAction
AodvAgent::onData(DataPacket packet, NodeId from)
{
    if (packet.prevRouteStamped)
    {
        if (const AodvEntry* e = usableRoute(packet.dst); e != nullptr && e->seqnoKnown)
        {
            AgentStats& st = m_host.stats();
            st.monotonicityChecks += 1;
            const bool older = seqnoNewer(packet.prevRouteSeqno, e->destSeqno);
            const bool longer = e->destSeqno == packet.prevRouteSeqno && e->hopCount > packet.prevRouteHops;
            if (older || longer)
            {
                st.monotonicityViolations += 1;
            }
        }
    }
    refresh(packet.src);
    refresh(from);
    return forward(std::move(packet), false, from);
}

ForwardAction
AodvAgent::forward(DataPacket packet, bool originated, NodeId from)
{
    if (const AodvEntry* e = usableRoute(packet.dst))
    {
        const NodeId next = e->nextHop;
        packet.prevRouteSeqno = e->destSeqno;
        packet.prevRouteHops = e->hopCount;
        packet.prevRouteStamped = e->seqnoKnown;
        refresh(packet.dst);
        refresh(next);
        m_host.sendData(next, std::move(packet));
        return ForwardAction::send(next);
    }
    if (originated)
    {
        const NodeId dest = packet.dst;
        if (auto evicted = m_pending.push(std::move(packet), m_host.now()))
        {
            m_host.dropData(*evicted, DropReason::NoRoute);
        }
        m_host.schedule(m_pending.timeoutS(), [this] { expirePending(); });
        m_discovery.request(dest);
        return ForwardAction::queued();
    }
    // Data for a destination we cannot reach: tell the previous hop.
    const AodvEntry* stale = route(packet.dst);
    const SeqNo seq = stale != nullptr ? stale->destSeqno : 0;
    m_host.dropData(packet, DropReason::NoRoute);
    m_host.sendControl(from, Rerr{{UnreachableDest{packet.dst, seq}}});
    return ForwardAction::drop(DropReason::NoRoute);
}

void
AodvAgent::expirePending()
{
    for (const DataPacket& p : m_pending.expire(m_host.now()))
    {
        m_host.dropData(p, DropReason::NoRoute);
    }
}

void
AodvAgent::giveUp(NodeId dest)
{
    for (const DataPacket& p : m_pending.take(dest))
    {
        m_host.dropData(p, DropReason::NoRoute);
    }
}

void
AodvAgent::originateRreq(NodeId dest)
{
    m_ownSeqno += 1;
    m_rreqId += 1;
    Rreq rreq;
    rreq.origin = m_host.self();
    rreq.rreqId = m_rreqId;
    rreq.dest = dest;
    rreq.originSeqno = m_ownSeqno;
    if (const AodvEntry* e = route(dest); e != nullptr && e->seqnoKnown)
    {
        rreq.destSeqno = e->destSeqno;
        rreq.destSeqnoKnown = true;
    }
    rreq.hopCount = 0;
    m_rreqCache.seenOrInsert(rreq.origin, rreq.rreqId, m_host.now());
    m_host.stats().rreqOriginated += 1;
    m_host.sendControl(kBroadcast, rreq, 0.0);
}

AodvAgent::RreqAction
AodvAgent::processRreq(const Rreq& rreq, NodeId from)
{
    touchNeighborRoute(from);
    if (rreq.origin == m_host.self() || m_rreqCache.seenOrInsert(rreq.origin, rreq.rreqId, m_host.now()))
    {
        return RreqAction::Discard;
    }

    updateRoute(rreq.origin, rreq.originSeqno, true, rreq.hopCount + 1, from,
                m_params.aodv.activeRouteTimeoutS);
    routeAvailable(rreq.origin);

    const double art = m_params.aodv.activeRouteTimeoutS;
    if (rreq.dest == m_host.self())
    {
        // A fresh seqno, so relays that already hold our HELLO route still take the reply.
        m_ownSeqno = std::max(m_ownSeqno, rreq.destSeqnoKnown ? rreq.destSeqno : 0) + 1;
        m_host.sendControl(from, Rrep{rreq.origin, m_host.self(), m_ownSeqno, 0, art, kNoNode});
        return RreqAction::Reply;
    }

    const AodvEntry* known = usableRoute(rreq.dest);
    if (known != nullptr && known->seqnoKnown &&
        (!rreq.destSeqnoKnown || !seqnoNewer(rreq.destSeqno, known->destSeqno)))
    {
        m_table[rreq.dest].precursors.insert(from);
        m_table[rreq.origin].precursors.insert(known->nextHop);
        m_host.sendControl(from, Rrep{rreq.origin, rreq.dest, known->destSeqno, known->hopCount,
                                      known->expiry - m_host.now(), kNoNode});
        return RreqAction::Reply;
    }

    if (rreq.hopCount + 1 >= m_params.routing.netDiameter)
    {
        return RreqAction::Discard;
    }
    Rreq copy = rreq;
    copy.hopCount += 1;
    if (const AodvEntry* e = route(rreq.dest); e != nullptr && e->seqnoKnown)
    {
        if (!copy.destSeqnoKnown || seqnoNewer(e->destSeqno, copy.destSeqno))
        {
            copy.destSeqno = e->destSeqno;
            copy.destSeqnoKnown = true;
        }
    }
    m_host.sendControl(kBroadcast, copy, jitter());
    return RreqAction::Rebroadcast;
}

void
AodvAgent::processRrep(const Rrep& rrep, NodeId from)
{
    touchNeighborRoute(from);
    const bool updated = updateRoute(rrep.dest, rrep.destSeqno, true, rrep.hopCount + 1, from,
                                     std::max(rrep.lifetimeS, m_params.aodv.activeRouteTimeoutS));
    if (rrep.origin == m_host.self())
    {
        routeAvailable(rrep.dest);
        return;
    }
    if (!updated)
    {
        return;
    }
    const AodvEntry* reverse = usableRoute(rrep.origin);
    if (reverse == nullptr)
    {
        return;
    }
    const NodeId back = reverse->nextHop;
    m_table[rrep.dest].precursors.insert(back);
    m_table[rrep.origin].precursors.insert(from);
    refresh(rrep.origin);
    Rrep copy = rrep;
    copy.hopCount += 1;
    m_host.sendControl(back, copy);
    routeAvailable(rrep.dest);
}

void
AodvAgent::processRerr(const Rerr& rerr, NodeId from)
{
    std::vector<UnreachableDest> propagate;
    for (const UnreachableDest& u : rerr.unreachable)
    {
        auto it = m_table.find(u.dest);
        if (it == m_table.end() || !it->second.valid || it->second.nextHop != from)
        {
            continue;
        }
        AodvEntry& e = it->second;
        e.valid = false;
        if (seqnoNewer(u.seqno, e.destSeqno))
        {
            e.destSeqno = u.seqno;
        }
        if (!e.precursors.empty())
        {
            propagate.push_back(UnreachableDest{u.dest, e.destSeqno});
            e.precursors.clear();
        }
    }
    broadcastRerr(std::move(propagate));
}

void
AodvAgent::processHello(const Hello& hello, NodeId from)
{
    updateRoute(from, hello.seqno, true, 1, from, m_neighbors.timeoutS());
    routeAvailable(from);
}

void
AodvAgent::broadcastRerr(std::vector<UnreachableDest> list)
{
    if (!list.empty())
    {
        m_host.sendControl(kBroadcast, Rerr{std::move(list)}, jitter());
    }
}

void
AodvAgent::onControl(const ControlPacket& packet, NodeId from)
{
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rreq>)
            {
                processRreq(p, from);
            }
            else if constexpr (std::is_same_v<T, Rrep>)
            {
                processRrep(p, from);
            }
            else if constexpr (std::is_same_v<T, Rerr>)
            {
                processRerr(p, from);
            }
            else if constexpr (std::is_same_v<T, Hello>)
            {
                processHello(p, from);
            }
        },
        packet);
}

void
AodvAgent::onFrameHeard(NodeId from)
{
    m_neighbors.heard(from);
}

void
AodvAgent::onLinkFailure(NodeId neighbor)
{
    m_neighbors.forget(neighbor);
    std::vector<UnreachableDest> broken;
    for (auto& [dest, e] : m_table)
    {
        if (!e.valid || e.nextHop != neighbor)
        {
            continue;
        }
        e.valid = false;
        if (e.seqnoKnown)
        {
            e.destSeqno += 1;
        }
        if (!e.precursors.empty())
        {
            broken.push_back(UnreachableDest{dest, e.destSeqno});
            e.precursors.clear();
        }
    }
    broadcastRerr(std::move(broken));
}

} // namespace wsnsim

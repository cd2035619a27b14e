#include "wsnsim/aomdv.hpp"

#include <algorithm>

namespace wsnsim {

namespace {

void
checkInvariants(const AomdvEntry& entry, AgentStats& stats)
{
    stats.pathAppends += 1;
    for (std::size_t i = 0; i < entry.paths.size(); ++i)
    {
        if (entry.paths[i].hopCount > entry.advertisedHopCount)
        {
            stats.advertisedHopViolations += 1;
        }
        for (std::size_t j = i + 1; j < entry.paths.size(); ++j)
        {
            if (entry.paths[i].nextHop == entry.paths[j].nextHop ||
                entry.paths[i].lastHop == entry.paths[j].lastHop)
            {
                stats.disjointnessViolations += 1;
            }
        }
    }
}

} // namespace

RouteUpdateResult
aomdvRouteUpdate(AomdvEntry& entry, SeqNo seqno, std::uint32_t hopCount, NodeId nextHop,
                 NodeId lastHop, SimTime expiry, std::size_t maxPaths, AgentStats* stats)
{
    const std::uint32_t hops = hopCount + 1;
    const bool fresher = !entry.seqnoKnown || seqnoNewer(seqno, entry.destSeqno) ||
                         (seqno == entry.destSeqno && entry.paths.empty());
    if (fresher)
    {
        entry.destSeqno = seqno;
        entry.seqnoKnown = true;
        entry.paths.assign(1, PathRecord{nextHop, lastHop, hops, expiry});
        entry.advertisedHopCount = hops;
        entry.rrepsForwarded.clear();
        return RouteUpdateResult::Reset;
    }
    if (seqno != entry.destSeqno || hops > entry.advertisedHopCount)
    {
        return RouteUpdateResult::Rejected;
    }
    for (PathRecord& p : entry.paths)
    {
        if (p.nextHop == nextHop && p.lastHop == lastHop)
        {
            p.expiry = std::max(p.expiry, expiry);
            return RouteUpdateResult::Refreshed;
        }
    }
    const bool disjoint = std::none_of(entry.paths.begin(), entry.paths.end(), [&](const PathRecord& p) {
        return p.nextHop == nextHop || p.lastHop == lastHop;
    });
    if (!disjoint || entry.paths.size() >= maxPaths)
    {
        return RouteUpdateResult::Rejected;
    }
    entry.paths.push_back(PathRecord{nextHop, lastHop, hops, expiry});
    if (stats != nullptr)
    {
        checkInvariants(entry, *stats);
    }
    return RouteUpdateResult::Appended;
}

NodeId
selectPath(AomdvEntry& entry, SimTime now)
{
    std::erase_if(entry.paths, [now](const PathRecord& p) { return p.expiry <= now; });
    return entry.paths.empty() ? kNoNode : entry.paths.front().nextHop;
}

bool
removePathsVia(AomdvEntry& entry, NodeId neighbor)
{
    return std::erase_if(entry.paths, [neighbor](const PathRecord& p) { return p.nextHop == neighbor; }) > 0;
}

AomdvAgent::AomdvAgent(AgentHost& host, const ProtocolParams& params, double helloIntervalS)
    : m_host(host),
      m_params(params),
      m_neighbors(host, helloIntervalS, params.aodv.allowedHelloLoss, params.routing.broadcastJitterS),
      m_pending(params.routing.bufferCapacity, params.routing.bufferTimeoutS),
      m_discovery(host, params.aodv.rreqRetries, params.netTraversalTimeS(),
                  RouteDiscovery::Hooks{
                      [this](NodeId d) { originateRreq(d); },
                      [this](NodeId d) { return hasUsablePath(d); },
                      [this](NodeId d) { giveUp(d); },
                  }),
      m_rreqCache(params.aodv.pathDiscoveryTimeS)
{
}

void
AomdvAgent::start()
{
    m_neighbors.start([this] { return Hello{m_host.self(), m_ownSeqno}; },
                      [this](NodeId n) { onLinkFailure(n); });
}

double
AomdvAgent::jitter()
{
    const double j = m_params.routing.broadcastJitterS;
    return j > 0.0 ? m_host.rng().uniform(0.0, j) : 0.0;
}

const AomdvEntry*
AomdvAgent::route(NodeId dest) const
{
    const auto it = m_table.find(dest);
    return it == m_table.end() ? nullptr : &it->second;
}

bool
AomdvAgent::hasUsablePath(NodeId dest)
{
    auto it = m_table.find(dest);
    return it != m_table.end() && selectPath(it->second, m_host.now()) != kNoNode;
}

RouteUpdateResult
AomdvAgent::update(NodeId dest, SeqNo seqno, std::uint32_t hops, NodeId next, NodeId last,
                   double lifetimeS)
{
    if (dest == m_host.self())
    {
        return RouteUpdateResult::Rejected;
    }
    AomdvEntry& e = m_table[dest];
    e.destination = dest;
    selectPath(e, m_host.now());
    return aomdvRouteUpdate(e, seqno, hops, next, last, m_host.now() + lifetimeS,
                            m_params.aomdv.maxPaths, &m_host.stats());
}

void
AomdvAgent::refreshPath(NodeId dest, NodeId next)
{
    auto it = m_table.find(dest);
    if (it == m_table.end())
    {
        return;
    }
    for (PathRecord& p : it->second.paths)
    {
        if (p.nextHop == next)
        {
            p.expiry = std::max(p.expiry, m_host.now() + m_params.aodv.activeRouteTimeoutS);
        }
    }
}

void
AomdvAgent::routeAvailable(NodeId dest)
{
    if (!hasUsablePath(dest))
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
AomdvAgent::onAppSend(DataPacket packet)
{
    return forward(std::move(packet), true, m_host.self());
}

ForwardAction
AomdvAgent::onData(DataPacket packet, NodeId from)
{
    refreshPath(packet.src, from);
    return forward(std::move(packet), false, from);
}

ForwardAction
AomdvAgent::forward(DataPacket packet, bool originated, NodeId from)
{
    auto it = m_table.find(packet.dst);
    const NodeId next = it == m_table.end() ? kNoNode : selectPath(it->second, m_host.now());
    if (next != kNoNode)
    {
        refreshPath(packet.dst, next);
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
    const SeqNo seq = it == m_table.end() ? 0 : it->second.destSeqno;
    m_host.dropData(packet, DropReason::NoRoute);
    m_host.sendControl(from, Rerr{{UnreachableDest{packet.dst, seq}}});
    return ForwardAction::drop(DropReason::NoRoute);
}

void
AomdvAgent::expirePending()
{
    for (const DataPacket& p : m_pending.expire(m_host.now()))
    {
        m_host.dropData(p, DropReason::NoRoute);
    }
}

void
AomdvAgent::giveUp(NodeId dest)
{
    for (const DataPacket& p : m_pending.take(dest))
    {
        m_host.dropData(p, DropReason::NoRoute);
    }
}

void
AomdvAgent::originateRreq(NodeId dest)
{
    m_ownSeqno += 1;
    m_rreqId += 1;
    Rreq rreq;
    rreq.origin = m_host.self();
    rreq.rreqId = m_rreqId;
    rreq.dest = dest;
    rreq.originSeqno = m_ownSeqno;
    if (const AomdvEntry* e = route(dest); e != nullptr && e->seqnoKnown)
    {
        rreq.destSeqno = e->destSeqno;
        rreq.destSeqnoKnown = true;
    }
    m_rreqCache.seenOrInsert(rreq.origin, rreq.rreqId, m_host.now());
    m_host.stats().rreqOriginated += 1;
    m_host.sendControl(kBroadcast, rreq, 0.0);
}

AomdvAgent::RreqAction
AomdvAgent::processRreqCopy(const Rreq& rreq, NodeId from)
{
    const NodeId self = m_host.self();
    if (rreq.origin == self)
    {
        return RreqAction::Discard;
    }
    const bool firstCopy = !m_rreqCache.seenOrInsert(rreq.origin, rreq.rreqId, m_host.now());
    const NodeId last = rreq.firstHop == kNoNode ? self : rreq.firstHop;
    const double art = m_params.aodv.activeRouteTimeoutS;

    const RouteUpdateResult reverse = update(rreq.origin, rreq.originSeqno, rreq.hopCount, from, last, art);
    const bool newReversePath = reverse == RouteUpdateResult::Reset || reverse == RouteUpdateResult::Appended;
    if (newReversePath)
    {
        routeAvailable(rreq.origin);
    }

    if (rreq.dest == self)
    {
        std::size_t& sent = m_repliesSent[{rreq.origin, rreq.rreqId}];
        if (!newReversePath || sent >= m_params.aomdv.maxReplies)
        {
            return RreqAction::Discard;
        }
        // Fresh seqno on the first reply only; later replies to the same request must match it.
        if (sent == 0)
        {
            m_ownSeqno = std::max(m_ownSeqno, rreq.destSeqnoKnown ? rreq.destSeqno : 0) + 1;
        }
        sent += 1;
        m_host.sendControl(from, Rrep{rreq.origin, self, m_ownSeqno, 0, art, kNoNode});
        return RreqAction::Reply;
    }

    if (!firstCopy)
    {
        return RreqAction::Discard;
    }

    if (hasUsablePath(rreq.dest))
    {
        AomdvEntry& fwd = m_table.at(rreq.dest);
        if (!rreq.destSeqnoKnown || !seqnoNewer(rreq.destSeqno, fwd.destSeqno))
        {
            const PathRecord& p = fwd.paths.front();
            fwd.precursors.insert(from);
            m_table[rreq.origin].precursors.insert(p.nextHop);
            m_host.sendControl(from, Rrep{rreq.origin, rreq.dest, fwd.destSeqno, fwd.advertisedHopCount,
                                          art, p.lastHop});
            return RreqAction::Reply;
        }
    }

    if (rreq.hopCount + 1 >= m_params.routing.netDiameter)
    {
        return RreqAction::Discard;
    }
    Rreq copy = rreq;
    const AomdvEntry* back = route(rreq.origin);
    copy.hopCount = back != nullptr && back->destSeqno == rreq.originSeqno &&
                            back->advertisedHopCount != kInfiniteMetric
                        ? back->advertisedHopCount
                        : rreq.hopCount + 1;
    copy.firstHop = last;
    if (const AomdvEntry* e = route(rreq.dest); e != nullptr && e->seqnoKnown)
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
AomdvAgent::processRrep(const Rrep& rrep, NodeId from)
{
    const NodeId self = m_host.self();
    const NodeId last = rrep.firstHop == kNoNode ? self : rrep.firstHop;
    const RouteUpdateResult result =
        update(rrep.dest, rrep.destSeqno, rrep.hopCount, from, last,
               std::max(rrep.lifetimeS, m_params.aodv.activeRouteTimeoutS));
    if (rrep.origin == self)
    {
        routeAvailable(rrep.dest);
        return;
    }
    if (result != RouteUpdateResult::Reset && result != RouteUpdateResult::Appended)
    {
        return;
    }
    auto rev = m_table.find(rrep.origin);
    if (rev == m_table.end())
    {
        return;
    }
    selectPath(rev->second, m_host.now());
    AomdvEntry& fwd = m_table.at(rrep.dest);
    std::size_t& used = fwd.rrepsForwarded[rrep.origin];
    if (used >= rev->second.paths.size())
    {
        return;
    }
    const NodeId back = rev->second.paths[used].nextHop;
    used += 1;
    fwd.precursors.insert(back);
    rev->second.precursors.insert(from);
    refreshPath(rrep.origin, back);

    Rrep copy = rrep;
    copy.hopCount = fwd.advertisedHopCount;
    copy.firstHop = last;
    m_host.sendControl(back, copy);
    routeAvailable(rrep.dest);
}

void
AomdvAgent::processRerr(const Rerr& rerr, NodeId from)
{
    std::vector<UnreachableDest> propagate;
    for (const UnreachableDest& u : rerr.unreachable)
    {
        auto it = m_table.find(u.dest);
        if (it == m_table.end() || it->second.paths.empty())
        {
            continue;
        }
        AomdvEntry& e = it->second;
        if (!removePathsVia(e, from) || !e.paths.empty())
        {
            continue;
        }
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
AomdvAgent::processHello(const Hello& hello, NodeId from)
{
    update(from, hello.seqno, 0, from, m_host.self(), m_neighbors.timeoutS());
    routeAvailable(from);
}

void
AomdvAgent::broadcastRerr(std::vector<UnreachableDest> list)
{
    if (!list.empty())
    {
        m_host.sendControl(kBroadcast, Rerr{std::move(list)}, jitter());
    }
}

void
AomdvAgent::onControl(const ControlPacket& packet, NodeId from)
{
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Rreq>)
            {
                processRreqCopy(p, from);
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
AomdvAgent::onFrameHeard(NodeId from)
{
    m_neighbors.heard(from);
}

void
AomdvAgent::onLinkFailure(NodeId neighbor)
{
    m_neighbors.forget(neighbor);
    std::vector<UnreachableDest> broken;
    for (auto& [dest, e] : m_table)
    {
        if (e.paths.empty() || !removePathsVia(e, neighbor) || !e.paths.empty())
        {
            continue;
        }
        e.destSeqno += 1;
        if (!e.precursors.empty())
        {
            broken.push_back(UnreachableDest{dest, e.destSeqno});
            e.precursors.clear();
        }
    }
    broadcastRerr(std::move(broken));
}

} // namespace wsnsim

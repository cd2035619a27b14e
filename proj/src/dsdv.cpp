#include "wsnsim/dsdv.hpp"

#include <algorithm>

namespace wsnsim {

DsdvAgent::DsdvAgent(AgentHost& host, const ProtocolParams& params)
    : m_host(host),
      m_params(params)
{
    DsdvEntry self;
    self.destination = host.self();
    self.nextHop = host.self();
    self.metric = 0;
    self.seqno = 0;
    m_table[host.self()] = self;
}

void
DsdvAgent::start()
{
    // Random phase so neighbors do not dump in lockstep.
    const double first = m_host.rng().uniform(0.0, std::min(1.0, m_params.dsdv.updatePeriodS));
    m_host.schedule(first, [this] { periodicDump(); });
}

const DsdvEntry*
DsdvAgent::route(NodeId dest) const
{
    const auto it = m_table.find(dest);
    return it == m_table.end() ? nullptr : &it->second;
}

DsdvUpdate
DsdvAgent::fullTable() const
{
    DsdvUpdate u;
    u.origin = m_host.self();
    u.entries.reserve(m_table.size());
    for (const auto& [dest, e] : m_table)
    {
        u.entries.push_back(DsdvAdvert{dest, e.metric, e.seqno});
    }
    return u;
}

void
DsdvAgent::broadcast(DsdvUpdate update)
{
    m_updatesSent += 1;
    const double j = m_params.routing.broadcastJitterS;
    m_host.sendControl(kBroadcast, std::move(update), j > 0.0 ? m_host.rng().uniform(0.0, j) : 0.0);
}

void
DsdvAgent::periodicDump()
{
    checkNeighbors();
    if (!m_holdSeqno)
    {
        m_table[m_host.self()].seqno += 2;
    }
    m_changed.clear();
    broadcast(fullTable());
    // Jittered period: a fixed period would repeat any hidden-terminal collision forever.
    const double period = m_params.dsdv.updatePeriodS;
    m_host.schedule(m_host.rng().uniform(0.75 * period, period), [this] { periodicDump(); });
}

void
DsdvAgent::checkNeighbors()
{
    const double limit = m_params.dsdv.updatePeriodS * m_params.dsdv.missedUpdatesAllowed;
    std::vector<NodeId> lost;
    for (const auto& [n, t] : m_lastHeard)
    {
        if (m_host.now() - t > limit)
        {
            lost.push_back(n);
        }
    }
    for (NodeId n : lost)
    {
        onLinkFailure(n);
    }
}

void
DsdvAgent::markChanged(NodeId dest)
{
    m_changed.insert(dest);
    scheduleTriggered();
}

void
DsdvAgent::scheduleTriggered()
{
    if (m_triggerScheduled)
    {
        return;
    }
    m_triggerScheduled = true;
    const double wait = std::max(0.0, m_params.dsdv.triggeredMinIntervalS - (m_host.now() - m_lastTriggered));
    m_host.schedule(wait, [this] { sendTriggered(); });
}

void
DsdvAgent::sendTriggered()
{
    m_triggerScheduled = false;
    if (m_changed.empty())
    {
        return;
    }
    DsdvUpdate u;
    u.origin = m_host.self();
    for (NodeId d : m_changed)
    {
        const DsdvEntry& e = m_table.at(d);
        u.entries.push_back(DsdvAdvert{d, e.metric, e.seqno});
    }
    m_changed.clear();
    m_lastTriggered = m_host.now();
    broadcast(std::move(u));
}

void
DsdvAgent::processUpdate(const DsdvUpdate& update, NodeId from)
{
    const SimTime now = m_host.now();
    for (const DsdvAdvert& a : update.entries)
    {
        const bool odd = (a.seqno % 2) == 1;
        if (odd != (a.metric == kInfiniteMetric))
        {
            continue; // malformed
        }
        if (a.dest == m_host.self())
        {
            // Someone lost us: answer with a newer even seqno so the break heals.
            DsdvEntry& own = m_table[a.dest];
            if (odd && seqnoNewer(a.seqno, own.seqno))
            {
                own.seqno = a.seqno + 1;
                markChanged(a.dest);
            }
            continue;
        }
        const std::uint32_t cand = a.metric == kInfiniteMetric ? kInfiniteMetric : a.metric + 1;
        auto it = m_table.find(a.dest);
        if (it == m_table.end())
        {
            if (cand == kInfiniteMetric)
            {
                continue;
            }
            DsdvEntry e;
            e.destination = a.dest;
            e.nextHop = from;
            e.metric = cand;
            e.seqno = a.seqno;
            e.installTime = now;
            e.seqnoFirstHeard = now;
            m_table[a.dest] = e;
            markChanged(a.dest);
            continue;
        }
        DsdvEntry& e = it->second;
        if (seqnoNewer(a.seqno, e.seqno))
        {
            if (cand == kInfiniteMetric && e.nextHop != from && e.broken())
            {
                e.seqno = a.seqno;
                continue;
            }
            const bool metricChanged = cand != e.metric;
            e.seqno = a.seqno;
            e.nextHop = from;
            e.metric = cand;
            e.installTime = now;
            e.seqnoFirstHeard = now;
            if (metricChanged)
            {
                markChanged(a.dest);
            }
        }
        else if (a.seqno == e.seqno && cand < e.metric)
        {
            const double settle = now - e.seqnoFirstHeard;
            e.stableData = m_params.dsdv.settlingWeight * e.stableData +
                           (1.0 - m_params.dsdv.settlingWeight) * settle;
            e.nextHop = from;
            e.metric = cand;
            e.installTime = now;
            const NodeId dest = a.dest;
            const SeqNo seq = e.seqno;
            if (e.stableData <= 0.0)
            {
                markChanged(dest);
            }
            else
            {
                m_host.schedule(e.stableData, [this, dest, seq] {
                    const auto found = m_table.find(dest);
                    if (found != m_table.end() && found->second.seqno == seq)
                    {
                        markChanged(dest);
                    }
                });
            }
        }
    }
    checkParity();
}

void
DsdvAgent::checkParity()
{
    for (const auto& [dest, e] : m_table)
    {
        if (((e.seqno % 2) == 1) != e.broken())
        {
            m_host.stats().seqnoParityViolations += 1;
        }
    }
}

void
DsdvAgent::onLinkFailure(NodeId neighbor)
{
    m_lastHeard.erase(neighbor);
    bool any = false;
    for (auto& [dest, e] : m_table)
    {
        if (dest == m_host.self() || e.broken() || e.nextHop != neighbor)
        {
            continue;
        }
        e.metric = kInfiniteMetric;
        e.seqno += 1;
        e.installTime = m_host.now();
        m_changed.insert(dest);
        any = true;
    }
    if (!any)
    {
        return;
    }
    checkParity();
    // Broken routes go out at once.
    m_triggerScheduled = false;
    sendTriggered();
}

void
DsdvAgent::onControl(const ControlPacket& packet, NodeId from)
{
    if (const auto* u = std::get_if<DsdvUpdate>(&packet))
    {
        processUpdate(*u, from);
    }
}

void
DsdvAgent::onFrameHeard(NodeId from)
{
    m_lastHeard[from] = m_host.now();
}

ForwardAction
DsdvAgent::forward(DataPacket packet)
{
    const auto it = m_table.find(packet.dst);
    if (it == m_table.end() || it->second.broken())
    {
        m_host.dropData(packet, DropReason::NoRoute);
        return ForwardAction::drop(DropReason::NoRoute);
    }
    const NodeId next = it->second.nextHop;
    m_host.sendData(next, std::move(packet));
    return ForwardAction::send(next);
}

ForwardAction
DsdvAgent::onAppSend(DataPacket packet)
{
    return forward(std::move(packet));
}

ForwardAction
DsdvAgent::onData(DataPacket packet, NodeId /*from*/)
{
    return forward(std::move(packet));
}

} // namespace wsnsim

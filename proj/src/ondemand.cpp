#include "wsnsim/ondemand.hpp"

#include <vector>

namespace wsnsim {

NeighborMonitor::NeighborMonitor(AgentHost& host, double helloIntervalS, int allowedLoss,
                                 double jitterS)
    : m_host(host),
      m_intervalS(helloIntervalS),
      m_allowedLoss(allowedLoss),
      m_jitterS(jitterS)
{
    if (!(helloIntervalS > 0.0) || allowedLoss < 1)
    {
        throw ContractViolation("hello interval must be positive and allowed loss >= 1");
    }
}

void
NeighborMonitor::start(HelloFactory makeHello, LostHandler onLost)
{
    m_makeHello = std::move(makeHello);
    m_onLost = std::move(onLost);
    m_host.schedule(m_host.rng().uniform(0.0, m_intervalS), [this] { tick(); });
}

void
NeighborMonitor::tick()
{
    checkLiveness();
    const double jitter = m_jitterS > 0.0 ? m_host.rng().uniform(0.0, m_jitterS) : 0.0;
    m_host.sendControl(kBroadcast, m_makeHello(), jitter);
    ++m_hellosSent;
    m_host.schedule(m_intervalS, [this] { tick(); });
}

void
NeighborMonitor::checkLiveness()
{
    const SimTime now = m_host.now();
    std::vector<NodeId> lost;
    for (const auto& [node, last] : m_lastHeard)
    {
        if (now - last > timeoutS())
        {
            lost.push_back(node);
        }
    }
    for (NodeId node : lost)
    {
        m_lastHeard.erase(node);
        if (m_onLost)
        {
            m_onLost(node);
        }
    }
}

void
NeighborMonitor::heard(NodeId from)
{
    m_lastHeard[from] = m_host.now();
}

void
NeighborMonitor::forget(NodeId neighbor)
{
    m_lastHeard.erase(neighbor);
}

bool
NeighborMonitor::isNeighbor(NodeId node) const
{
    return m_lastHeard.contains(node);
}

RouteDiscovery::RouteDiscovery(AgentHost& host, int retries, double firstWaitS, Hooks hooks)
    : m_host(host),
      m_retries(retries),
      m_firstWaitS(firstWaitS),
      m_hooks(std::move(hooks))
{
}

void
RouteDiscovery::request(NodeId dest)
{
    if (inProgress(dest))
    {
        return;
    }
    m_active[dest] = State{0, m_nextGeneration++};
    arm(dest);
}

void
RouteDiscovery::arm(NodeId dest)
{
    State& st = m_active.at(dest);
    const double wait = m_firstWaitS * static_cast<double>(std::uint64_t{1} << st.attempts);
    st.attempts += 1;
    m_hooks.sendRreq(dest);
    const std::uint64_t generation = st.generation;
    m_host.schedule(wait, [this, dest, generation] { onTimeout(dest, generation); });
}

void
RouteDiscovery::resolved(NodeId dest)
{
    m_active.erase(dest);
}

void
RouteDiscovery::onTimeout(NodeId dest, std::uint64_t generation)
{
    auto it = m_active.find(dest);
    if (it == m_active.end() || it->second.generation != generation)
    {
        return;
    }
    if (m_hooks.hasRoute(dest))
    {
        m_active.erase(it);
        return;
    }
    if (it->second.attempts <= m_retries)
    {
        arm(dest);
        return;
    }
    m_active.erase(it);
    m_hooks.giveUp(dest);
}

} // namespace wsnsim

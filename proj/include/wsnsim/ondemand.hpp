// Pieces shared by the on-demand agents: HELLO-based neighbor liveness and
// RREQ retry bookkeeping.
#pragma once

#include "wsnsim/routing.hpp"

#include <functional>
#include <map>

namespace wsnsim {

/// Broadcasts HELLO every interval (random initial phase) and declares a
/// neighbor lost after allowedLoss * interval without hearing any frame from it.
class NeighborMonitor
{
  public:
    using HelloFactory = std::function<Hello()>;
    using LostHandler = std::function<void(NodeId)>;

    NeighborMonitor(AgentHost& host, double helloIntervalS, int allowedLoss, double jitterS);

    void start(HelloFactory makeHello, LostHandler onLost);
    void heard(NodeId from);
    void forget(NodeId neighbor);
    bool isNeighbor(NodeId node) const;

    double helloIntervalS() const { return m_intervalS; }
    double timeoutS() const { return m_intervalS * static_cast<double>(m_allowedLoss); }
    std::uint64_t hellosSent() const { return m_hellosSent; }

    /// Runs one liveness check now; exposed for tests.
    void checkLiveness();

  private:
    void tick();

    AgentHost& m_host;
    double m_intervalS;
    int m_allowedLoss;
    double m_jitterS;
    HelloFactory m_makeHello;
    LostHandler m_onLost;
    std::map<NodeId, SimTime> m_lastHeard;
    std::uint64_t m_hellosSent = 0;
};

/// Tracks outstanding route discoveries: one RREQ now, then up to `retries`
/// more with a doubling wait, then gives up.
class RouteDiscovery
{
  public:
    struct Hooks
    {
        std::function<void(NodeId)> sendRreq;
        std::function<bool(NodeId)> hasRoute;
        std::function<void(NodeId)> giveUp;
    };

    RouteDiscovery(AgentHost& host, int retries, double firstWaitS, Hooks hooks);

    /// Starts a discovery unless one is already running for `dest`.
    void request(NodeId dest);
    void resolved(NodeId dest);
    bool inProgress(NodeId dest) const { return m_active.contains(dest); }

  private:
    struct State
    {
        int attempts = 0;
        std::uint64_t generation = 0;
    };

    void arm(NodeId dest);
    void onTimeout(NodeId dest, std::uint64_t generation);

    AgentHost& m_host;
    int m_retries;
    double m_firstWaitS;
    Hooks m_hooks;
    std::map<NodeId, State> m_active;
    std::uint64_t m_nextGeneration = 0;
};

} // namespace wsnsim

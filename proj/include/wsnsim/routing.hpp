// Routing-agent contract shared by DSDV, AODV and AOMDV, plus protocol variants.
#pragma once

#include "wsnsim/kernel.hpp"
#include "wsnsim/packets.hpp"

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace wsnsim {

struct RoutingParams
{
    std::uint32_t netDiameter = 35;
    std::size_t bufferCapacity = 64;
    double bufferTimeoutS = 30.0;
    /// Upper bound of the uniform delay applied to routing-layer broadcasts.
    double broadcastJitterS = 0.01;
    ControlSizes sizes;
};

struct AodvParams
{
    double helloIntervalS = 1.0;
    double modHelloIntervalS = 5.0;
    int allowedHelloLoss = 2;
    double activeRouteTimeoutS = 10.0;
    int rreqRetries = 2;
    double nodeTraversalTimeS = 0.04;
    double pathDiscoveryTimeS = 5.6;
};

struct AomdvParams
{
    std::size_t maxPaths = 3;
    std::size_t maxReplies = 2;
};

struct DsdvParams
{
    double updatePeriodS = 15.0;
    double triggeredMinIntervalS = 1.0;
    double settlingWeight = 0.875;
    int missedUpdatesAllowed = 3;
};

struct ProtocolParams
{
    RoutingParams routing;
    AodvParams aodv;
    AomdvParams aomdv;
    DsdvParams dsdv;

    /// Wait before the first RREQ retry; doubles on every further retry.
    double netTraversalTimeS() const
    {
        return 2.0 * aodv.nodeTraversalTimeS * static_cast<double>(routing.netDiameter);
    }
};

/// Counters every agent reports; the *Violations fields must stay zero.
struct AgentStats
{
    std::uint64_t rreqOriginated = 0;
    std::uint64_t monotonicityChecks = 0;
    std::uint64_t monotonicityViolations = 0;
    std::uint64_t pathAppends = 0;
    std::uint64_t disjointnessViolations = 0;
    std::uint64_t advertisedHopViolations = 0;
    std::uint64_t seqnoParityViolations = 0;
};

/// What an agent may do to the node it lives on.
class AgentHost
{
  public:
    virtual ~AgentHost() = default;

    virtual NodeId self() const = 0;
    virtual SimTime now() const = 0;
    virtual void schedule(double delayS, std::function<void()> action) = 0;
    /// Hands a control packet to the MAC after `delayS`; dst may be kBroadcast.
    virtual void sendControl(NodeId dst, ControlPacket packet, double delayS = 0.0) = 0;
    /// Hands a data packet to the MAC for `nextHop`.
    virtual void sendData(NodeId nextHop, DataPacket packet) = 0;
    virtual void dropData(const DataPacket& packet, DropReason reason) = 0;
    virtual RngStream& rng() = 0;
    virtual AgentStats& stats() = 0;
};

struct ForwardAction
{
    enum class Kind
    {
        Send,
        QueuePendingRoute,
        Drop,
    };

    Kind kind = Kind::Drop;
    NodeId nextHop = kNoNode;
    DropReason reason = DropReason::NoRoute;

    static ForwardAction send(NodeId next) { return {Kind::Send, next, DropReason::NoRoute}; }
    static ForwardAction queued() { return {Kind::QueuePendingRoute, kNoNode, DropReason::NoRoute}; }
    static ForwardAction drop(DropReason r) { return {Kind::Drop, kNoNode, r}; }
};

class RoutingAgent
{
  public:
    virtual ~RoutingAgent() = default;

    /// Arms periodic timers. Called once at t = 0.
    virtual void start() = 0;
    /// A locally generated data packet.
    virtual ForwardAction onAppSend(DataPacket packet) = 0;
    /// A data packet received from `from` that is destined elsewhere.
    virtual ForwardAction onData(DataPacket packet, NodeId from) = 0;
    virtual void onControl(const ControlPacket& packet, NodeId from) = 0;
    /// Any frame successfully decoded from `from`, including overheard unicasts.
    virtual void onFrameHeard(NodeId from) = 0;
    /// Link-layer feedback: a frame to `neighbor` could not be delivered.
    virtual void onLinkFailure(NodeId neighbor) = 0;
};

enum class Protocol
{
    Dsdv,
    Aodv,
    Aomdv,
};

/// A base protocol plus its HELLO interval; MOD variants differ only by the interval.
struct ProtocolVariant
{
    Protocol base = Protocol::Aodv;
    double helloIntervalS = 1.0;
    std::string label;
    std::vector<std::string> warnings;

    std::unique_ptr<RoutingAgent> create(AgentHost& host, const ProtocolParams& params) const;
};

/// Throws ContractViolation for a non-positive interval.
ProtocolVariant makeVariant(Protocol base, double helloIntervalS, const AodvParams& aodv = {});

/// Parses one of DSDV, AODV, AODVMOD, AOMDV, AOMDVMOD.
std::optional<ProtocolVariant> parseVariant(std::string_view name, const AodvParams& aodv = {});

inline const std::vector<std::string>&
protocolNames()
{
    static const std::vector<std::string> names{"AOMDV", "AOMDVMOD", "AODV", "AODVMOD", "DSDV"};
    return names;
}

/// Per-node buffer for data awaiting route discovery: bounded, drop-oldest, timed.
class PendingBuffer
{
  public:
    PendingBuffer(std::size_t capacity, double timeoutS);

    /// Returns the evicted oldest packet when the buffer was full.
    std::optional<DataPacket> push(DataPacket packet, SimTime now);
    /// Removes and returns, in arrival order, every packet for `dest`.
    std::vector<DataPacket> take(NodeId dest);
    /// Removes and returns packets older than the timeout.
    std::vector<DataPacket> expire(SimTime now);
    bool hasPendingFor(NodeId dest) const;
    std::size_t size() const { return m_items.size(); }
    double timeoutS() const { return m_timeoutS; }

  private:
    struct Item
    {
        DataPacket packet;
        SimTime queuedAt;
    };

    std::size_t m_capacity;
    double m_timeoutS;
    std::deque<Item> m_items;
};

} // namespace wsnsim

// One simulation run: medium, per-node MAC and routing agent, CBR sources,
// and the packet log the metrics are computed from.
#pragma once

#include "wsnsim/kernel.hpp"
#include "wsnsim/mac.hpp"
#include "wsnsim/radio.hpp"
#include "wsnsim/routing.hpp"
#include "wsnsim/scenario.hpp"

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace wsnsim {

struct NetworkParams
{
    ProtocolVariant variant = makeVariant(Protocol::Aodv, 1.0);
    ProtocolParams protocol;
    RadioParams radio;
    CsmaParams csma;
    /// Tell the routing agent when a unicast frame was not received by its next hop.
    bool reportDeliveryLoss = true;
    double simTimeS = 180.0;
};

struct PacketRecord
{
    std::uint32_t flowId = 0;
    std::uint32_t seq = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double createdAt = 0.0;
    std::optional<double> deliveredAt;
    std::optional<DropReason> drop;
};

inline constexpr std::size_t kControlKinds = 5;
inline constexpr std::size_t kDropReasons = 6;

struct RunResult
{
    std::vector<PacketRecord> packets;
    std::vector<EnergyState> energy;
    /// Sum of every energy charge made during the run, joules.
    double energyLedgerJ = 0.0;
    std::array<std::uint64_t, kControlKinds> controlTx{};
    std::array<std::uint64_t, kDropReasons> drops{};
    std::uint64_t dataTx = 0;
    /// Data packets that arrived at a node already on their path.
    std::uint64_t loopsDetected = 0;
    /// Link-layer failure notifications handed to routing agents.
    std::uint64_t linkFailureReports = 0;
    AgentStats stats;
    std::uint64_t events = 0;
    std::uint64_t traceHash = 0;

    std::uint64_t controlCount(ControlKind kind) const { return controlTx[static_cast<std::size_t>(kind)]; }
    std::uint64_t dropCount(DropReason reason) const { return drops[static_cast<std::size_t>(reason)]; }
};

class Network
{
  public:
    Network(const Scenario& scenario, const NetworkParams& params, std::uint64_t runSeed);
    ~Network();
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Advances the clock to `t` (agents and sources start on the first call).
    void runUntil(double t);
    /// Runs to the configured end time and collects the result.
    RunResult run();
    /// Switches a node's radio off at `atS`.
    void killAt(NodeId node, double atS);
    /// Sends one extra data packet from `src` to `dst` at the current time.
    std::uint64_t injectPacket(NodeId src, NodeId dst);

    RoutingAgent& agent(NodeId node);
    const Medium& medium() const { return *m_medium; }
    const Simulator& simulator() const { return m_sim; }
    const std::vector<PacketRecord>& packets() const { return m_packets; }
    std::uint64_t controlCount(ControlKind kind) const { return m_controlTx[static_cast<std::size_t>(kind)]; }
    AgentStats totalStats() const;

  private:
    struct Node;
    class Host;

    void start();
    void onReceive(NodeId at, const Frame& frame);
    void onData(NodeId at, DataPacket packet, NodeId from);
    void sendFrame(NodeId from, NodeId to, Packet packet);
    void setFate(const DataPacket& packet, DropReason reason);
    void scheduleCbr(std::size_t flowIndex, std::size_t k);
    std::uint64_t originate(NodeId src, NodeId dst, std::uint32_t flowId, std::uint32_t seq, int payload);

    const Scenario& m_scenario;
    NetworkParams m_params;
    std::uint64_t m_runSeed;
    Simulator m_sim;
    std::unique_ptr<Medium> m_medium;
    std::vector<std::unique_ptr<Node>> m_nodes;
    std::vector<std::vector<double>> m_cbrTimes;
    std::vector<PacketRecord> m_packets;
    std::array<std::uint64_t, kControlKinds> m_controlTx{};
    std::array<std::uint64_t, kDropReasons> m_drops{};
    std::uint64_t m_dataTx = 0;
    std::uint64_t m_loops = 0;
    std::uint64_t m_linkFailures = 0;
    std::uint32_t m_injectedSeq = 0;
    std::uint64_t m_events = 0;
    bool m_started = false;
};

} // namespace wsnsim

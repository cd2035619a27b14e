#include "wsnsim/network.hpp"

#include <algorithm>

namespace wsnsim {

class Network::Host : public AgentHost
{
  public:
    Host(Network& net, NodeId id, std::uint64_t runSeed)
        : m_net(net),
          m_id(id),
          m_rng(runSeed, nodeStreamId(id, Subsystem::Routing))
    {
    }

    NodeId self() const override { return m_id; }
    SimTime now() const override { return m_net.m_sim.now(); }

    void schedule(double delayS, std::function<void()> action) override
    {
        m_net.m_sim.scheduleIn(delayS, m_id, [this, a = std::move(action)] {
            if (m_net.m_medium->alive(m_id))
            {
                a();
            }
        });
    }

    void sendControl(NodeId dst, ControlPacket packet, double delayS) override
    {
        if (delayS <= 0.0)
        {
            m_net.sendFrame(m_id, dst, Packet{std::move(packet)});
            return;
        }
        schedule(delayS, [this, dst, p = std::move(packet)]() mutable {
            m_net.sendFrame(m_id, dst, Packet{std::move(p)});
        });
    }

    void sendData(NodeId nextHop, DataPacket packet) override
    {
        m_net.sendFrame(m_id, nextHop, Packet{std::move(packet)});
    }

    void dropData(const DataPacket& packet, DropReason reason) override { m_net.setFate(packet, reason); }

    RngStream& rng() override { return m_rng; }
    AgentStats& stats() override { return m_stats; }
    const AgentStats& stats() const { return m_stats; }

  private:
    Network& m_net;
    NodeId m_id;
    RngStream m_rng;
    AgentStats m_stats;
};

struct Network::Node
{
    Node(Network& net, NodeId id, std::uint64_t runSeed)
        : host(net, id, runSeed),
          macRng(runSeed, nodeStreamId(id, Subsystem::MacBackoff))
    {
    }

    Host host;
    RngStream macRng;
    std::unique_ptr<Mac> mac;
    std::unique_ptr<RoutingAgent> agent;
};

Network::Network(const Scenario& scenario, const NetworkParams& params, std::uint64_t runSeed)
    : m_scenario(scenario),
      m_params(params),
      m_runSeed(runSeed)
{
    if (params.simTimeS <= 0.0)
    {
        throw ContractViolation("simulation time must be positive");
    }
    m_medium = std::make_unique<Medium>(m_sim, scenario.positions, scenario.initialEnergyJ, params.radio);
    const auto n = static_cast<NodeId>(scenario.positions.size());
    m_nodes.reserve(n);
    for (NodeId id = 0; id < n; ++id)
    {
        auto node = std::make_unique<Node>(*this, id, runSeed);
        Mac::Callbacks cb;
        cb.onDrop = [this, id](const Frame& f, DropReason reason) {
            if (const auto* d = std::get_if<DataPacket>(&f.packet))
            {
                setFate(*d, reason);
            }
            if (reason == DropReason::CsmaFailure && !f.isBroadcast())
            {
                m_linkFailures += 1;
                m_nodes[id]->agent->onLinkFailure(f.dst);
            }
        };
        cb.onTxStart = [this](const Frame& f) {
            if (const auto* c = std::get_if<ControlPacket>(&f.packet))
            {
                m_controlTx[static_cast<std::size_t>(kindOf(*c))] += 1;
            }
            else
            {
                m_dataTx += 1;
            }
        };
        cb.onTxDone = [this, id](const Frame& f, ReceptionOutcome outcome) {
            if (f.isBroadcast() || outcome == ReceptionOutcome::Received)
            {
                return;
            }
            if (const auto* d = std::get_if<DataPacket>(&f.packet))
            {
                setFate(*d, outcome == ReceptionOutcome::Collision ? DropReason::Collision : DropReason::OutOfRange);
            }
            if (m_params.reportDeliveryLoss && m_medium->alive(id))
            {
                m_linkFailures += 1;
                m_nodes[id]->agent->onLinkFailure(f.dst);
            }
        };
        node->mac = std::make_unique<Mac>(id, m_sim, *m_medium, params.csma, node->macRng, std::move(cb));
        node->agent = params.variant.create(node->host, params.protocol);
        m_medium->setReceiver(id, [this, id](const Frame& f) { onReceive(id, f); });
        m_nodes.push_back(std::move(node));
    }
    m_cbrTimes.reserve(scenario.flows.size());
    for (const Flow& f : scenario.flows)
    {
        m_cbrTimes.push_back(cbrSchedule(f, params.simTimeS));
    }
}

Network::~Network() = default;

RoutingAgent&
Network::agent(NodeId node)
{
    return *m_nodes.at(node)->agent;
}

AgentStats
Network::totalStats() const
{
    AgentStats s;
    for (const auto& n : m_nodes)
    {
        const AgentStats& a = n->host.stats();
        s.rreqOriginated += a.rreqOriginated;
        s.monotonicityChecks += a.monotonicityChecks;
        s.monotonicityViolations += a.monotonicityViolations;
        s.pathAppends += a.pathAppends;
        s.disjointnessViolations += a.disjointnessViolations;
        s.advertisedHopViolations += a.advertisedHopViolations;
        s.seqnoParityViolations += a.seqnoParityViolations;
    }
    return s;
}

void
Network::start()
{
    m_started = true;
    for (auto& n : m_nodes)
    {
        RoutingAgent* a = n->agent.get();
        m_sim.schedule(SimTime(0.0), n->host.self(), [a] { a->start(); });
    }
    for (std::size_t i = 0; i < m_cbrTimes.size(); ++i)
    {
        scheduleCbr(i, 0);
    }
}

void
Network::scheduleCbr(std::size_t flowIndex, std::size_t k)
{
    const auto& times = m_cbrTimes[flowIndex];
    if (k >= times.size())
    {
        return;
    }
    const Flow& f = m_scenario.flows[flowIndex];
    m_sim.schedule(SimTime(times[k]), f.src, [this, flowIndex, k] {
        const Flow& flow = m_scenario.flows[flowIndex];
        originate(flow.src, flow.dst, flow.id, static_cast<std::uint32_t>(k), flow.payloadBytes);
        scheduleCbr(flowIndex, k + 1);
    });
}

std::uint64_t
Network::originate(NodeId src, NodeId dst, std::uint32_t flowId, std::uint32_t seq, int payload)
{
    const std::uint64_t uid = m_packets.size();
    m_packets.push_back(PacketRecord{flowId, seq, src, dst, m_sim.now().seconds(), std::nullopt, std::nullopt});
    if (!m_medium->alive(src))
    {
        return uid;
    }
    DataPacket p;
    p.uid = uid;
    p.flowId = flowId;
    p.seqInFlow = seq;
    p.src = src;
    p.dst = dst;
    p.payloadBytes = payload;
    p.createdAt = m_sim.now();
    p.ttl = m_params.protocol.routing.netDiameter;
    p.path.push_back(src);
    m_nodes[src]->agent->onAppSend(std::move(p));
    return uid;
}

std::uint64_t
Network::injectPacket(NodeId src, NodeId dst)
{
    constexpr std::uint32_t kInjectedFlow = std::numeric_limits<std::uint32_t>::max();
    return originate(src, dst, kInjectedFlow, m_injectedSeq++, 512);
}

void
Network::sendFrame(NodeId from, NodeId to, Packet packet)
{
    if (!m_medium->alive(from))
    {
        return;
    }
    Frame f;
    f.src = from;
    f.dst = to;
    if (const auto* c = std::get_if<ControlPacket>(&packet))
    {
        f.kind = FrameKind::Control;
        f.payloadBytes = m_params.protocol.routing.sizes.sizeOf(*c);
    }
    else
    {
        f.kind = FrameKind::Data;
        f.payloadBytes = std::get<DataPacket>(packet).payloadBytes;
    }
    f.airtimeS = airtime(f.payloadBytes, m_params.radio.frameOverheadBytes, m_params.radio.bitrateBps);
    f.packet = std::move(packet);
    m_nodes[from]->mac->enqueue(std::move(f));
}

void
Network::setFate(const DataPacket& packet, DropReason reason)
{
    PacketRecord& r = m_packets.at(packet.uid);
    if (r.deliveredAt || r.drop)
    {
        return;
    }
    r.drop = reason;
    m_drops[static_cast<std::size_t>(reason)] += 1;
}

void
Network::onReceive(NodeId at, const Frame& frame)
{
    Node& node = *m_nodes[at];
    node.agent->onFrameHeard(frame.src);
    if (!frame.isBroadcast() && frame.dst != at)
    {
        return;
    }
    if (const auto* c = std::get_if<ControlPacket>(&frame.packet))
    {
        node.agent->onControl(*c, frame.src);
        return;
    }
    onData(at, std::get<DataPacket>(frame.packet), frame.src);
}

void
Network::onData(NodeId at, DataPacket packet, NodeId from)
{
    if (std::find(packet.path.begin(), packet.path.end(), at) != packet.path.end())
    {
        m_loops += 1;
    }
    packet.path.push_back(at);
    if (packet.dst == at)
    {
        PacketRecord& r = m_packets.at(packet.uid);
        if (!r.deliveredAt && !r.drop)
        {
            r.deliveredAt = m_sim.now().seconds();
        }
        return;
    }
    if (packet.ttl <= 1)
    {
        setFate(packet, DropReason::HopLimit);
        return;
    }
    packet.ttl -= 1;
    m_nodes[at]->agent->onData(std::move(packet), from);
}

void
Network::killAt(NodeId node, double atS)
{
    m_sim.schedule(SimTime(atS), kSystemTarget, [this, node] { m_medium->kill(node); });
}

void
Network::runUntil(double t)
{
    if (!m_started)
    {
        start();
    }
    m_events += m_sim.runUntil(SimTime(std::min(t, m_params.simTimeS)));
}

RunResult
Network::run()
{
    runUntil(m_params.simTimeS);
    m_medium->settleEnergy(SimTime(m_params.simTimeS));
    RunResult r;
    r.packets = m_packets;
    for (NodeId id = 0; id < m_medium->nodeCount(); ++id)
    {
        r.energy.push_back(m_medium->energy(id).state());
        r.energyLedgerJ += m_medium->energy(id).ledgerJ();
    }
    r.controlTx = m_controlTx;
    r.drops = m_drops;
    r.dataTx = m_dataTx;
    r.loopsDetected = m_loops;
    r.linkFailureReports = m_linkFailures;
    r.stats = totalStats();
    r.traceHash = m_sim.traceHash();
    r.events = m_events;
    return r;
}

} // namespace wsnsim

// Proactive destination-sequenced distance-vector routing.
#pragma once

#include "wsnsim/routing.hpp"

#include <map>
#include <set>

namespace wsnsim {

struct DsdvEntry
{
    NodeId destination = 0;
    NodeId nextHop = kNoNode;
    std::uint32_t metric = kInfiniteMetric;
    SeqNo seqno = 0;
    SimTime installTime;
    /// Weighted-average settling time estimate, seconds.
    double stableData = 0.0;
    /// When the current seqno was first heard, for the settling estimate.
    SimTime seqnoFirstHeard;

    bool broken() const { return metric == kInfiniteMetric; }
};

class DsdvAgent : public RoutingAgent
{
  public:
    DsdvAgent(AgentHost& host, const ProtocolParams& params);

    void start() override;
    ForwardAction onAppSend(DataPacket packet) override;
    ForwardAction onData(DataPacket packet, NodeId from) override;
    void onControl(const ControlPacket& packet, NodeId from) override;
    void onFrameHeard(NodeId from) override;
    void onLinkFailure(NodeId neighbor) override;

    /// Broadcasts the full table and schedules the next dump.
    void periodicDump();
    void processUpdate(const DsdvUpdate& update, NodeId from);
    /// Builds the full-dump payload without sending it.
    DsdvUpdate fullTable() const;

    const std::map<NodeId, DsdvEntry>& table() const { return m_table; }
    const DsdvEntry* route(NodeId dest) const;
    SeqNo ownSeqno() const { return m_table.at(m_host.self()).seqno; }
    /// Test hook: keep the own seqno fixed across dumps. A broken-route rebuttal still raises it.
    void holdSequenceNumber(bool hold) { m_holdSeqno = hold; }
    std::uint64_t updatesSent() const { return m_updatesSent; }

  private:
    ForwardAction forward(DataPacket packet);
    void markChanged(NodeId dest);
    void scheduleTriggered();
    void sendTriggered();
    void checkNeighbors();
    void checkParity();
    void broadcast(DsdvUpdate update);

    AgentHost& m_host;
    ProtocolParams m_params;
    std::map<NodeId, DsdvEntry> m_table;
    std::map<NodeId, SimTime> m_lastHeard;
    std::set<NodeId> m_changed;
    SimTime m_lastTriggered{-1.0e9};
    bool m_triggerScheduled = false;
    bool m_holdSeqno = false;
    std::uint64_t m_updatesSent = 0;
};

} // namespace wsnsim

// Simplified IEEE 802.15.4 unslotted CSMA-CA over a shared disk-model medium.
#pragma once

#include "wsnsim/kernel.hpp"
#include "wsnsim/packets.hpp"
#include "wsnsim/radio.hpp"

#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace wsnsim {

enum class FrameKind
{
    Control,
    Data,
};

struct Frame
{
    NodeId src = 0;
    NodeId dst = kBroadcast;
    FrameKind kind = FrameKind::Control;
    int payloadBytes = 0;
    double airtimeS = 0.0;
    Packet packet;

    bool isBroadcast() const { return dst == kBroadcast; }
};

struct CsmaParams
{
    int minBe = 3;
    int maxBe = 5;
    int maxBackoffs = 4;
    double unitBackoffS = 0.00032; // 20 symbols at 62.5 ksym/s
    /// Receive-to-transmit turnaround after a clear channel assessment.
    double turnaroundS = 0.000192;
    std::size_t queueCapacity = 50;
};

struct MacState
{
    std::deque<Frame> txQueue;
    int nb = 0;
    int be = 3;
    SimTime busyUntil;
};

/// Random backoff: u * unitBackoffS with u uniform on [0, 2^be - 1].
double backoffDelay(const CsmaParams& params, int be, RngStream& rng);

enum class TransmitOutcome
{
    Sent,
    Backoff,
    ChannelFailure,
};

/// One clear-channel assessment step of the CSMA-CA state machine.
/// On Backoff, nb and be have been advanced; on ChannelFailure nb exceeded maxBackoffs.
TransmitOutcome attemptTransmit(MacState& state, const CsmaParams& params, bool channelIdle);

enum class ReceptionOutcome
{
    Received,
    Collision,
    OutOfRange,
};

struct Transmission
{
    std::uint64_t id = 0;
    NodeId sender = 0;
    Position senderPos;
    SimTime start;
    SimTime end;
};

/// Reception of `frame` at `receiver`: received iff it is the only in-range
/// transmission overlapping its window and the receiver was not transmitting.
ReceptionOutcome deliver(std::span<const Transmission> inAir,
                         const Transmission& frame,
                         NodeId receiver,
                         Position receiverPos,
                         const RadioParams& params);

/// Shared wireless medium: tracks transmissions, radio modes and node energy.
class Medium
{
  public:
    using ReceiveHandler = std::function<void(const Frame&)>;
    using DoneHandler = std::function<void(ReceptionOutcome)>;

    Medium(Simulator& sim,
           std::vector<Position> positions,
           std::vector<double> initialEnergyJ,
           const RadioParams& params);

    void setReceiver(NodeId node, ReceiveHandler handler);

    /// Carrier sense at `node`: true when any in-range node (or itself) is transmitting.
    bool isBusy(NodeId node) const;

    /// Puts a frame on the air now. `onDone` receives the outcome at the
    /// unicast destination (Received for broadcasts).
    void transmit(Frame frame, DoneHandler onDone);

    bool alive(NodeId node) const;
    void kill(NodeId node);

    /// Charges idle time up to `now` for every node.
    void settleEnergy(SimTime now);

    const EnergyAccount& energy(NodeId node) const { return m_radios[node].energy; }
    const std::vector<Position>& positions() const { return m_positions; }
    const std::vector<std::vector<NodeId>>& neighbors() const { return m_neighbors; }
    const RadioParams& params() const { return m_params; }
    std::size_t nodeCount() const { return m_positions.size(); }

  private:
    struct RadioState
    {
        EnergyAccount energy;
        int incoming = 0;
        bool transmitting = false;
        bool alive = true;
    };

    void refreshMode(NodeId node);
    void finish(std::uint64_t id, Frame frame, DoneHandler onDone);

    Simulator& m_sim;
    std::vector<Position> m_positions;
    std::vector<std::vector<NodeId>> m_neighbors;
    RadioParams m_params;
    std::vector<RadioState> m_radios;
    std::vector<ReceiveHandler> m_receivers;
    std::vector<Transmission> m_history;
    double m_maxAirtimeS = 0.0;
    std::uint64_t m_nextId = 0;
};

/// Per-node CSMA-CA MAC with a drop-tail queue. The frame in service stays
/// at the head of the queue until it completes.
class Mac
{
  public:
    struct Callbacks
    {
        std::function<void(const Frame&, DropReason)> onDrop;
        std::function<void(const Frame&)> onTxStart;
        std::function<void(const Frame&, ReceptionOutcome)> onTxDone;
    };

    Mac(NodeId id, Simulator& sim, Medium& medium, const CsmaParams& params, RngStream& rng,
        Callbacks callbacks);

    /// False (and a QUEUE_FULL drop) when the queue is at capacity.
    bool enqueue(Frame frame);

    const MacState& state() const { return m_state; }
    const CsmaParams& params() const { return m_params; }

  private:
    void startService();
    void scheduleBackoff();
    void onBackoffEnd();
    void onTxEnd(ReceptionOutcome outcome);

    NodeId m_id;
    Simulator& m_sim;
    Medium& m_medium;
    CsmaParams m_params;
    RngStream& m_rng;
    Callbacks m_callbacks;
    MacState m_state;
    bool m_inService = false;
};

} // namespace wsnsim

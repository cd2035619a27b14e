#include "wsnsim/mac.hpp"

#include <algorithm>
#include <cassert>

namespace wsnsim {

double
backoffDelay(const CsmaParams& params, int be, RngStream& rng)
{
    if (be < 0 || be > params.maxBe)
    {
        throw ContractViolation("backoff exponent out of range");
    }
    const std::uint64_t slots = rng.uniformInt(0, (std::uint64_t{1} << be) - 1);
    return static_cast<double>(slots) * params.unitBackoffS;
}

TransmitOutcome
attemptTransmit(MacState& state, const CsmaParams& params, bool channelIdle)
{
    if (channelIdle)
    {
        return TransmitOutcome::Sent;
    }
    state.nb += 1;
    state.be = std::min(state.be + 1, params.maxBe);
    if (state.nb > params.maxBackoffs)
    {
        return TransmitOutcome::ChannelFailure;
    }
    return TransmitOutcome::Backoff;
}

ReceptionOutcome
deliver(std::span<const Transmission> inAir,
        const Transmission& frame,
        NodeId receiver,
        Position receiverPos,
        const RadioParams& params)
{
    if (frame.sender == receiver || !inRange(frame.senderPos, receiverPos, params))
    {
        return ReceptionOutcome::OutOfRange;
    }
    for (const Transmission& other : inAir)
    {
        if (other.id == frame.id)
        {
            continue;
        }
        const bool overlaps = other.start < frame.end && frame.start < other.end;
        if (!overlaps)
        {
            continue;
        }
        if (other.sender == receiver || inRange(other.senderPos, receiverPos, params))
        {
            return ReceptionOutcome::Collision;
        }
    }
    return ReceptionOutcome::Received;
}

Medium::Medium(Simulator& sim,
               std::vector<Position> positions,
               std::vector<double> initialEnergyJ,
               const RadioParams& params)
    : m_sim(sim),
      m_positions(std::move(positions)),
      m_params(params)
{
    if (initialEnergyJ.size() != m_positions.size())
    {
        throw ContractViolation("one initial energy per node required");
    }
    m_neighbors = connectivity(m_positions, m_params);
    m_radios.reserve(m_positions.size());
    for (double e : initialEnergyJ)
    {
        m_radios.push_back(RadioState{EnergyAccount(e, m_params)});
    }
    m_receivers.resize(m_positions.size());
}

void
Medium::setReceiver(NodeId node, ReceiveHandler handler)
{
    m_receivers.at(node) = std::move(handler);
}

bool
Medium::alive(NodeId node) const
{
    return m_radios[node].alive;
}

void
Medium::kill(NodeId node)
{
    RadioState& r = m_radios[node];
    r.energy.setMode(m_sim.now(), RadioMode::Off);
    r.alive = false;
}

bool
Medium::isBusy(NodeId node) const
{
    const RadioState& r = m_radios[node];
    return r.transmitting || r.incoming > 0;
}

void
Medium::refreshMode(NodeId node)
{
    RadioState& r = m_radios[node];
    if (!r.alive)
    {
        return;
    }
    RadioMode mode = RadioMode::Idle;
    if (r.transmitting)
    {
        mode = RadioMode::Transmit;
    }
    else if (r.incoming > 0)
    {
        mode = RadioMode::Receive;
    }
    r.energy.setMode(m_sim.now(), mode);
    if (r.energy.mode() == RadioMode::Off)
    {
        r.alive = false;
    }
}

void
Medium::transmit(Frame frame, DoneHandler onDone)
{
    const NodeId sender = frame.src;
    if (!m_radios[sender].alive)
    {
        onDone(ReceptionOutcome::OutOfRange);
        return;
    }
    const SimTime now = m_sim.now();
    const std::uint64_t id = m_nextId++;
    m_history.push_back(
        Transmission{id, sender, m_positions[sender], now, now + frame.airtimeS});

    // Anything that ended more than one maximal airtime ago cannot overlap a frame still on air.
    m_maxAirtimeS = std::max(m_maxAirtimeS, frame.airtimeS);
    const double horizon = now.seconds() - m_maxAirtimeS;
    const auto firstLive = std::find_if(m_history.begin(), m_history.end(), [horizon](const Transmission& t) {
        return t.end.seconds() >= horizon;
    });
    m_history.erase(m_history.begin(), firstLive);

    m_radios[sender].transmitting = true;
    refreshMode(sender);
    for (NodeId n : m_neighbors[sender])
    {
        m_radios[n].incoming += 1;
        refreshMode(n);
    }

    const double air = frame.airtimeS;
    m_sim.scheduleIn(air, sender, [this, id, f = std::move(frame), done = std::move(onDone)]() mutable {
        finish(id, std::move(f), std::move(done));
    });
}

void
Medium::finish(std::uint64_t id, Frame frame, DoneHandler onDone)
{
    const NodeId sender = frame.src;
    m_radios[sender].transmitting = false;
    refreshMode(sender);
    for (NodeId n : m_neighbors[sender])
    {
        m_radios[n].incoming -= 1;
        refreshMode(n);
    }

    const auto self = std::find_if(m_history.begin(), m_history.end(),
                                   [id](const Transmission& t) { return t.id == id; });
    assert(self != m_history.end());
    const Transmission tx = *self;

    ReceptionOutcome atDestination = ReceptionOutcome::OutOfRange;
    if (frame.isBroadcast())
    {
        atDestination = ReceptionOutcome::Received;
    }

    for (NodeId n : m_neighbors[sender])
    {
        if (!m_radios[n].alive)
        {
            continue;
        }
        const ReceptionOutcome outcome = deliver(m_history, tx, n, m_positions[n], m_params);
        if (n == frame.dst)
        {
            atDestination = outcome;
        }
        if (outcome == ReceptionOutcome::Received && m_receivers[n])
        {
            m_receivers[n](frame);
        }
    }
    onDone(atDestination);
}

void
Medium::settleEnergy(SimTime now)
{
    for (RadioState& r : m_radios)
    {
        r.energy.settle(now);
    }
}

Mac::Mac(NodeId id, Simulator& sim, Medium& medium, const CsmaParams& params, RngStream& rng,
         Callbacks callbacks)
    : m_id(id),
      m_sim(sim),
      m_medium(medium),
      m_params(params),
      m_rng(rng),
      m_callbacks(std::move(callbacks))
{
    if (params.minBe < 0 || params.minBe > params.maxBe || params.maxBackoffs < 0)
    {
        throw ContractViolation("invalid CSMA parameters");
    }
    m_state.be = params.minBe;
}

bool
Mac::enqueue(Frame frame)
{
    if (m_state.txQueue.size() >= m_params.queueCapacity)
    {
        if (m_callbacks.onDrop)
        {
            m_callbacks.onDrop(frame, DropReason::QueueFull);
        }
        return false;
    }
    m_state.txQueue.push_back(std::move(frame));
    if (!m_inService)
    {
        startService();
    }
    return true;
}

void
Mac::startService()
{
    if (m_state.txQueue.empty() || !m_medium.alive(m_id))
    {
        m_inService = false;
        return;
    }
    m_inService = true;
    m_state.nb = 0;
    m_state.be = m_params.minBe;
    scheduleBackoff();
}

void
Mac::scheduleBackoff()
{
    const double delay = backoffDelay(m_params, m_state.be, m_rng);
    m_sim.scheduleIn(delay, m_id, [this] { onBackoffEnd(); });
}

void
Mac::onBackoffEnd()
{
    if (!m_medium.alive(m_id))
    {
        m_inService = false;
        return;
    }
    switch (attemptTransmit(m_state, m_params, !m_medium.isBusy(m_id)))
    {
    case TransmitOutcome::Sent: {
        m_sim.scheduleIn(m_params.turnaroundS, m_id, [this] {
            if (!m_medium.alive(m_id))
            {
                m_inService = false;
                return;
            }
            Frame& head = m_state.txQueue.front();
            m_state.busyUntil = m_sim.now() + head.airtimeS;
            if (m_callbacks.onTxStart)
            {
                m_callbacks.onTxStart(head);
            }
            m_medium.transmit(head, [this](ReceptionOutcome outcome) { onTxEnd(outcome); });
        });
        break;
    }
    case TransmitOutcome::Backoff:
        scheduleBackoff();
        break;
    case TransmitOutcome::ChannelFailure: {
        Frame failed = std::move(m_state.txQueue.front());
        m_state.txQueue.pop_front();
        if (m_callbacks.onDrop)
        {
            m_callbacks.onDrop(failed, DropReason::CsmaFailure);
        }
        startService();
        break;
    }
    }
}

void
Mac::onTxEnd(ReceptionOutcome outcome)
{
    Frame done = std::move(m_state.txQueue.front());
    m_state.txQueue.pop_front();
    if (m_callbacks.onTxDone)
    {
        m_callbacks.onTxDone(done, outcome);
    }
    startService();
}

} // namespace wsnsim

#include "wsnsim/radio.hpp"

#include <cmath>
#include <deque>
#include <numbers>

namespace wsnsim {

double
distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool
inRange(Position a, Position b, const RadioParams& params)
{
    return distance(a, b) <= params.rangeM;
}

double
crossoverDistance(const RadioParams& params)
{
    return 4.0 * std::numbers::pi * params.txAntennaHeightM * params.rxAntennaHeightM /
           params.wavelengthM;
}

double
twoRayRxPower(const RadioParams& params, double txPowerW, double d)
{
    if (!(d > 0.0))
    {
        throw ContractViolation("two-ray model requires a positive distance");
    }
    const double gains = txPowerW * params.txGain * params.rxGain;
    if (d >= crossoverDistance(params))
    {
        const double ht = params.txAntennaHeightM;
        const double hr = params.rxAntennaHeightM;
        return gains * ht * ht * hr * hr / std::pow(d, 4);
    }
    const double fourPi = 4.0 * std::numbers::pi;
    return gains * params.wavelengthM * params.wavelengthM / (fourPi * fourPi * d * d);
}

double
airtime(int payloadBytes, int overheadBytes, double bitrateBps)
{
    if (payloadBytes < 0 || overheadBytes < 0 || !(bitrateBps > 0.0))
    {
        throw ContractViolation("airtime requires non-negative sizes and a positive bitrate");
    }
    return static_cast<double>(payloadBytes + overheadBytes) * 8.0 / bitrateBps;
}

std::vector<std::vector<NodeId>>
connectivity(std::span<const Position> positions, const RadioParams& params)
{
    std::vector<std::vector<NodeId>> adj(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
        for (std::size_t j = i + 1; j < positions.size(); ++j)
        {
            if (inRange(positions[i], positions[j], params))
            {
                adj[i].push_back(static_cast<NodeId>(j));
                adj[j].push_back(static_cast<NodeId>(i));
            }
        }
    }
    return adj;
}

std::vector<int>
bfsHops(const std::vector<std::vector<NodeId>>& adjacency, NodeId source)
{
    std::vector<int> hops(adjacency.size(), -1);
    std::deque<NodeId> frontier{source};
    hops[source] = 0;
    while (!frontier.empty())
    {
        const NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : adjacency[u])
        {
            if (hops[v] < 0)
            {
                hops[v] = hops[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return hops;
}

EnergyState
charge(EnergyState state, double powerW, double durationS)
{
    if (powerW < 0.0 || durationS < 0.0)
    {
        throw ContractViolation("charge requires non-negative power and duration");
    }
    state.consumedJ = std::min(state.initialJ, state.consumedJ + powerW * durationS);
    return state;
}

EnergyAccount::EnergyAccount(double initialJ, const RadioParams& params)
    : m_state{initialJ, 0.0},
      m_params(params)
{
}

double
EnergyAccount::powerFor(RadioMode mode) const
{
    switch (mode)
    {
    case RadioMode::Idle:
        return m_params.idlePowerW;
    case RadioMode::Receive:
        return m_params.rxPowerW;
    case RadioMode::Transmit:
        return m_params.txPowerW;
    case RadioMode::Off:
        return 0.0;
    }
    return 0.0;
}

void
EnergyAccount::settle(SimTime now)
{
    const double dt = now - m_since;
    if (dt > 0.0)
    {
        const double before = m_state.consumedJ;
        m_state = charge(m_state, powerFor(m_mode), dt);
        m_ledgerJ += m_state.consumedJ - before;
    }
    m_since = now;
    if (m_state.depleted())
    {
        m_mode = RadioMode::Off;
    }
}

void
EnergyAccount::setMode(SimTime now, RadioMode mode)
{
    settle(now);
    if (m_mode != RadioMode::Off)
    {
        m_mode = mode;
    }
}

} // namespace wsnsim

// Physical layer: geometry, disk connectivity, two-ray ground power, airtime, energy.
#pragma once

#include "wsnsim/kernel.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace wsnsim {

/// Field-local Cartesian coordinates in meters.
struct Position
{
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;
};

double distance(Position a, Position b);

struct RadioParams
{
    double rangeM = 60.0;
    double bitrateBps = 250000.0;
    double txPowerW = 0.0522;
    double rxPowerW = 0.0564;
    double idlePowerW = 0.00128;
    double txAntennaHeightM = 1.5;
    double rxAntennaHeightM = 1.5;
    double txGain = 1.0;
    double rxGain = 1.0;
    double wavelengthM = 0.1224;
    /// Transmit power fed to the propagation model (reporting only).
    double radiatedPowerW = 0.001;
    int frameOverheadBytes = 11;
};

/// True iff the two points are at most rangeM apart (boundary inclusive).
bool inRange(Position a, Position b, const RadioParams& params);

/// Distance where the two-ray ground model switches from d^-2 to d^-4.
double crossoverDistance(const RadioParams& params);

/// Received power in watts. Throws ContractViolation for d <= 0.
double twoRayRxPower(const RadioParams& params, double txPowerW, double d);

/// Seconds on air for a frame.
double airtime(int payloadBytes, int overheadBytes, double bitrateBps);

/// Adjacency lists of the disk graph (symmetric, no self loops).
std::vector<std::vector<NodeId>> connectivity(std::span<const Position> positions,
                                              const RadioParams& params);

/// Hop distances from `source` over an adjacency list; unreachable = -1.
std::vector<int> bfsHops(const std::vector<std::vector<NodeId>>& adjacency, NodeId source);

struct EnergyState
{
    double initialJ = 0.0;
    double consumedJ = 0.0;

    double residualJ() const { return initialJ - consumedJ; }
    bool depleted() const { return consumedJ >= initialJ; }
};

/// Adds power*duration to the consumed energy, clamped at the initial budget.
EnergyState charge(EnergyState state, double powerW, double durationS);

enum class RadioMode
{
    Idle,
    Receive,
    Transmit,
    Off,
};

/// Per-node lazy energy account: the elapsed interval is charged at the
/// previous mode's power whenever the mode changes.
class EnergyAccount
{
  public:
    EnergyAccount(double initialJ, const RadioParams& params);

    void setMode(SimTime now, RadioMode mode);
    /// Charges up to `now` without changing mode.
    void settle(SimTime now);

    RadioMode mode() const { return m_mode; }
    const EnergyState& state() const { return m_state; }
    /// Sum of the individual charges actually applied.
    double ledgerJ() const { return m_ledgerJ; }

  private:
    double powerFor(RadioMode mode) const;

    EnergyState m_state;
    RadioParams m_params;
    RadioMode m_mode = RadioMode::Idle;
    SimTime m_since;
    double m_ledgerJ = 0.0;
};

} // namespace wsnsim

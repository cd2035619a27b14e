// Per-run metrics (delay, delivery ratio, energy), replication aggregates
// with t-based confidence intervals, and the rank-score summary.
#pragma once

#include "wsnsim/network.hpp"
#include "wsnsim/radio.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wsnsim {

/// Mean (r_i - s_i) over delivered packets, milliseconds. Empty if none delivered.
std::optional<double> endToEndDelayMs(std::span<const PacketRecord> log);

struct PdrResult
{
    double pdr = 0.0;
    std::size_t flowsCounted = 0;
    /// Flows listed but with nothing offered; left out of the mean.
    std::vector<std::uint32_t> excludedFlows;
};

/// Unweighted mean over flows of delivered_f / offered_f.
PdrResult packetDeliveryRatio(std::span<const PacketRecord> log, std::span<const std::uint32_t> flowIds);

/// delivered / offered over all packets; reported for comparison only.
double aggregateDeliveryRatio(std::span<const PacketRecord> log);

struct EnergySummary
{
    double totalKj = 0.0;
    double averageKj = 0.0;
    /// Average over every node except `sink`.
    double averageSensorsKj = 0.0;
};

EnergySummary energyConsumption(std::span<const EnergyState> nodes, std::size_t sink = 0);

struct Aggregate
{
    double mean = 0.0;
    std::optional<double> stddev;
    std::optional<double> halfwidth;
    std::size_t n = 0;
};

/// Mean, sample stddev and Student-t half width. n < 2 gives the mean only.
/// Throws ContractViolation for an empty sample or confidence outside (0, 1).
Aggregate aggregate(std::span<const double> values, double confidence = 0.95);

struct RunReport
{
    std::string protocol;
    int scenario = 0;
    std::uint64_t seed = 0;
    double pdr = 0.0;
    std::optional<double> delayMs;
    EnergySummary energy;
    std::uint64_t offered = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropQueue = 0;
    std::uint64_t dropCsma = 0;
    /// No route, plus hop-limit drops.
    std::uint64_t dropNoRoute = 0;
    /// Collisions, plus unicasts to a next hop that was gone.
    std::uint64_t dropCollision = 0;
    std::uint64_t helloTx = 0;
    std::uint64_t rreqTx = 0;
    std::uint64_t rrepTx = 0;
    std::uint64_t rerrTx = 0;
    std::uint64_t dsdvUpdateTx = 0;
};

RunReport makeReport(const std::string& protocol, int scenario, std::uint64_t seed, const RunResult& result,
                     std::span<const std::uint32_t> flowIds);

struct MetricColumn
{
    std::string name;
    bool higherIsBetter = true;
    /// One mean per protocol, in the table's protocol order.
    std::vector<double> means;
};

struct ScoreTable
{
    std::vector<std::string> protocols;
    std::vector<std::string> metrics;
    /// scores[m][p]: 1 is worst, protocols.size() is best.
    std::vector<std::vector<int>> scores;
    std::vector<int> totals;
};

/// Per metric, score = count - (number of strictly better protocols); ties share the higher score.
ScoreTable scoreSummary(const std::vector<std::string>& protocols, const std::vector<MetricColumn>& columns);

std::string formatScoreTable(const ScoreTable& table);

} // namespace wsnsim

#include "wsnsim/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace wsnsim {

std::optional<double>
endToEndDelayMs(std::span<const PacketRecord> log)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const PacketRecord& r : log)
    {
        if (r.deliveredAt)
        {
            sum += *r.deliveredAt - r.createdAt;
            n += 1;
        }
    }
    if (n == 0)
    {
        return std::nullopt;
    }
    return 1000.0 * sum / static_cast<double>(n);
}

PdrResult
packetDeliveryRatio(std::span<const PacketRecord> log, std::span<const std::uint32_t> flowIds)
{
    std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> counts;
    for (std::uint32_t f : flowIds)
    {
        counts[f];
    }
    for (const PacketRecord& r : log)
    {
        auto it = counts.find(r.flowId);
        if (it == counts.end())
        {
            continue;
        }
        it->second.first += 1;
        if (r.deliveredAt)
        {
            it->second.second += 1;
        }
    }
    PdrResult out;
    double sum = 0.0;
    for (const auto& [flow, c] : counts)
    {
        if (c.first == 0)
        {
            out.excludedFlows.push_back(flow);
            continue;
        }
        sum += static_cast<double>(c.second) / static_cast<double>(c.first);
        out.flowsCounted += 1;
    }
    out.pdr = out.flowsCounted == 0 ? 0.0 : sum / static_cast<double>(out.flowsCounted);
    return out;
}

double
aggregateDeliveryRatio(std::span<const PacketRecord> log)
{
    if (log.empty())
    {
        return 0.0;
    }
    std::size_t delivered = 0;
    for (const PacketRecord& r : log)
    {
        delivered += r.deliveredAt ? 1 : 0;
    }
    return static_cast<double>(delivered) / static_cast<double>(log.size());
}

EnergySummary
energyConsumption(std::span<const EnergyState> nodes, std::size_t sink)
{
    EnergySummary s;
    if (nodes.empty())
    {
        return s;
    }
    double sensors = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const double used = nodes[i].initialJ - nodes[i].residualJ();
        s.totalKj += used / 1000.0;
        if (i != sink)
        {
            sensors += used / 1000.0;
        }
    }
    s.averageKj = s.totalKj / static_cast<double>(nodes.size());
    const std::size_t sensorCount = sink < nodes.size() ? nodes.size() - 1 : nodes.size();
    s.averageSensorsKj = sensorCount == 0 ? 0.0 : sensors / static_cast<double>(sensorCount);
    return s;
}

Aggregate
aggregate(std::span<const double> values, double confidence)
{
    if (values.empty())
    {
        throw ContractViolation("aggregate of an empty sample");
    }
    if (!(confidence > 0.0 && confidence < 1.0))
    {
        throw ContractViolation("confidence must lie in (0, 1)");
    }
    Aggregate a;
    a.n = values.size();
    double sum = 0.0;
    for (double v : values)
    {
        sum += v;
    }
    a.mean = sum / static_cast<double>(a.n);
    if (a.n < 2)
    {
        return a;
    }
    double ss = 0.0;
    for (double v : values)
    {
        ss += (v - a.mean) * (v - a.mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    const boost::math::students_t dist(static_cast<double>(a.n - 1));
    const double t = boost::math::quantile(dist, 0.5 + confidence / 2.0);
    a.stddev = sd;
    a.halfwidth = t * sd / std::sqrt(static_cast<double>(a.n));
    return a;
}

RunReport
makeReport(const std::string& protocol, int scenario, std::uint64_t seed, const RunResult& result,
           std::span<const std::uint32_t> flowIds)
{
    RunReport r;
    r.protocol = protocol;
    r.scenario = scenario;
    r.seed = seed;
    r.pdr = packetDeliveryRatio(result.packets, flowIds).pdr;
    r.delayMs = endToEndDelayMs(result.packets);
    r.energy = energyConsumption(result.energy, 0);
    r.offered = result.packets.size();
    for (const PacketRecord& p : result.packets)
    {
        r.delivered += p.deliveredAt ? 1 : 0;
    }
    r.dropQueue = result.dropCount(DropReason::QueueFull);
    r.dropCsma = result.dropCount(DropReason::CsmaFailure);
    r.dropNoRoute = result.dropCount(DropReason::NoRoute) + result.dropCount(DropReason::HopLimit);
    r.dropCollision = result.dropCount(DropReason::Collision) + result.dropCount(DropReason::OutOfRange);
    r.helloTx = result.controlCount(ControlKind::Hello);
    r.rreqTx = result.controlCount(ControlKind::Rreq);
    r.rrepTx = result.controlCount(ControlKind::Rrep);
    r.rerrTx = result.controlCount(ControlKind::Rerr);
    r.dsdvUpdateTx = result.controlCount(ControlKind::DsdvUpdate);
    return r;
}

ScoreTable
scoreSummary(const std::vector<std::string>& protocols, const std::vector<MetricColumn>& columns)
{
    ScoreTable t;
    t.protocols = protocols;
    t.totals.assign(protocols.size(), 0);
    const int n = static_cast<int>(protocols.size());
    for (const MetricColumn& c : columns)
    {
        if (c.means.size() != protocols.size())
        {
            throw ContractViolation("metric '" + c.name + "' needs one mean per protocol");
        }
        std::vector<int> scores(protocols.size());
        for (std::size_t p = 0; p < protocols.size(); ++p)
        {
            int better = 0;
            for (std::size_t q = 0; q < protocols.size(); ++q)
            {
                const bool qBetter = c.higherIsBetter ? c.means[q] > c.means[p] : c.means[q] < c.means[p];
                better += qBetter ? 1 : 0;
            }
            scores[p] = n - better;
            t.totals[p] += scores[p];
        }
        t.metrics.push_back(c.name);
        t.scores.push_back(std::move(scores));
    }
    return t;
}

std::string
formatScoreTable(const ScoreTable& table)
{
    std::ostringstream out;
    out << std::left << std::setw(12) << "metric";
    for (const std::string& p : table.protocols)
    {
        out << std::right << std::setw(10) << p;
    }
    out << '\n';
    for (std::size_t m = 0; m < table.metrics.size(); ++m)
    {
        out << std::left << std::setw(12) << table.metrics[m];
        for (int s : table.scores[m])
        {
            out << std::right << std::setw(10) << s;
        }
        out << '\n';
    }
    out << std::left << std::setw(12) << "total";
    for (int s : table.totals)
    {
        out << std::right << std::setw(10) << s;
    }
    out << '\n';
    return out.str();
}

} // namespace wsnsim

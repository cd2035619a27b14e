#include "wsnsim/experiment.hpp"

#include "doctest.h"

#include <set>

using namespace wsnsim;

namespace {

ExperimentConfig
small()
{
    ExperimentConfig c;
    c.protocols = {"AODV", "DSDV"};
    c.scenarios = {1};
    c.nRuns = 2;
    c.simTimeS = 30.0;
    c.masterSeed = 5;
    return c;
}

} // namespace

TEST_CASE("run seeds are distinct across protocol, scenario and run")
{
    std::set<std::uint64_t> seeds;
    int count = 0;
    for (int p = 0; p < 5; ++p)
    {
        for (int s = 1; s <= 3; ++s)
        {
            for (int r = 0; r < 100; ++r)
            {
                seeds.insert(deriveRunSeed(1, p, s, r));
                ++count;
            }
        }
    }
    CHECK(seeds.size() == static_cast<std::size_t>(count));
    CHECK(deriveRunSeed(1, 0, 1, 0) != deriveRunSeed(2, 0, 1, 0));
    CHECK_THROWS_AS(deriveRunSeed(1, 9, 1, 0), ContractViolation);
}

TEST_CASE("every protocol sees the same workload in a replication")
{
    ExperimentConfig c;
    const Scenario a = makeScenario(c, 2, 3);
    const Scenario b = makeScenario(c, 2, 3);
    const Scenario other = makeScenario(c, 2, 4);
    CHECK(a.positions == b.positions);
    REQUIRE(a.flows.size() == b.flows.size());
    for (std::size_t i = 0; i < a.flows.size(); ++i)
    {
        CHECK(a.flows[i].src == b.flows[i].src);
        CHECK(a.flows[i].startS == b.flows[i].startS);
    }
    bool differs = a.positions != other.positions;
    for (std::size_t i = 0; i < a.flows.size() && !differs; ++i)
    {
        differs = a.flows[i].src != other.flows[i].src || a.flows[i].startS != other.flows[i].startS;
    }
    CHECK(differs);
}

TEST_CASE("protocol index follows the canonical order")
{
    CHECK(protocolIndex("AOMDV") == 0);
    CHECK(protocolIndex("DSDV") == 4);
    CHECK_THROWS_AS(protocolIndex("OLSR"), ContractViolation);
}

TEST_CASE("runs are reproducible and independent of the thread count")
{
    const ExperimentConfig c = small();
    const std::string one = runsCsv(runMatrix(c, 1));
    const std::string two = runsCsv(runMatrix(c, 2));
    CHECK(one == two);
    CHECK(one.rfind(runsCsvHeader(), 0) == 0);
    // header plus one line per run
    CHECK(std::count(one.begin(), one.end(), '\n') == 1 + 4);

    ExperimentConfig again = configFromDocument(metadata(c));
    CHECK(runsCsv(runMatrix(again, 1)) == one);

    ExperimentConfig other = c;
    other.masterSeed = 6;
    CHECK(runsCsv(runMatrix(other, 1)) != one);
}

TEST_CASE("a single cell is repeatable down to the event trace")
{
    const ExperimentConfig c = small();
    const CellResult a = runCell(c, "AODV", 1, 0);
    const CellResult b = runCell(c, "AODV", 1, 0);
    CHECK(a.result.traceHash == b.result.traceHash);
    CHECK(a.result.events == b.result.events);
    CHECK(a.report.pdr == b.report.pdr);
    CHECK(a.report.offered > 0);
    CHECK(a.report.offered == a.result.packets.size());
    CHECK(a.result.stats.monotonicityViolations == 0);
    CHECK(a.result.loopsDetected == 0);
    // the ledger and the per-node totals agree
    double total = 0.0;
    for (const EnergyState& e : a.result.energy)
    {
        total += e.consumedJ;
    }
    CHECK(total == doctest::Approx(a.result.energyLedgerJ).epsilon(1e-9));
}

TEST_CASE("every offered packet ends up in exactly one state")
{
    const ExperimentConfig c = small();
    for (const std::string& p : {"AOMDV", "DSDV"})
    {
        const CellResult cell = runCell(c, p, 1, 1);
        std::uint64_t delivered = 0;
        std::uint64_t dropped = 0;
        for (const PacketRecord& r : cell.result.packets)
        {
            CHECK_FALSE((r.deliveredAt && r.drop));
            delivered += r.deliveredAt ? 1 : 0;
            dropped += r.drop ? 1 : 0;
            if (r.deliveredAt)
            {
                CHECK(*r.deliveredAt >= r.createdAt);
            }
        }
        std::uint64_t drops = 0;
        for (auto d : cell.result.drops)
        {
            drops += d;
        }
        CHECK(drops == dropped);
        CHECK(delivered == cell.report.delivered);
    }
}

TEST_CASE("aggregates and summary")
{
    const ExperimentConfig c = small();
    const auto reports = runMatrix(c, 1);
    const auto agg = aggregateReports(c, reports);
    REQUIRE(agg.size() == 2);
    CHECK(agg[0].protocol == "AODV");
    CHECK(agg[0].pdr.n == 2);
    CHECK(agg[0].pdr.halfwidth.has_value());
    const std::string csv = aggregatesCsv(agg);
    CHECK(csv.rfind("protocol,scenario,metric,n,mean,stddev,ci_halfwidth,excluded", 0) == 0);
    const ScoreTable t = scoreReports(c, reports);
    CHECK(t.protocols == c.protocols);
    CHECK(t.metrics.size() == 3);
    CHECK(summaryText(c, reports).find("total") != std::string::npos);
}

TEST_CASE("metadata lists every run with its seeds")
{
    const ExperimentConfig c = small();
    const auto doc = metadata(c);
    REQUIRE(doc.at("runs").size() == 4);
    const auto& first = doc.at("runs").at(0);
    CHECK(first.at("protocol") == "AODV");
    CHECK(first.at("seed") == deriveRunSeed(5, protocolIndex("AODV"), 1, 0));
    CHECK(first.at("workload_seed") == deriveWorkloadSeed(5, 1, 0));
    CHECK(doc.at("config") == configToJson(c));
}

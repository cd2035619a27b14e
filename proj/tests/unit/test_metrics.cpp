#include "wsnsim/metrics.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <random>

using namespace wsnsim;

TEST_CASE("metrics match brute-force recomputation on random traces")
{
    const test::OracleOutcome o = test::checkOracles(20);
    CHECK(o.logs == 20);
    CHECK(o.mismatches == 0);
}

TEST_CASE("delivery ratio is the per-flow mean, not the pooled ratio")
{
    const auto log = test::unevenFlows();
    const std::vector<std::uint32_t> ids{0, 1};
    CHECK(packetDeliveryRatio(log, ids).pdr == doctest::Approx(0.55));
    CHECK(aggregateDeliveryRatio(log) == doctest::Approx(110.0 / 1010.0));
}

TEST_CASE("flows with nothing offered are excluded from the mean")
{
    std::vector<PacketRecord> log(4);
    log[0].flowId = 0;
    log[0].deliveredAt = 2.0;
    log[1].flowId = 0;
    log[2].flowId = 2;
    log[2].deliveredAt = 2.0;
    log[3].flowId = 9; // not listed
    const std::vector<std::uint32_t> ids{0, 1, 2};
    const PdrResult r = packetDeliveryRatio(log, ids);
    CHECK(r.pdr == doctest::Approx(0.75));
    CHECK(r.flowsCounted == 2);
    CHECK(r.excludedFlows == std::vector<std::uint32_t>{1});
}

TEST_CASE("delay ignores undelivered packets")
{
    std::vector<PacketRecord> log(3);
    log[0].createdAt = 1.0;
    log[0].deliveredAt = 1.5;
    log[1].createdAt = 2.0;
    log[1].deliveredAt = 2.1;
    log[2].createdAt = 3.0;
    log[2].drop = DropReason::NoRoute;
    CHECK(*endToEndDelayMs(log) == doctest::Approx(300.0));
    CHECK_FALSE(endToEndDelayMs(std::span<const PacketRecord>(log).subspan(2)));
}

TEST_CASE("energy with heterogeneous budgets")
{
    const std::vector<EnergyState> nodes{{50000.0, 100.0}, {5000.0, 10.0}, {5000.0, 30.0}};
    const EnergySummary e = energyConsumption(nodes, 0);
    CHECK(e.totalKj == doctest::Approx(0.14));
    CHECK(e.averageKj == doctest::Approx(0.14 / 3.0));
    CHECK(e.averageSensorsKj == doctest::Approx(0.02));
}

TEST_CASE("t interval on {1, 2, 3}")
{
    const std::vector<double> v{1.0, 2.0, 3.0};
    const Aggregate a = aggregate(v, 0.95);
    CHECK(a.n == 3);
    CHECK(a.mean == doctest::Approx(2.0));
    REQUIRE(a.stddev);
    CHECK(*a.stddev == doctest::Approx(1.0));
    REQUIRE(a.halfwidth);
    // t(0.975, 2) = 4.302653; 4.302653 / sqrt(3)
    CHECK(std::abs(*a.halfwidth - 2.484138) < 1e-6);
}

TEST_CASE("aggregate edge cases")
{
    const std::vector<double> one{4.0};
    const Aggregate a = aggregate(one);
    CHECK(a.mean == 4.0);
    CHECK_FALSE(a.stddev);
    CHECK_FALSE(a.halfwidth);
    CHECK_THROWS_AS(aggregate(std::span<const double>{}), ContractViolation);
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS_AS(aggregate(two, 1.0), ContractViolation);
    CHECK_THROWS_AS(aggregate(two, 0.0), ContractViolation);
}

TEST_CASE("confidence intervals cover the true mean about 95% of the time")
{
    std::normal_distribution<double> normal(10.0, 2.0);
    std::mt19937_64 eng(12345);
    int covered = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t)
    {
        std::vector<double> v(30);
        for (double& x : v)
        {
            x = normal(eng);
        }
        const Aggregate a = aggregate(v);
        covered += std::abs(a.mean - 10.0) <= *a.halfwidth ? 1 : 0;
    }
    const double rate = static_cast<double>(covered) / trials;
    CHECK(rate > 0.93);
    CHECK(rate < 0.97);
}

TEST_CASE("score summary")
{
    const std::vector<std::string> p{"A", "B", "C"};
    SUBCASE("ranks with shared higher score on ties")
    {
        const ScoreTable t = scoreSummary(p, {MetricColumn{"pdr", true, {0.5, 0.9, 0.5}}});
        CHECK(t.scores[0] == std::vector<int>{2, 3, 2});
        CHECK(t.totals == std::vector<int>{2, 3, 2});
    }
    SUBCASE("all equal")
    {
        const ScoreTable t = scoreSummary(p, {MetricColumn{"x", true, {1, 1, 1}}});
        CHECK(t.scores[0] == std::vector<int>{3, 3, 3});
    }
    SUBCASE("flipping the polarity reverses distinct ranks")
    {
        const ScoreTable hi = scoreSummary(p, {MetricColumn{"x", true, {1, 2, 3}}});
        const ScoreTable lo = scoreSummary(p, {MetricColumn{"x", false, {1, 2, 3}}});
        CHECK(hi.scores[0] == std::vector<int>{1, 2, 3});
        CHECK(lo.scores[0] == std::vector<int>{3, 2, 1});
    }
    CHECK_THROWS_AS(scoreSummary(p, {MetricColumn{"x", true, {1, 2}}}), ContractViolation);
    const std::string text = formatScoreTable(scoreSummary(p, {MetricColumn{"x", true, {1, 2, 3}}}));
    CHECK(text.find("total") != std::string::npos);
}

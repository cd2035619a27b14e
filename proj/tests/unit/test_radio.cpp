#include "wsnsim/radio.hpp"

#include "doctest.h"

#include <cmath>

using namespace wsnsim;

TEST_CASE("disk range is symmetric and boundary inclusive")
{
    RadioParams p;
    CHECK(inRange({0, 0}, {60, 0}, p));
    CHECK_FALSE(inRange({0, 0}, {60.0001, 0}, p));
    RngStream r(5, globalStreamId(Subsystem::Scenario));
    for (int i = 0; i < 1000; ++i)
    {
        const Position a{r.uniform(0, 150), r.uniform(0, 150)};
        const Position b{r.uniform(0, 150), r.uniform(0, 150)};
        CHECK(inRange(a, b, p) == inRange(b, a, p));
    }
}

TEST_CASE("airtime of a data frame")
{
    CHECK(airtime(512, 11, 250000.0) == doctest::Approx(523.0 * 8.0 / 250000.0));
    CHECK(airtime(0, 11, 250000.0) == doctest::Approx(88.0 / 250000.0));
}

TEST_CASE("two-ray ground switches from Friis to d^-4 at the crossover")
{
    RadioParams p;
    const double dc = crossoverDistance(p);
    CHECK(dc == doctest::Approx(4.0 * M_PI * 1.5 * 1.5 / 0.1224));
    const double pt = p.radiatedPowerW;
    // near: inverse square
    CHECK(twoRayRxPower(p, pt, 10.0) / twoRayRxPower(p, pt, 20.0) == doctest::Approx(4.0));
    // far: inverse fourth power
    CHECK(twoRayRxPower(p, pt, 2.0 * dc) / twoRayRxPower(p, pt, 4.0 * dc) == doctest::Approx(16.0));
    // continuous at the crossover
    CHECK(twoRayRxPower(p, pt, dc * (1 - 1e-9)) == doctest::Approx(twoRayRxPower(p, pt, dc * (1 + 1e-9))));
    CHECK_THROWS_AS(twoRayRxPower(p, pt, 0.0), ContractViolation);
}

TEST_CASE("connectivity and bfs on a line")
{
    RadioParams p;
    const std::vector<Position> line{{0, 0}, {50, 0}, {100, 0}, {150, 0}, {400, 0}};
    const auto adj = connectivity(line, p);
    CHECK(adj[0] == std::vector<NodeId>{1});
    CHECK(adj[1] == std::vector<NodeId>{0, 2});
    CHECK(adj[4].empty());
    CHECK(bfsHops(adj, 0) == std::vector<int>{0, 1, 2, 3, -1});
}

TEST_CASE("charge clamps at the budget")
{
    EnergyState s{10.0, 0.0};
    s = charge(s, 2.0, 3.0);
    CHECK(s.consumedJ == doctest::Approx(6.0));
    s = charge(s, 2.0, 3.0);
    CHECK(s.consumedJ == doctest::Approx(10.0));
    CHECK(s.depleted());
    CHECK(s.residualJ() == doctest::Approx(0.0));
}

TEST_CASE("energy account charges each interval at the previous mode")
{
    RadioParams p;
    EnergyAccount acc(100.0, p);
    acc.setMode(SimTime(10.0), RadioMode::Transmit);
    acc.setMode(SimTime(11.0), RadioMode::Receive);
    acc.setMode(SimTime(13.0), RadioMode::Idle);
    acc.settle(SimTime(20.0));
    const double expected = 10.0 * p.idlePowerW + 1.0 * p.txPowerW + 2.0 * p.rxPowerW + 7.0 * p.idlePowerW;
    CHECK(acc.state().consumedJ == doctest::Approx(expected).epsilon(1e-12));
    CHECK(acc.ledgerJ() == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("an account that is switched off stops draining")
{
    RadioParams p;
    EnergyAccount acc(100.0, p);
    acc.setMode(SimTime(1.0), RadioMode::Off);
    acc.settle(SimTime(1000.0));
    CHECK(acc.state().consumedJ == doctest::Approx(p.idlePowerW));
}

#include "wsnsim/kernel.hpp"

#include "doctest.h"

#include <set>

using namespace wsnsim;

TEST_CASE("events pop in time order, ties in insertion order")
{
    Simulator sim;
    std::vector<int> order;
    sim.schedule(SimTime(2.0), 0, [&] { order.push_back(3); });
    sim.schedule(SimTime(1.0), 0, [&] { order.push_back(1); });
    sim.schedule(SimTime(1.0), 0, [&] { order.push_back(2); });
    CHECK(sim.runUntil(SimTime(10.0)) == 3);
    CHECK(order == std::vector<int>{1, 2, 3});
    CHECK(sim.now() == SimTime(10.0));
}

TEST_CASE("events beyond the horizon stay queued")
{
    Simulator sim;
    int fired = 0;
    sim.scheduleIn(1.0, 0, [&] { ++fired; });
    sim.scheduleIn(5.0, 0, [&] { ++fired; });
    sim.runUntil(SimTime(3.0));
    CHECK(fired == 1);
    CHECK(sim.pending() == 1);
    sim.runUntil(SimTime(5.0));
    CHECK(fired == 2);
}

TEST_CASE("scheduling into the past is rejected")
{
    Simulator sim;
    sim.runUntil(SimTime(4.0));
    CHECK_THROWS_AS(sim.schedule(SimTime(3.0), 0, [] {}), ContractViolation);
    CHECK_THROWS_AS(sim.scheduleIn(-1.0, 0, [] {}), ContractViolation);
}

TEST_CASE("cancelled events do not run")
{
    Simulator sim;
    bool ran = false;
    const EventHandle h = sim.scheduleIn(1.0, 0, [&] { ran = true; });
    sim.cancel(h);
    sim.runUntil(SimTime(2.0));
    CHECK_FALSE(ran);
}

TEST_CASE("events scheduled from inside an event run in the same pass")
{
    Simulator sim;
    int depth = 0;
    std::function<void()> again = [&] {
        if (++depth < 5)
        {
            sim.scheduleIn(0.5, 0, again);
        }
    };
    sim.scheduleIn(0.0, 0, again);
    sim.runUntil(SimTime(10.0));
    CHECK(depth == 5);
}

TEST_CASE("trace hash depends on the processed sequence")
{
    auto run = [](double second) {
        Simulator sim;
        sim.scheduleIn(1.0, 1, [] {});
        sim.scheduleIn(second, 2, [] {});
        sim.runUntil(SimTime(10.0));
        return sim.traceHash();
    };
    CHECK(run(2.0) == run(2.0));
    CHECK(run(2.0) != run(3.0));
}

TEST_CASE("rng streams are reproducible and independent")
{
    RngStream a(42, nodeStreamId(3, Subsystem::MacBackoff));
    RngStream b(42, nodeStreamId(3, Subsystem::MacBackoff));
    RngStream c(42, nodeStreamId(3, Subsystem::Traffic));
    RngStream d(43, nodeStreamId(3, Subsystem::MacBackoff));
    int sameC = 0;
    int sameD = 0;
    for (int i = 0; i < 100; ++i)
    {
        const double x = a.uniform(0.0, 1.0);
        CHECK(x == b.uniform(0.0, 1.0));
        sameC += x == c.uniform(0.0, 1.0) ? 1 : 0;
        sameD += x == d.uniform(0.0, 1.0) ? 1 : 0;
    }
    CHECK(sameC == 0);
    CHECK(sameD == 0);
}

TEST_CASE("rng ranges")
{
    RngStream r(1, globalStreamId(Subsystem::Scenario));
    for (int i = 0; i < 1000; ++i)
    {
        const double u = r.uniform(2.0, 3.0);
        CHECK(u >= 2.0);
        CHECK(u < 3.0);
        const auto k = r.uniformInt(4, 6);
        CHECK(k >= 4);
        CHECK(k <= 6);
    }
    CHECK_THROWS_AS(r.uniform(1.0, 1.0), ContractViolation);
}

TEST_CASE("stream ids do not collide across nodes and subsystems")
{
    std::set<std::uint64_t> ids;
    for (NodeId n = 0; n < 200; ++n)
    {
        for (auto s : {Subsystem::MacBackoff, Subsystem::Traffic, Subsystem::Scenario, Subsystem::Routing})
        {
            ids.insert(nodeStreamId(n, s));
        }
    }
    for (auto s : {Subsystem::MacBackoff, Subsystem::Traffic, Subsystem::Scenario, Subsystem::Routing})
    {
        ids.insert(globalStreamId(s));
    }
    CHECK(ids.size() == 200 * 4 + 4);
}

TEST_CASE("mix64 is a bijection on a sample")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i)
    {
        seen.insert(mix64(i));
    }
    CHECK(seen.size() == 10000);
}

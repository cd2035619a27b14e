#include "wsnsim/ondemand.hpp"
#include "wsnsim/routing.hpp"

#include "doctest.h"
#include "fake_host.hpp"

using namespace wsnsim;
using wsnsim::test::FakeHost;

TEST_CASE("variant names map to a base protocol and hello interval")
{
    const auto mod = parseVariant("AOMDVMOD");
    REQUIRE(mod);
    CHECK(mod->base == Protocol::Aomdv);
    CHECK(mod->helloIntervalS == 5.0);
    CHECK(mod->label == "AOMDVMOD");
    CHECK(parseVariant("AODV")->helloIntervalS == 1.0);
    CHECK(parseVariant("AODVMOD")->label == "AODVMOD");
    CHECK(parseVariant("DSDV")->base == Protocol::Dsdv);
    CHECK_FALSE(parseVariant("DSR"));
    CHECK_FALSE(parseVariant("aodv"));
}

TEST_CASE("makeVariant labels and warnings")
{
    CHECK(makeVariant(Protocol::Aodv, 5.0).label == "AODVMOD");
    CHECK(makeVariant(Protocol::Aodv, 2.0).label == "AODV[hello=2]");
    CHECK(makeVariant(Protocol::Dsdv, 5.0).warnings.size() == 1);
    CHECK(makeVariant(Protocol::Dsdv, 1.0).warnings.empty());
    CHECK_THROWS_AS(makeVariant(Protocol::Aodv, 0.0), ContractViolation);
    CHECK_THROWS_AS(makeVariant(Protocol::Aomdv, -1.0), ContractViolation);
}

TEST_CASE("every protocol name builds an agent")
{
    FakeHost host(0);
    ProtocolParams params;
    for (const std::string& name : protocolNames())
    {
        const auto v = parseVariant(name);
        REQUIRE(v);
        CHECK(v->create(host, params) != nullptr);
    }
}

TEST_CASE("pending buffer drops the oldest and expires by age")
{
    PendingBuffer buf(2, 30.0);
    DataPacket a = test::packet(0, 5, 1);
    DataPacket b = test::packet(0, 6, 2);
    DataPacket c = test::packet(0, 5, 3);
    CHECK_FALSE(buf.push(a, SimTime(0.0)));
    CHECK_FALSE(buf.push(b, SimTime(10.0)));
    const auto evicted = buf.push(c, SimTime(20.0));
    REQUIRE(evicted);
    CHECK(evicted->uid == 1);
    CHECK(buf.hasPendingFor(5));
    CHECK(buf.expire(SimTime(39.0)).empty());
    const auto old = buf.expire(SimTime(40.0));
    REQUIRE(old.size() == 1);
    CHECK(old[0].uid == 2);
    const auto taken = buf.take(5);
    REQUIRE(taken.size() == 1);
    CHECK(taken[0].uid == 3);
    CHECK(buf.size() == 0);
}

TEST_CASE("route discovery retries with a doubling wait, then gives up")
{
    FakeHost host(0);
    std::vector<double> sent;
    int gaveUp = 0;
    RouteDiscovery d(host, 2, 2.8,
                     RouteDiscovery::Hooks{[&](NodeId) { sent.push_back(host.now().seconds()); },
                                           [](NodeId) { return false; }, [&](NodeId) { ++gaveUp; }});
    d.request(9);
    d.request(9);
    host.sim.runUntil(SimTime(100.0));
    REQUIRE(sent.size() == 3);
    CHECK(sent[0] == doctest::Approx(0.0));
    CHECK(sent[1] == doctest::Approx(2.8));
    CHECK(sent[2] == doctest::Approx(8.4));
    CHECK(gaveUp == 1);
    CHECK_FALSE(d.inProgress(9));
}

TEST_CASE("a resolved discovery sends nothing more")
{
    FakeHost host(0);
    int sent = 0;
    RouteDiscovery d(host, 2, 2.8,
                     RouteDiscovery::Hooks{[&](NodeId) { ++sent; }, [](NodeId) { return false; }, [](NodeId) {}});
    d.request(4);
    host.sim.runUntil(SimTime(1.0));
    d.resolved(4);
    host.sim.runUntil(SimTime(100.0));
    CHECK(sent == 1);
}

TEST_CASE("neighbor monitor hellos and liveness")
{
    FakeHost host(0);
    NeighborMonitor mon(host, 1.0, 2, 0.0);
    std::vector<NodeId> lost;
    mon.start([] { return Hello{0, 0}; }, [&](NodeId n) { lost.push_back(n); });
    mon.heard(3);
    host.sim.runUntil(SimTime(1.5));
    CHECK(mon.isNeighbor(3));
    host.sim.runUntil(SimTime(10.5));
    CHECK(lost == std::vector<NodeId>{3});
    CHECK_FALSE(mon.isNeighbor(3));
    // one hello per interval after a random first phase
    CHECK(mon.hellosSent() >= 10);
    CHECK(mon.hellosSent() <= 11);
    CHECK(mon.timeoutS() == 2.0);
}

#include "wsnsim/aomdv.hpp"
#include "wsnsim/network.hpp"

#include "doctest.h"
#include "fake_host.hpp"
#include "scripted.hpp"

using namespace wsnsim;
using wsnsim::test::FakeHost;

namespace {

const SimTime kFar(1000.0);

} // namespace

TEST_CASE("route update rule")
{
    AomdvEntry e;
    AgentStats st;
    CHECK(aomdvRouteUpdate(e, 5, 2, 1, 7, kFar, 3, &st) == RouteUpdateResult::Reset);
    CHECK(e.advertisedHopCount == 3);
    CHECK(e.paths.size() == 1);

    SUBCASE("a disjoint path of acceptable length is appended")
    {
        CHECK(aomdvRouteUpdate(e, 5, 1, 2, 8, kFar, 3, &st) == RouteUpdateResult::Appended);
        CHECK(e.paths.size() == 2);
        // advertised hop count stays frozen even though a shorter path arrived
        CHECK(e.advertisedHopCount == 3);
        CHECK(st.pathAppends == 1);
    }
    SUBCASE("a shared next hop or last hop is rejected")
    {
        CHECK(aomdvRouteUpdate(e, 5, 2, 1, 9, kFar, 3, &st) == RouteUpdateResult::Rejected);
        CHECK(aomdvRouteUpdate(e, 5, 2, 4, 7, kFar, 3, &st) == RouteUpdateResult::Rejected);
        CHECK(e.paths.size() == 1);
    }
    SUBCASE("a path longer than advertised is rejected")
    {
        CHECK(aomdvRouteUpdate(e, 5, 3, 2, 8, kFar, 3, &st) == RouteUpdateResult::Rejected);
    }
    SUBCASE("the same path refreshes its expiry")
    {
        AomdvEntry f;
        aomdvRouteUpdate(f, 5, 2, 1, 7, SimTime(10.0), 3);
        CHECK(aomdvRouteUpdate(f, 5, 2, 1, 7, SimTime(20.0), 3) == RouteUpdateResult::Refreshed);
        CHECK(f.paths[0].expiry == SimTime(20.0));
    }
    SUBCASE("an older seqno is rejected, a newer one resets")
    {
        CHECK(aomdvRouteUpdate(e, 4, 0, 2, 8, kFar, 3, &st) == RouteUpdateResult::Rejected);
        aomdvRouteUpdate(e, 5, 1, 2, 8, kFar, 3, &st);
        CHECK(aomdvRouteUpdate(e, 6, 4, 3, 9, kFar, 3, &st) == RouteUpdateResult::Reset);
        CHECK(e.paths.size() == 1);
        CHECK(e.advertisedHopCount == 5);
        CHECK(e.destSeqno == 6);
    }
    SUBCASE("at most maxPaths paths")
    {
        CHECK(aomdvRouteUpdate(e, 5, 2, 2, 8, kFar, 3, &st) == RouteUpdateResult::Appended);
        CHECK(aomdvRouteUpdate(e, 5, 2, 3, 9, kFar, 3, &st) == RouteUpdateResult::Appended);
        CHECK(aomdvRouteUpdate(e, 5, 2, 4, 10, kFar, 3, &st) == RouteUpdateResult::Rejected);
    }
    CHECK(st.disjointnessViolations == 0);
    CHECK(st.advertisedHopViolations == 0);
}

TEST_CASE("path selection drops expired paths and falls back in order")
{
    AomdvEntry e;
    aomdvRouteUpdate(e, 1, 1, 4, 4, SimTime(5.0), 3);
    aomdvRouteUpdate(e, 1, 1, 6, 6, SimTime(50.0), 3);
    CHECK(selectPath(e, SimTime(1.0)) == 4);
    CHECK(selectPath(e, SimTime(6.0)) == 6);
    CHECK(e.paths.size() == 1);
    CHECK(removePathsVia(e, 6));
    CHECK_FALSE(removePathsVia(e, 6));
    CHECK(selectPath(e, SimTime(6.0)) == kNoNode);
}

TEST_CASE("the destination answers distinct first hops up to maxReplies")
{
    FakeHost host(9);
    ProtocolParams p;
    p.routing.broadcastJitterS = 0.0;
    AomdvAgent d(host, p, 1.0);
    CHECK(d.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 2, 2}, 4) == AomdvAgent::RreqAction::Reply);
    d.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 2, 2}, 4);
    d.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 2, 3}, 5);
    d.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 2, 6}, 8);
    const auto reps = host.sent<Rrep>();
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].first == 4);
    CHECK(reps[1].first == 5);
    // both replies to one request carry the same fresh seqno
    CHECK(reps[0].second.destSeqno == 1);
    CHECK(reps[1].second.destSeqno == 1);
    const AomdvEntry* back = d.route(1);
    REQUIRE(back);
    CHECK(back->paths.size() == 3);
}

TEST_CASE("an intermediate rebroadcasts only the first copy")
{
    FakeHost host(3);
    ProtocolParams p;
    p.routing.broadcastJitterS = 0.0;
    AomdvAgent m(host, p, 1.0);
    CHECK(m.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 1, 2}, 2) == AomdvAgent::RreqAction::Rebroadcast);
    CHECK(m.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 1, 4}, 4) == AomdvAgent::RreqAction::Discard);
    const auto fwd = host.sent<Rreq>();
    REQUIRE(fwd.size() == 1);
    CHECK(fwd[0].second.hopCount == 2);
    CHECK(fwd[0].second.firstHop == 2);
    // both copies became reverse paths
    REQUIRE(m.route(1));
    CHECK(m.route(1)->paths.size() == 2);
    // a copy straight from the origin is longer than the advertised count here
    CHECK(m.processRreqCopy(Rreq{1, 1, 9, 1, 0, false, 3, 7}, 7) == AomdvAgent::RreqAction::Discard);
    CHECK(m.route(1)->paths.size() == 2);
}

TEST_CASE("a link failure with a backup keeps the route and sends no RERR")
{
    FakeHost host(1);
    ProtocolParams p;
    p.routing.broadcastJitterS = 0.0;
    AomdvAgent s(host, p, 1.0);
    s.onAppSend(test::packet(1, 9, 1));
    s.processRrep(Rrep{1, 9, 2, 1, 10.0, 4}, 4);
    s.processRrep(Rrep{1, 9, 2, 1, 10.0, 5}, 5);
    REQUIRE(s.route(9)->paths.size() == 2);
    host.control.clear();
    s.onLinkFailure(4);
    CHECK(s.route(9)->paths.size() == 1);
    CHECK(host.sent<Rerr>().empty());
    CHECK(s.onAppSend(test::packet(1, 9, 2)).nextHop == 5);
    CHECK(host.sent<Rreq>().empty());
}

TEST_CASE("scripted failover avoids a new discovery")
{
    const test::FailoverRun aomdv = test::runFailover(Protocol::Aomdv);
    REQUIRE(aomdv.routed);
    CHECK(aomdv.pathsBeforeKill == 2);
    CHECK(aomdv.rreqAfterKill == 0);
    const test::FailoverRun aodv = test::runFailover(Protocol::Aodv);
    REQUIRE(aodv.routed);
    CHECK(aodv.rreqAfterKill > 0);
    CHECK(aomdv.pdr >= aodv.pdr);
}

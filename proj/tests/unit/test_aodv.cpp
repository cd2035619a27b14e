#include "wsnsim/aodv.hpp"
#include "wsnsim/network.hpp"

#include "doctest.h"
#include "fake_host.hpp"

using namespace wsnsim;
using wsnsim::test::FakeHost;

namespace {

ProtocolParams
params()
{
    ProtocolParams p;
    p.routing.broadcastJitterS = 0.0;
    return p;
}

} // namespace

TEST_CASE("a source without a route buffers and floods a RREQ")
{
    FakeHost host(1);
    AodvAgent a(host, params(), 1.0);
    const ForwardAction act = a.onAppSend(test::packet(1, 9, 7));
    CHECK(act.kind == ForwardAction::Kind::QueuePendingRoute);
    const auto rreqs = host.sent<Rreq>();
    REQUIRE(rreqs.size() == 1);
    CHECK(rreqs[0].first == kBroadcast);
    CHECK(rreqs[0].second.origin == 1);
    CHECK(rreqs[0].second.dest == 9);
    CHECK_FALSE(rreqs[0].second.destSeqnoKnown);
    CHECK(a.pending().size() == 1);
    CHECK(host.stats().rreqOriginated == 1);

    // the reply installs the route and releases the buffer
    a.processRrep(Rrep{1, 9, 4, 1, 10.0, kNoNode}, 5);
    const AodvEntry* r = a.usableRoute(9);
    REQUIRE(r);
    CHECK(r->nextHop == 5);
    CHECK(r->hopCount == 2);
    CHECK(r->destSeqno == 4);
    REQUIRE(host.data.size() == 1);
    CHECK(host.data[0].first == 5);
    CHECK(host.data[0].second.uid == 7);
    CHECK(a.pending().size() == 0);
}

TEST_CASE("the destination replies once per request and raises its seqno")
{
    FakeHost host(9);
    AodvAgent d(host, params(), 1.0);
    const Rreq rq{1, 1, 9, 3, 6, true, 2, kNoNode};
    CHECK(d.processRreq(rq, 4) == AodvAgent::RreqAction::Reply);
    CHECK(d.processRreq(rq, 5) == AodvAgent::RreqAction::Discard);
    const auto reps = host.sent<Rrep>();
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].first == 4);
    CHECK(reps[0].second.destSeqno == 7);
    CHECK(reps[0].second.hopCount == 0);
    CHECK(d.ownSeqno() == 7);
    // reverse route toward the origin
    REQUIRE(d.usableRoute(1));
    CHECK(d.usableRoute(1)->nextHop == 4);
    CHECK(d.usableRoute(1)->hopCount == 3);
}

TEST_CASE("an intermediate replies only with a fresh enough route")
{
    FakeHost host(3);
    AodvAgent m(host, params(), 1.0);
    m.processRrep(Rrep{0, 9, 4, 2, 10.0, kNoNode}, 7); // origin 0 unknown: not forwarded
    REQUIRE(m.usableRoute(9));

    CHECK(m.processRreq(Rreq{1, 1, 9, 1, 5, true, 0, kNoNode}, 1) == AodvAgent::RreqAction::Rebroadcast);
    const auto fwd = host.sent<Rreq>();
    REQUIRE(fwd.size() == 1);
    CHECK(fwd[0].second.hopCount == 1);
    CHECK(fwd[0].second.destSeqno == 5);

    CHECK(m.processRreq(Rreq{1, 2, 9, 2, 4, true, 0, kNoNode}, 1) == AodvAgent::RreqAction::Reply);
    const auto reps = host.sent<Rrep>();
    REQUIRE(reps.size() == 1);
    CHECK(reps[0].first == 1);
    CHECK(reps[0].second.hopCount == 3);
    CHECK(reps[0].second.destSeqno == 4);
}

TEST_CASE("a link failure invalidates routes and warns precursors")
{
    FakeHost host(3);
    AodvAgent m(host, params(), 1.0);
    m.processRreq(Rreq{1, 1, 9, 1, 0, false, 0, kNoNode}, 1);
    m.processRrep(Rrep{1, 9, 4, 1, 10.0, kNoNode}, 7);
    REQUIRE(m.usableRoute(9));
    host.control.clear();
    m.onLinkFailure(7);
    CHECK_FALSE(m.usableRoute(9));
    CHECK(m.route(9)->destSeqno == 5);
    const auto errs = host.sent<Rerr>();
    REQUIRE(errs.size() == 1);
    REQUIRE(errs[0].second.unreachable.size() == 1);
    CHECK(errs[0].second.unreachable[0].dest == 9);
    CHECK(errs[0].second.unreachable[0].seqno == 5);
}

TEST_CASE("a stale or longer advertisement does not replace a route")
{
    FakeHost host(3);
    AodvAgent m(host, params(), 1.0);
    m.processRrep(Rrep{0, 9, 6, 2, 10.0, kNoNode}, 7);
    m.processRrep(Rrep{0, 9, 5, 0, 10.0, kNoNode}, 8);
    CHECK(m.usableRoute(9)->nextHop == 7);
    m.processRrep(Rrep{0, 9, 6, 4, 10.0, kNoNode}, 8);
    CHECK(m.usableRoute(9)->nextHop == 7);
    m.processRrep(Rrep{0, 9, 6, 0, 10.0, kNoNode}, 8);
    CHECK(m.usableRoute(9)->nextHop == 8);
    CHECK(m.usableRoute(9)->hopCount == 1);
}

TEST_CASE("partitioned source sends exactly one RREQ plus the retries")
{
    Scenario s;
    s.positions = {{0, 0}, {500, 0}};
    s.initialEnergyJ = {50000.0, 5000.0};
    NetworkParams np;
    np.variant = makeVariant(Protocol::Aodv, 1.0);
    np.simTimeS = 60.0;
    Network net(s, np, 99);
    net.runUntil(1.0);
    net.injectPacket(0, 1);
    const RunResult r = net.run();
    CHECK(r.controlCount(ControlKind::Rreq) == 3);
    CHECK(r.stats.rreqOriginated == 3);
    REQUIRE(r.packets.size() == 1);
    REQUIRE(r.packets[0].drop);
    CHECK((*r.packets[0].drop == DropReason::NoRoute));
}

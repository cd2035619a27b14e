#include "wsnsim/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace wsnsim {

EventHandle
EventQueue::push(SimTime time, NodeId target, std::function<void()> action)
{
    const std::uint64_t seq = m_nextSeq++;
    m_heap.push_back(Event{time, seq, target, std::move(action)});
    std::push_heap(m_heap.begin(), m_heap.end(), Later{});
    return EventHandle{seq};
}

Event
EventQueue::pop()
{
    std::pop_heap(m_heap.begin(), m_heap.end(), Later{});
    Event ev = std::move(m_heap.back());
    m_heap.pop_back();
    return ev;
}

EventHandle
Simulator::schedule(SimTime time, NodeId target, std::function<void()> action)
{
    if (time < m_now)
    {
        throw ContractViolation("event scheduled in the past: t=" + std::to_string(time.seconds()) +
                                " clock=" + std::to_string(m_now.seconds()));
    }
    return m_queue.push(time, target, std::move(action));
}

EventHandle
Simulator::scheduleIn(double delay, NodeId target, std::function<void()> action)
{
    if (delay < 0.0)
    {
        throw ContractViolation("negative scheduling delay");
    }
    return schedule(m_now + delay, target, std::move(action));
}

void
Simulator::cancel(EventHandle handle)
{
    m_cancelled.insert(handle.seq);
}

namespace {

void
fnvMix(std::uint64_t& h, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
    {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= 1099511628211ULL;
    }
}

} // namespace

std::uint64_t
Simulator::runUntil(SimTime tEnd)
{
    std::uint64_t processed = 0;
    while (!m_queue.empty() && m_queue.top().time <= tEnd)
    {
        Event ev = m_queue.pop();
        if (auto it = m_cancelled.find(ev.seq); it != m_cancelled.end())
        {
            m_cancelled.erase(it);
            continue;
        }
        m_now = ev.time;
        fnvMix(m_traceHash, std::bit_cast<std::uint64_t>(ev.time.seconds()));
        fnvMix(m_traceHash, ev.seq);
        fnvMix(m_traceHash, ev.target);
        ev.action();
        ++processed;
    }
    if (tEnd > m_now)
    {
        m_now = tEnd;
    }
    return processed;
}

std::uint64_t
mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t masterSeed, std::uint64_t streamId)
    : m_masterSeed(masterSeed),
      m_streamId(streamId),
      m_engine(mix64(mix64(masterSeed) ^ mix64(streamId + 0x632be59bd9b4e019ULL)))
{
}

double
RngStream::uniform(double lo, double hi)
{
    if (!(lo < hi))
    {
        throw ContractViolation("uniform requires lo < hi");
    }
    // 53 high bits -> [0, 1); independent of the standard library's distributions.
    const double u = static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
    const double v = lo + u * (hi - lo);
    return v < hi ? v : lo;
}

std::uint64_t
RngStream::uniformInt(std::uint64_t lo, std::uint64_t hi)
{
    if (hi < lo)
    {
        throw ContractViolation("uniformInt requires lo <= hi");
    }
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max())
    {
        return m_engine();
    }
    const std::uint64_t n = span + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do
    {
        r = m_engine();
    } while (r >= limit);
    return lo + r % n;
}

std::uint64_t
nodeStreamId(NodeId node, Subsystem subsystem)
{
    return (static_cast<std::uint64_t>(node) << 4) | static_cast<std::uint64_t>(subsystem);
}

std::uint64_t
globalStreamId(Subsystem subsystem)
{
    return (0xffffffffULL << 8) | static_cast<std::uint64_t>(subsystem);
}

} // namespace wsnsim

// Discrete-event kernel: simulation clock, event queue, seeded random streams.
#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace wsnsim {

using NodeId = std::uint32_t;

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();
inline constexpr NodeId kSystemTarget = std::numeric_limits<NodeId>::max() - 1;

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

/// Simulation time in seconds. Non-negative.
class SimTime
{
  public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(double seconds)
        : m_seconds(seconds)
    {
    }

    constexpr double seconds() const { return m_seconds; }

    constexpr SimTime operator+(double dt) const { return SimTime(m_seconds + dt); }
    constexpr double operator-(SimTime other) const { return m_seconds - other.m_seconds; }
    constexpr auto operator<=>(const SimTime&) const = default;

  private:
    double m_seconds = 0.0;
};

struct EventHandle
{
    std::uint64_t seq = 0;
};

struct Event
{
    SimTime time;
    std::uint64_t seq = 0;
    NodeId target = kSystemTarget;
    std::function<void()> action;
};

/// Min-queue over (time, seq). Equal times pop in insertion order.
class EventQueue
{
  public:
    EventHandle push(SimTime time, NodeId target, std::function<void()> action);
    bool empty() const { return m_heap.empty(); }
    std::size_t size() const { return m_heap.size(); }
    const Event& top() const { return m_heap.front(); }
    Event pop();

  private:
    struct Later
    {
        bool operator()(const Event& a, const Event& b) const
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };

    std::vector<Event> m_heap;
    std::uint64_t m_nextSeq = 0;
};

/// Owns the clock and the event queue; processes events in (time, seq) order.
class Simulator
{
  public:
    SimTime now() const { return m_now; }

    /// Throws ContractViolation when time is earlier than the clock.
    EventHandle schedule(SimTime time, NodeId target, std::function<void()> action);
    EventHandle scheduleIn(double delay, NodeId target, std::function<void()> action);
    void cancel(EventHandle handle);

    /// Processes every event with time <= tEnd. Returns the number processed.
    std::uint64_t runUntil(SimTime tEnd);

    std::size_t pending() const { return m_queue.size(); }

    /// FNV-1a over (time, seq, target) of every processed event.
    std::uint64_t traceHash() const { return m_traceHash; }

  private:
    EventQueue m_queue;
    std::unordered_set<std::uint64_t> m_cancelled;
    SimTime m_now;
    std::uint64_t m_traceHash = 14695981039346656037ULL;
};

/// Independent, reproducible random stream keyed by (master seed, stream id).
class RngStream
{
  public:
    RngStream(std::uint64_t masterSeed, std::uint64_t streamId);

    /// Uniform real in [lo, hi). Throws ContractViolation when lo >= hi.
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi] (inclusive).
    std::uint64_t uniformInt(std::uint64_t lo, std::uint64_t hi);

    std::uint64_t masterSeed() const { return m_masterSeed; }
    std::uint64_t streamId() const { return m_streamId; }

  private:
    std::uint64_t m_masterSeed;
    std::uint64_t m_streamId;
    std::mt19937_64 m_engine;
};

/// Bijective 64-bit finalizer (splitmix64).
std::uint64_t mix64(std::uint64_t x);

/// Stream id helpers: one stream per (node, subsystem), plus global streams.
enum class Subsystem : std::uint64_t
{
    MacBackoff = 0,
    Traffic = 1,
    Scenario = 2,
    Routing = 3,
};

std::uint64_t nodeStreamId(NodeId node, Subsystem subsystem);
std::uint64_t globalStreamId(Subsystem subsystem);

} // namespace wsnsim

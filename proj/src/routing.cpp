#include "wsnsim/routing.hpp"

#include "wsnsim/aodv.hpp"
#include "wsnsim/aomdv.hpp"
#include "wsnsim/dsdv.hpp"

#include <cmath>
#include <sstream>

namespace wsnsim {

namespace {

bool
sameInterval(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

} // namespace

ProtocolVariant
makeVariant(Protocol base, double helloIntervalS, const AodvParams& aodv)
{
    if (!(helloIntervalS > 0.0))
    {
        throw ContractViolation("hello interval must be positive");
    }
    ProtocolVariant v;
    v.base = base;
    v.helloIntervalS = helloIntervalS;
    if (base == Protocol::Dsdv)
    {
        v.label = "DSDV";
        if (!sameInterval(helloIntervalS, aodv.helloIntervalS))
        {
            v.warnings.push_back("DSDV ignores the hello interval; it uses its periodic update instead");
        }
        return v;
    }
    const std::string name = base == Protocol::Aodv ? "AODV" : "AOMDV";
    if (sameInterval(helloIntervalS, aodv.helloIntervalS))
    {
        v.label = name;
    }
    else if (sameInterval(helloIntervalS, aodv.modHelloIntervalS))
    {
        v.label = name + "MOD";
    }
    else
    {
        std::ostringstream os;
        os << name << "[hello=" << helloIntervalS << "]";
        v.label = os.str();
    }
    return v;
}

std::optional<ProtocolVariant>
parseVariant(std::string_view name, const AodvParams& aodv)
{
    if (name == "DSDV")
    {
        return makeVariant(Protocol::Dsdv, aodv.helloIntervalS, aodv);
    }
    if (name == "AODV")
    {
        return makeVariant(Protocol::Aodv, aodv.helloIntervalS, aodv);
    }
    if (name == "AODVMOD")
    {
        return makeVariant(Protocol::Aodv, aodv.modHelloIntervalS, aodv);
    }
    if (name == "AOMDV")
    {
        return makeVariant(Protocol::Aomdv, aodv.helloIntervalS, aodv);
    }
    if (name == "AOMDVMOD")
    {
        return makeVariant(Protocol::Aomdv, aodv.modHelloIntervalS, aodv);
    }
    return std::nullopt;
}

std::unique_ptr<RoutingAgent>
ProtocolVariant::create(AgentHost& host, const ProtocolParams& params) const
{
    switch (base)
    {
    case Protocol::Dsdv:
        return std::make_unique<DsdvAgent>(host, params);
    case Protocol::Aodv:
        return std::make_unique<AodvAgent>(host, params, helloIntervalS);
    case Protocol::Aomdv:
        return std::make_unique<AomdvAgent>(host, params, helloIntervalS);
    }
    return nullptr;
}

PendingBuffer::PendingBuffer(std::size_t capacity, double timeoutS)
    : m_capacity(capacity),
      m_timeoutS(timeoutS)
{
}

std::optional<DataPacket>
PendingBuffer::push(DataPacket packet, SimTime now)
{
    std::optional<DataPacket> evicted;
    if (m_capacity == 0)
    {
        return packet;
    }
    if (m_items.size() >= m_capacity)
    {
        evicted = std::move(m_items.front().packet);
        m_items.pop_front();
    }
    m_items.push_back(Item{std::move(packet), now});
    return evicted;
}

std::vector<DataPacket>
PendingBuffer::take(NodeId dest)
{
    std::vector<DataPacket> out;
    std::deque<Item> keep;
    for (Item& item : m_items)
    {
        if (item.packet.dst == dest)
        {
            out.push_back(std::move(item.packet));
        }
        else
        {
            keep.push_back(std::move(item));
        }
    }
    m_items = std::move(keep);
    return out;
}

std::vector<DataPacket>
PendingBuffer::expire(SimTime now)
{
    std::vector<DataPacket> out;
    while (!m_items.empty() && now - m_items.front().queuedAt >= m_timeoutS)
    {
        out.push_back(std::move(m_items.front().packet));
        m_items.pop_front();
    }
    return out;
}

bool
PendingBuffer::hasPendingFor(NodeId dest) const
{
    for (const Item& item : m_items)
    {
        if (item.packet.dst == dest)
        {
            return true;
        }
    }
    return false;
}

} // namespace wsnsim

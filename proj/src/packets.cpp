#include "wsnsim/packets.hpp"

namespace wsnsim {

ControlKind
kindOf(const ControlPacket& packet)
{
    return static_cast<ControlKind>(packet.index());
}

std::string_view
toString(ControlKind kind)
{
    switch (kind)
    {
    case ControlKind::Rreq:
        return "RREQ";
    case ControlKind::Rrep:
        return "RREP";
    case ControlKind::Rerr:
        return "RERR";
    case ControlKind::Hello:
        return "HELLO";
    case ControlKind::DsdvUpdate:
        return "DSDV_UPDATE";
    }
    return "?";
}

int
ControlSizes::sizeOf(const ControlPacket& packet) const
{
    switch (kindOf(packet))
    {
    case ControlKind::Rreq:
        return rreqBytes;
    case ControlKind::Rrep:
        return rrepBytes;
    case ControlKind::Rerr:
        return rerrBytes;
    case ControlKind::Hello:
        return helloBytes;
    case ControlKind::DsdvUpdate:
        return dsdvHeaderBytes +
               dsdvEntryBytes * static_cast<int>(std::get<DsdvUpdate>(packet).entries.size());
    }
    return 0;
}

std::string_view
toString(DropReason reason)
{
    switch (reason)
    {
    case DropReason::QueueFull:
        return "QUEUE_FULL";
    case DropReason::CsmaFailure:
        return "CSMA_FAILURE";
    case DropReason::NoRoute:
        return "NO_ROUTE";
    case DropReason::Collision:
        return "COLLISION";
    case DropReason::OutOfRange:
        return "OUT_OF_RANGE";
    case DropReason::HopLimit:
        return "HOP_LIMIT";
    }
    return "?";
}

} // namespace wsnsim

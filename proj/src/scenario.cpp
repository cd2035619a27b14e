#include "wsnsim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace wsnsim {

namespace {

constexpr double kEarthRadiusM = 6371008.8;

double
radians(double deg)
{
    return deg * std::numbers::pi / 180.0;
}

/// Centroid of the polygon obtained by sorting the corners around their mean.
Position
polygonCentroid(std::array<Position, 4> pts)
{
    Position mean;
    for (const Position& p : pts)
    {
        mean.x += p.x / 4.0;
        mean.y += p.y / 4.0;
    }
    std::sort(pts.begin(), pts.end(), [mean](Position a, Position b) {
        return std::atan2(a.y - mean.y, a.x - mean.x) < std::atan2(b.y - mean.y, b.x - mean.x);
    });
    double area2 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        const Position a = pts[i];
        const Position b = pts[(i + 1) % pts.size()];
        const double c = a.x * b.y - b.x * a.y;
        area2 += c;
        cx += (a.x + b.x) * c;
        cy += (a.y + b.y) * c;
    }
    if (std::abs(area2) < 1e-12)
    {
        return mean;
    }
    return Position{cx / (3.0 * area2), cy / (3.0 * area2)};
}

} // namespace

double
parseAngle(std::string_view text)
{
    std::vector<double> parts;
    double sign = 1.0;
    bool hemisphere = false;
    std::size_t i = 0;
    while (i < text.size())
    {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isdigit(c) || c == '.')
        {
            std::size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.'))
            {
                ++j;
            }
            const std::string token(text.substr(i, j - i));
            std::size_t used = 0;
            double value = 0.0;
            try
            {
                value = std::stod(token, &used);
            }
            catch (const std::exception&)
            {
                throw ScenarioError("malformed angle: " + std::string(text));
            }
            if (used != token.size() || hemisphere)
            {
                throw ScenarioError("malformed angle: " + std::string(text));
            }
            parts.push_back(value);
            i = j;
            continue;
        }
        if (c == '-' && parts.empty())
        {
            sign = -sign;
        }
        else if (c == 'N' || c == 'E' || c == 'S' || c == 'W')
        {
            if (hemisphere || parts.empty())
            {
                throw ScenarioError("malformed angle: " + std::string(text));
            }
            hemisphere = true;
            if (c == 'S' || c == 'W')
            {
                sign = -sign;
            }
        }
        else if (std::isalpha(c))
        {
            throw ScenarioError("malformed angle: " + std::string(text));
        }
        ++i;
    }
    if (parts.empty() || parts.size() > 3)
    {
        throw ScenarioError("malformed angle: " + std::string(text));
    }
    if ((parts.size() > 1 && parts[1] >= 60.0) || (parts.size() > 2 && parts[2] >= 60.0))
    {
        throw ScenarioError("minutes and seconds must be below 60: " + std::string(text));
    }
    double deg = parts[0];
    if (parts.size() > 1)
    {
        deg += parts[1] / 60.0;
    }
    if (parts.size() > 2)
    {
        deg += parts[2] / 3600.0;
    }
    return sign * deg;
}

double
haversineM(GeoPoint a, GeoPoint b)
{
    const double dlat = radians(b.latDeg - a.latDeg);
    const double dlon = radians(b.lonDeg - a.lonDeg);
    const double h = std::pow(std::sin(dlat / 2.0), 2) +
                     std::cos(radians(a.latDeg)) * std::cos(radians(b.latDeg)) * std::pow(std::sin(dlon / 2.0), 2);
    return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

Position
projectEquirectangular(GeoPoint p, GeoPoint origin, double refLatDeg)
{
    return Position{kEarthRadiusM * radians(p.lonDeg - origin.lonDeg) * std::cos(radians(refLatDeg)),
                    kEarthRadiusM * radians(p.latDeg - origin.latDeg)};
}

FieldGeometry
boundingField(const std::array<Position, 4>& corners)
{
    double best = std::numeric_limits<double>::infinity();
    double bestW = 0.0;
    double bestH = 0.0;
    Position bestU;
    Position bestOrigin;
    double span = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
    {
        for (std::size_t j = i + 1; j < 4; ++j)
        {
            span = std::max(span, distance(corners[i], corners[j]));
        }
    }
    for (std::size_t i = 0; i < 4; ++i)
    {
        for (std::size_t j = i + 1; j < 4; ++j)
        {
            const double len = distance(corners[i], corners[j]);
            if (len <= 0.0)
            {
                continue;
            }
            const Position u{(corners[j].x - corners[i].x) / len, (corners[j].y - corners[i].y) / len};
            double minU = std::numeric_limits<double>::infinity();
            double maxU = -minU;
            double minV = minU;
            double maxV = -minU;
            for (const Position& p : corners)
            {
                const double pu = p.x * u.x + p.y * u.y;
                const double pv = -p.x * u.y + p.y * u.x;
                minU = std::min(minU, pu);
                maxU = std::max(maxU, pu);
                minV = std::min(minV, pv);
                maxV = std::max(maxV, pv);
            }
            const double area = (maxU - minU) * (maxV - minV);
            if (area < best - 1e-9)
            {
                best = area;
                bestW = maxU - minU;
                bestH = maxV - minV;
                bestU = u;
                bestOrigin = Position{minU, minV};
            }
        }
    }
    if (span <= 0.0 || !(best > 1e-9 * span * span))
    {
        throw ScenarioError("field corners are degenerate (collinear)");
    }
    const bool swap = bestH > bestW;
    FieldGeometry g;
    g.widthM = swap ? bestH : bestW;
    g.heightM = swap ? bestW : bestH;
    for (std::size_t k = 0; k < 4; ++k)
    {
        const Position p = corners[k];
        const double pu = p.x * bestU.x + p.y * bestU.y - bestOrigin.x;
        const double pv = -p.x * bestU.y + p.y * bestU.x - bestOrigin.y;
        g.corners[k] = swap ? Position{pv, pu} : Position{pu, pv};
    }
    g.centroid = polygonCentroid(g.corners);
    return g;
}

FieldGeometry
projectField(const std::array<GeoPoint, 4>& corners)
{
    GeoPoint origin;
    for (const GeoPoint& c : corners)
    {
        origin.latDeg += c.latDeg / 4.0;
        origin.lonDeg += c.lonDeg / 4.0;
    }
    std::array<Position, 4> local;
    for (std::size_t k = 0; k < 4; ++k)
    {
        local[k] = projectEquirectangular(corners[k], origin, origin.latDeg);
    }
    return boundingField(local);
}

std::array<std::pair<std::string, std::string>, 4>
defaultFieldCornerStrings()
{
    return {{
        {"19°29'48.16\"S", "40°45'32.54\"W"},
        {"19°29'46.86\"S", "40°45'31.95\"W"},
        {"19°29'48.34\"S", "40°45'25.16\"W"},
        {"19°29'49.62\"S", "40°45'25.75\"W"},
    }};
}

std::array<GeoPoint, 4>
defaultFieldCorners()
{
    std::array<GeoPoint, 4> out;
    const auto text = defaultFieldCornerStrings();
    for (std::size_t k = 0; k < 4; ++k)
    {
        out[k] = GeoPoint{parseAngle(text[k].first), parseAngle(text[k].second)};
    }
    return out;
}

ScenarioShape
defaultShape(int scenarioId)
{
    switch (scenarioId)
    {
    case 1:
        return ScenarioShape{40, 4, 6, 8};
    case 2:
        return ScenarioShape{55, 5, 7, 11};
    case 3:
        return ScenarioShape{70, 5, 10, 14};
    default:
        throw ContractViolation("scenario id must be 1, 2 or 3");
    }
}

std::vector<Position>
placeNodes(const FieldGeometry& field, int sensors, int rows, const PlacementParams& params)
{
    if (sensors < 1 || rows < 1 || rows > sensors)
    {
        throw ScenarioError("need 1 <= rows <= sensors");
    }
    const int cols = (sensors + rows - 1) / rows;
    const double pitchX = field.widthM / cols;
    const double pitchY = field.heightM / rows;

    std::vector<Position> out;
    out.reserve(static_cast<std::size_t>(sensors) + 1);
    out.push_back(field.centroid);
    for (int r = 0; r < rows; ++r)
    {
        const double stagger = (r % 2 == 0 ? -0.25 : 0.25) * pitchX;
        for (int c = 0; c < cols && static_cast<int>(out.size()) <= sensors; ++c)
        {
            Position p{(c + 0.5) * pitchX + stagger, (r + 0.5) * pitchY};
            if (params.layout == Layout::CropRows)
            {
                if (params.rowSpacingM <= 0.0 || params.plantSpacingM <= 0.0)
                {
                    throw ScenarioError("row and plant spacing must be positive");
                }
                const double cropRows = std::max(1.0, std::floor(field.heightM / params.rowSpacingM));
                const double k = std::clamp(std::floor(p.y / params.rowSpacingM), 0.0, cropRows - 1.0);
                p.y = (k + 0.5) * params.rowSpacingM;
                p.x = std::clamp(std::round(p.x / params.plantSpacingM) * params.plantSpacingM, 0.0, field.widthM);
            }
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Flow>
generateFlows(std::size_t nodeCount, int sources, int flows, const TrafficParams& params, RngStream& rng)
{
    const int sensors = static_cast<int>(nodeCount) - 1;
    if (sources < 1 || sources > sensors)
    {
        throw ScenarioError("source count must be between 1 and the sensor count");
    }
    if (flows < sources)
    {
        throw ScenarioError("flow count must be at least the source count");
    }
    if (params.policy == DestinationPolicy::Mixed && flows > sources && sensors < 2)
    {
        throw ScenarioError("mixed destinations need at least two sensors");
    }
    if (params.ratePps <= 0.0 || params.payloadBytes <= 0 || params.startMinS < 0.0 ||
        params.startMaxS < params.startMinS)
    {
        throw ScenarioError("invalid traffic parameters");
    }

    auto shuffled = [&rng](std::vector<NodeId> v) {
        for (std::size_t i = v.size(); i > 1; --i)
        {
            const auto j = static_cast<std::size_t>(rng.uniformInt(0, i - 1));
            std::swap(v[i - 1], v[j]);
        }
        return v;
    };

    std::vector<NodeId> all(static_cast<std::size_t>(sensors));
    std::iota(all.begin(), all.end(), NodeId{1});
    std::vector<NodeId> chosen = shuffled(all);
    chosen.resize(static_cast<std::size_t>(sources));

    std::vector<Flow> out;
    for (NodeId s : chosen)
    {
        out.push_back(Flow{0, s, 0, 0.0, params.ratePps, params.payloadBytes});
    }
    std::vector<NodeId> extraOwners;
    while (static_cast<int>(extraOwners.size()) < flows - sources)
    {
        for (NodeId s : shuffled(chosen))
        {
            if (static_cast<int>(extraOwners.size()) < flows - sources)
            {
                extraOwners.push_back(s);
            }
        }
    }
    for (NodeId s : extraOwners)
    {
        NodeId dst = 0;
        if (params.policy == DestinationPolicy::Mixed)
        {
            do
            {
                dst = static_cast<NodeId>(rng.uniformInt(1, sensors));
            } while (dst == s);
        }
        out.push_back(Flow{0, s, dst, 0.0, params.ratePps, params.payloadBytes});
    }
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i].id = static_cast<std::uint32_t>(i);
        out[i].startS = params.startMaxS > params.startMinS ? rng.uniform(params.startMinS, params.startMaxS)
                                                           : params.startMinS;
    }
    return out;
}

std::vector<double>
cbrSchedule(const Flow& flow, double tEnd)
{
    if (flow.ratePps <= 0.0)
    {
        throw ContractViolation("CBR rate must be positive");
    }
    std::vector<double> times;
    const double interval = 1.0 / flow.ratePps;
    for (std::uint64_t k = 0;; ++k)
    {
        const double t = flow.startS + static_cast<double>(k) * interval;
        if (t >= tEnd)
        {
            break;
        }
        times.push_back(t);
    }
    return times;
}

Scenario
buildScenario(int scenarioId, const ScenarioParams& params, const RadioParams& radio, RngStream& rng)
{
    if (scenarioId < 1 || scenarioId > 3)
    {
        throw ScenarioError("scenario id must be 1, 2 or 3");
    }
    const ScenarioShape& shape = params.shapes[static_cast<std::size_t>(scenarioId - 1)];
    Scenario s;
    s.id = scenarioId;
    s.field = projectField(params.corners);
    s.positions = placeNodes(s.field, shape.sensors, shape.rows, params.placement);
    s.initialEnergyJ.assign(s.positions.size(), params.sensorEnergyJ);
    s.initialEnergyJ[0] = params.sinkEnergyJ;

    const auto adj = connectivity(s.positions, radio);
    const auto hops = bfsHops(adj, 0);
    const auto unreachable = std::count(hops.begin(), hops.end(), -1);
    if (unreachable > 0)
    {
        std::ostringstream msg;
        msg << "scenario " << scenarioId << ": " << unreachable << " of " << s.positions.size()
            << " nodes unreachable from the sink at " << radio.rangeM << " m range";
        throw ScenarioError(msg.str());
    }
    s.flows = generateFlows(s.positions.size(), shape.sources, shape.flows, params.traffic, rng);
    return s;
}

} // namespace wsnsim

// Coffee-field geometry, sensor placement and CBR flows.
#pragma once

#include "wsnsim/kernel.hpp"
#include "wsnsim/radio.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsnsim {

/// Bad scenario input or an unusable layout.
class ScenarioError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct GeoPoint
{
    double latDeg = 0.0;
    double lonDeg = 0.0;
};

/// Decimal degrees, or degrees-minutes-seconds like 19°29'48.16"S.
/// Throws ScenarioError on malformed input.
double parseAngle(std::string_view text);

/// Great-circle distance in meters.
double haversineM(GeoPoint a, GeoPoint b);

/// Equirectangular projection about `refLatDeg`, meters east/north of `origin`.
Position projectEquirectangular(GeoPoint p, GeoPoint origin, double refLatDeg);

struct FieldGeometry
{
    /// Corners in the field frame: x along the long side, all inside [0,W]x[0,H].
    std::array<Position, 4> corners;
    double widthM = 0.0;
    double heightM = 0.0;
    /// Area centroid of the corner polygon, field frame.
    Position centroid;
};

/// Smallest-area bounding rectangle of four planar corners, any order.
/// Throws ScenarioError for degenerate (collinear) corners.
FieldGeometry boundingField(const std::array<Position, 4>& corners);

/// Projects geodetic corners and fits the bounding rectangle.
FieldGeometry projectField(const std::array<GeoPoint, 4>& corners);

/// Corners A-D of the coffee field.
std::array<GeoPoint, 4> defaultFieldCorners();
std::array<std::pair<std::string, std::string>, 4> defaultFieldCornerStrings();

enum class Layout
{
    Grid,
    CropRows,
};

enum class DestinationPolicy
{
    Mixed,
    AllToSink,
};

struct ScenarioShape
{
    int sensors = 40;
    int rows = 4;
    int sources = 6;
    int flows = 8;
};

/// Built-in shapes for scenarios 1..3. Throws ContractViolation otherwise.
ScenarioShape defaultShape(int scenarioId);

struct PlacementParams
{
    Layout layout = Layout::Grid;
    /// Crop-row preset only.
    double rowSpacingM = 3.0;
    double plantSpacingM = 0.7;
};

/// Index 0 is the sink at the field centroid; sensors follow row by row.
std::vector<Position> placeNodes(const FieldGeometry& field, int sensors, int rows,
                                 const PlacementParams& params = {});

struct Flow
{
    std::uint32_t id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double startS = 0.0;
    double ratePps = 4.0;
    int payloadBytes = 512;
};

struct TrafficParams
{
    double ratePps = 4.0;
    int payloadBytes = 512;
    double startMinS = 5.0;
    double startMaxS = 15.0;
    DestinationPolicy policy = DestinationPolicy::Mixed;
};

/// Sources drawn without replacement from sensors 1..nodeCount-1. Each
/// source's first flow goes to the sink; extra flows go to distinct sources.
std::vector<Flow> generateFlows(std::size_t nodeCount, int sources, int flows,
                                const TrafficParams& params, RngStream& rng);

/// Send times start, start+1/rate, ... strictly before tEnd.
std::vector<double> cbrSchedule(const Flow& flow, double tEnd);

struct Scenario
{
    int id = 1;
    FieldGeometry field;
    std::vector<Position> positions;
    std::vector<double> initialEnergyJ;
    std::vector<Flow> flows;
};

struct ScenarioParams
{
    std::array<GeoPoint, 4> corners = defaultFieldCorners();
    PlacementParams placement;
    TrafficParams traffic;
    double sinkEnergyJ = 50000.0;
    double sensorEnergyJ = 5000.0;
    /// Overrides of the built-in shapes, indexed by scenario id - 1.
    std::array<ScenarioShape, 3> shapes{defaultShape(1), defaultShape(2), defaultShape(3)};
};

/// Builds a full scenario. Throws ScenarioError if the disk graph is not connected.
Scenario buildScenario(int scenarioId, const ScenarioParams& params, const RadioParams& radio,
                       RngStream& rng);

} // namespace wsnsim

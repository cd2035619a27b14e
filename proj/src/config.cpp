#include "wsnsim/config.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

namespace wsnsim {

using nlohmann::json;

namespace {

std::string
joinErrors(const std::vector<std::string>& errors)
{
    std::string out = "invalid configuration:";
    for (const std::string& e : errors)
    {
        out += "\n  " + e;
    }
    return out;
}

template <class T>
using Check = std::function<std::optional<std::string>(const T&)>;

template <class T>
Check<T>
positive()
{
    return [](const T& v) -> std::optional<std::string> {
        if (v > T{0})
        {
            return std::nullopt;
        }
        return "must be > 0";
    };
}

template <class T>
Check<T>
atLeast(T lo)
{
    return [lo](const T& v) -> std::optional<std::string> {
        if (v >= lo)
        {
            return std::nullopt;
        }
        std::ostringstream os;
        os << "must be >= " << lo;
        return os.str();
    };
}

Check<double>
openUnit()
{
    return [](const double& v) -> std::optional<std::string> {
        if (v > 0.0 && v < 1.0)
        {
            return std::nullopt;
        }
        return "must lie strictly between 0 and 1";
    };
}

/// Walks one JSON object, recording known keys so leftovers can be reported.
class Reader
{
  public:
    Reader(const json* obj, std::string path, std::vector<std::string>& errors)
        : m_obj(obj),
          m_path(std::move(path)),
          m_errors(errors)
    {
        if (m_obj != nullptr && !m_obj->is_object())
        {
            m_errors.push_back(where() + "expected an object");
            m_obj = nullptr;
        }
    }

    template <class T>
    void get(const char* key, T& out, Check<T> check = {})
    {
        m_known.emplace_back(key);
        const json* v = find(key);
        if (v == nullptr)
        {
            return;
        }
        T value{};
        if (!convert(*v, value))
        {
            m_errors.push_back(name(key) + ": expected " + typeName<T>());
            return;
        }
        if (check)
        {
            if (auto problem = check(value))
            {
                m_errors.push_back(name(key) + ": " + *problem);
                return;
            }
        }
        out = std::move(value);
    }

    const json* raw(const char* key)
    {
        m_known.emplace_back(key);
        return find(key);
    }

    Reader section(const char* key)
    {
        m_known.emplace_back(key);
        return Reader(find(key), name(key), m_errors);
    }

    void finish()
    {
        if (m_obj == nullptr)
        {
            return;
        }
        for (const auto& [key, value] : m_obj->items())
        {
            if (std::find(m_known.begin(), m_known.end(), key) == m_known.end())
            {
                std::string msg = "unknown key '" + name(key.c_str()) + "'";
                const std::string near = nearestKey(key, m_known);
                if (!near.empty())
                {
                    msg += "; did you mean '" + name(near.c_str()) + "'?";
                }
                m_errors.push_back(msg);
            }
        }
    }

    std::string name(const char* key) const { return m_path.empty() ? key : m_path + "." + key; }

  private:
    std::string where() const { return m_path.empty() ? "" : m_path + ": "; }

    const json* find(const char* key) const
    {
        if (m_obj == nullptr)
        {
            return nullptr;
        }
        const auto it = m_obj->find(key);
        return it == m_obj->end() ? nullptr : &*it;
    }

    template <class T>
    static std::string typeName()
    {
        if constexpr (std::is_same_v<T, bool>)
        {
            return "a boolean";
        }
        else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>)
        {
            return "a non-negative integer";
        }
        else if constexpr (std::is_integral_v<T>)
        {
            return "an integer";
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            return "a number";
        }
        else if constexpr (std::is_same_v<T, std::string>)
        {
            return "a string";
        }
        else
        {
            return "a list";
        }
    }

    template <class T>
    static bool convert(const json& v, T& out)
    {
        if constexpr (std::is_same_v<T, bool>)
        {
            if (!v.is_boolean())
            {
                return false;
            }
            out = v.get<bool>();
            return true;
        }
        else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>)
        {
            if (!v.is_number_unsigned())
            {
                return false;
            }
            const auto u = v.get<std::uint64_t>();
            if (u > std::numeric_limits<T>::max())
            {
                return false;
            }
            out = static_cast<T>(u);
            return true;
        }
        else if constexpr (std::is_integral_v<T>)
        {
            if (!v.is_number_integer())
            {
                return false;
            }
            if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
            {
                return false;
            }
            const auto s = v.get<std::int64_t>();
            if (s < std::numeric_limits<T>::min() || s > std::numeric_limits<T>::max())
            {
                return false;
            }
            out = static_cast<T>(s);
            return true;
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            if (!v.is_number())
            {
                return false;
            }
            out = v.get<T>();
            return true;
        }
        else if constexpr (std::is_same_v<T, std::string>)
        {
            if (!v.is_string())
            {
                return false;
            }
            out = v.get<std::string>();
            return true;
        }
        else
        {
            if (!v.is_array())
            {
                return false;
            }
            using E = typename T::value_type;
            T list;
            for (const json& e : v)
            {
                E item{};
                if (!convert(e, item))
                {
                    return false;
                }
                list.push_back(item);
            }
            out = std::move(list);
            return true;
        }
    }

    const json* m_obj;
    std::string m_path;
    std::vector<std::string>& m_errors;
    std::vector<std::string> m_known;
};

std::string
layoutName(Layout l)
{
    return l == Layout::Grid ? "grid" : "crop_rows";
}

std::string
policyName(DestinationPolicy p)
{
    return p == DestinationPolicy::Mixed ? "mixed" : "all_to_sink";
}

std::string
angleText(const json& v)
{
    if (v.is_string())
    {
        return v.get<std::string>();
    }
    return v.dump();
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(joinErrors(errors)),
      m_errors(std::move(errors))
{
}

std::size_t
editDistance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i)
    {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
        {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string
nearestKey(std::string_view key, const std::vector<std::string>& candidates)
{
    std::string best;
    std::size_t bestD = std::numeric_limits<std::size_t>::max();
    for (const std::string& c : candidates)
    {
        const std::size_t d = editDistance(key, c);
        if (d < bestD)
        {
            bestD = d;
            best = c;
        }
    }
    return best;
}

ExperimentConfig
configFromJson(const json& doc)
{
    ExperimentConfig c;
    std::vector<std::string> errors;
    if (doc.is_null())
    {
        return c;
    }
    Reader top(&doc, "", errors);

    std::vector<std::string> protocols = c.protocols;
    top.get<std::vector<std::string>>("protocols", protocols);
    top.get<std::vector<int>>("scenarios", c.scenarios);
    top.get<int>("n_runs", c.nRuns, atLeast(1));
    top.get<std::uint64_t>("master_seed", c.masterSeed);
    top.get<double>("sim_time_s", c.simTimeS, positive<double>());
    top.get<double>("confidence", c.confidence, openUnit());

    {
        Reader r = top.section("radio");
        RadioParams& p = c.radio;
        r.get<double>("range_m", p.rangeM, positive<double>());
        r.get<double>("bitrate_bps", p.bitrateBps, positive<double>());
        r.get<double>("tx_power_w", p.txPowerW, atLeast(0.0));
        r.get<double>("rx_power_w", p.rxPowerW, atLeast(0.0));
        r.get<double>("idle_power_w", p.idlePowerW, atLeast(0.0));
        r.get<double>("tx_antenna_height_m", p.txAntennaHeightM, positive<double>());
        r.get<double>("rx_antenna_height_m", p.rxAntennaHeightM, positive<double>());
        r.get<double>("tx_gain", p.txGain, positive<double>());
        r.get<double>("rx_gain", p.rxGain, positive<double>());
        r.get<double>("wavelength_m", p.wavelengthM, positive<double>());
        r.get<double>("radiated_power_w", p.radiatedPowerW, positive<double>());
        r.get<int>("frame_overhead_bytes", p.frameOverheadBytes, atLeast(0));
        r.finish();
    }
    {
        Reader r = top.section("mac");
        CsmaParams& p = c.csma;
        r.get<int>("min_be", p.minBe, atLeast(0));
        r.get<int>("max_be", p.maxBe, atLeast(0));
        r.get<int>("max_backoffs", p.maxBackoffs, atLeast(0));
        r.get<double>("unit_backoff_s", p.unitBackoffS, positive<double>());
        r.get<double>("turnaround_s", p.turnaroundS, atLeast(0.0));
        r.get<std::size_t>("queue_capacity", p.queueCapacity, positive<std::size_t>());
        r.get<bool>("report_delivery_loss", c.reportDeliveryLoss);
        r.finish();
        if (p.minBe > p.maxBe)
        {
            errors.push_back("mac.min_be: must not exceed mac.max_be");
        }
    }
    {
        Reader r = top.section("routing");
        RoutingParams& p = c.protocol.routing;
        r.get<std::uint32_t>("net_diameter", p.netDiameter, positive<std::uint32_t>());
        r.get<std::size_t>("buffer_capacity", p.bufferCapacity, positive<std::size_t>());
        r.get<double>("buffer_timeout_s", p.bufferTimeoutS, positive<double>());
        r.get<double>("broadcast_jitter_s", p.broadcastJitterS, atLeast(0.0));
        r.get<int>("hello_bytes", p.sizes.helloBytes, positive<int>());
        r.get<int>("rreq_bytes", p.sizes.rreqBytes, positive<int>());
        r.get<int>("rrep_bytes", p.sizes.rrepBytes, positive<int>());
        r.get<int>("rerr_bytes", p.sizes.rerrBytes, positive<int>());
        r.get<int>("dsdv_header_bytes", p.sizes.dsdvHeaderBytes, positive<int>());
        r.get<int>("dsdv_entry_bytes", p.sizes.dsdvEntryBytes, positive<int>());
        r.finish();
    }
    {
        Reader r = top.section("aodv");
        AodvParams& p = c.protocol.aodv;
        r.get<double>("hello_interval_s", p.helloIntervalS, positive<double>());
        r.get<double>("mod_hello_interval_s", p.modHelloIntervalS, positive<double>());
        r.get<int>("allowed_hello_loss", p.allowedHelloLoss, atLeast(1));
        r.get<double>("active_route_timeout_s", p.activeRouteTimeoutS, positive<double>());
        r.get<int>("rreq_retries", p.rreqRetries, atLeast(0));
        r.get<double>("node_traversal_time_s", p.nodeTraversalTimeS, positive<double>());
        r.get<double>("path_discovery_time_s", p.pathDiscoveryTimeS, positive<double>());
        r.finish();
    }
    {
        Reader r = top.section("aomdv");
        r.get<std::size_t>("max_paths", c.protocol.aomdv.maxPaths, positive<std::size_t>());
        r.get<std::size_t>("max_replies", c.protocol.aomdv.maxReplies, positive<std::size_t>());
        r.finish();
    }
    {
        Reader r = top.section("dsdv");
        DsdvParams& p = c.protocol.dsdv;
        r.get<double>("update_period_s", p.updatePeriodS, positive<double>());
        r.get<double>("triggered_min_interval_s", p.triggeredMinIntervalS, atLeast(0.0));
        r.get<double>("settling_weight", p.settlingWeight, [](const double& w) -> std::optional<std::string> {
            if (w >= 0.0 && w < 1.0)
            {
                return std::nullopt;
            }
            return "must lie in [0, 1)";
        });
        r.get<int>("missed_updates_allowed", p.missedUpdatesAllowed, atLeast(1));
        r.finish();
    }
    {
        Reader r = top.section("scenario");
        ScenarioParams& p = c.scenario;
        if (const json* corners = r.raw("corners"))
        {
            bool ok = corners->is_array() && corners->size() == 4;
            for (std::size_t k = 0; ok && k < 4; ++k)
            {
                const json& pair = (*corners)[k];
                ok = pair.is_array() && pair.size() == 2 && (pair[0].is_string() || pair[0].is_number()) &&
                     (pair[1].is_string() || pair[1].is_number());
                if (ok)
                {
                    c.cornerText[k] = {angleText(pair[0]), angleText(pair[1])};
                }
            }
            if (!ok)
            {
                errors.push_back("scenario.corners: expected 4 [latitude, longitude] pairs");
            }
        }
        std::string layout = layoutName(p.placement.layout);
        r.get<std::string>("layout", layout, [](const std::string& s) -> std::optional<std::string> {
            if (s == "grid" || s == "crop_rows")
            {
                return std::nullopt;
            }
            return "must be 'grid' or 'crop_rows'";
        });
        p.placement.layout = layout == "grid" ? Layout::Grid : Layout::CropRows;
        r.get<double>("row_spacing_m", p.placement.rowSpacingM, positive<double>());
        r.get<double>("plant_spacing_m", p.placement.plantSpacingM, positive<double>());
        r.get<double>("sink_energy_j", p.sinkEnergyJ, positive<double>());
        r.get<double>("sensor_energy_j", p.sensorEnergyJ, positive<double>());
        if (const json* shapes = r.raw("shapes"))
        {
            if (!shapes->is_array() || shapes->size() != 3)
            {
                errors.push_back("scenario.shapes: expected a list of 3 objects");
            }
            else
            {
                for (std::size_t k = 0; k < 3; ++k)
                {
                    Reader s(&(*shapes)[k], "scenario.shapes[" + std::to_string(k) + "]", errors);
                    ScenarioShape& sh = p.shapes[k];
                    s.get<int>("sensors", sh.sensors, atLeast(1));
                    s.get<int>("rows", sh.rows, atLeast(1));
                    s.get<int>("sources", sh.sources, atLeast(1));
                    s.get<int>("flows", sh.flows, atLeast(1));
                    s.finish();
                    if (sh.rows > sh.sensors || sh.sources > sh.sensors || sh.flows < sh.sources)
                    {
                        errors.push_back("scenario.shapes[" + std::to_string(k) +
                                         "]: need rows <= sensors, sources <= sensors, flows >= sources");
                    }
                }
            }
        }
        r.finish();
    }
    {
        Reader r = top.section("traffic");
        TrafficParams& p = c.scenario.traffic;
        r.get<double>("rate_pps", p.ratePps, positive<double>());
        r.get<int>("payload_bytes", p.payloadBytes, positive<int>());
        r.get<double>("start_min_s", p.startMinS, atLeast(0.0));
        r.get<double>("start_max_s", p.startMaxS, atLeast(0.0));
        std::string policy = policyName(p.policy);
        r.get<std::string>("destination_policy", policy, [](const std::string& s) -> std::optional<std::string> {
            if (s == "mixed" || s == "all_to_sink")
            {
                return std::nullopt;
            }
            return "must be 'mixed' or 'all_to_sink'";
        });
        p.policy = policy == "mixed" ? DestinationPolicy::Mixed : DestinationPolicy::AllToSink;
        r.finish();
        if (p.startMinS > p.startMaxS)
        {
            errors.push_back("traffic.start_min_s: must not exceed traffic.start_max_s");
        }
    }
    top.finish();

    c.protocols.clear();
    for (const std::string& name : protocols)
    {
        const auto& valid = protocolNames();
        if (std::find(valid.begin(), valid.end(), name) == valid.end())
        {
            errors.push_back("protocols: unknown protocol '" + name + "'; did you mean '" + nearestKey(name, valid) +
                             "'?");
        }
        else if (std::find(c.protocols.begin(), c.protocols.end(), name) != c.protocols.end())
        {
            errors.push_back("protocols: '" + name + "' listed twice");
        }
        else
        {
            c.protocols.push_back(name);
        }
    }
    if (protocols.empty())
    {
        errors.push_back("protocols: must not be empty");
    }
    std::set<int> seen;
    for (int s : c.scenarios)
    {
        if (s < 1 || s > 3)
        {
            errors.push_back("scenarios: " + std::to_string(s) + " is not one of 1, 2, 3");
        }
        else if (!seen.insert(s).second)
        {
            errors.push_back("scenarios: " + std::to_string(s) + " listed twice");
        }
    }
    if (c.scenarios.empty())
    {
        errors.push_back("scenarios: must not be empty");
    }
    for (std::size_t k = 0; k < 4; ++k)
    {
        try
        {
            c.scenario.corners[k] =
                GeoPoint{parseAngle(c.cornerText[k].first), parseAngle(c.cornerText[k].second)};
        }
        catch (const ScenarioError& e)
        {
            errors.push_back("scenario.corners[" + std::to_string(k) + "]: " + e.what());
        }
    }
    if (!errors.empty())
    {
        throw ConfigError(std::move(errors));
    }
    return c;
}

ExperimentConfig
parseConfig(std::string_view text)
{
    if (std::all_of(text.begin(), text.end(), [](char ch) { return std::isspace(static_cast<unsigned char>(ch)); }))
    {
        return ExperimentConfig{};
    }
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    return configFromJson(doc);
}

json
configToJson(const ExperimentConfig& c)
{
    json j;
    j["protocols"] = c.protocols;
    j["scenarios"] = c.scenarios;
    j["n_runs"] = c.nRuns;
    j["master_seed"] = c.masterSeed;
    j["sim_time_s"] = c.simTimeS;
    j["confidence"] = c.confidence;

    const RadioParams& r = c.radio;
    j["radio"] = {
        {"range_m", r.rangeM},
        {"bitrate_bps", r.bitrateBps},
        {"tx_power_w", r.txPowerW},
        {"rx_power_w", r.rxPowerW},
        {"idle_power_w", r.idlePowerW},
        {"tx_antenna_height_m", r.txAntennaHeightM},
        {"rx_antenna_height_m", r.rxAntennaHeightM},
        {"tx_gain", r.txGain},
        {"rx_gain", r.rxGain},
        {"wavelength_m", r.wavelengthM},
        {"radiated_power_w", r.radiatedPowerW},
        {"frame_overhead_bytes", r.frameOverheadBytes},
    };
    const CsmaParams& m = c.csma;
    j["mac"] = {
        {"min_be", m.minBe},
        {"max_be", m.maxBe},
        {"max_backoffs", m.maxBackoffs},
        {"unit_backoff_s", m.unitBackoffS},
        {"turnaround_s", m.turnaroundS},
        {"queue_capacity", m.queueCapacity},
        {"report_delivery_loss", c.reportDeliveryLoss},
    };
    const RoutingParams& rt = c.protocol.routing;
    j["routing"] = {
        {"net_diameter", rt.netDiameter},
        {"buffer_capacity", rt.bufferCapacity},
        {"buffer_timeout_s", rt.bufferTimeoutS},
        {"broadcast_jitter_s", rt.broadcastJitterS},
        {"hello_bytes", rt.sizes.helloBytes},
        {"rreq_bytes", rt.sizes.rreqBytes},
        {"rrep_bytes", rt.sizes.rrepBytes},
        {"rerr_bytes", rt.sizes.rerrBytes},
        {"dsdv_header_bytes", rt.sizes.dsdvHeaderBytes},
        {"dsdv_entry_bytes", rt.sizes.dsdvEntryBytes},
    };
    const AodvParams& a = c.protocol.aodv;
    j["aodv"] = {
        {"hello_interval_s", a.helloIntervalS},
        {"mod_hello_interval_s", a.modHelloIntervalS},
        {"allowed_hello_loss", a.allowedHelloLoss},
        {"active_route_timeout_s", a.activeRouteTimeoutS},
        {"rreq_retries", a.rreqRetries},
        {"node_traversal_time_s", a.nodeTraversalTimeS},
        {"path_discovery_time_s", a.pathDiscoveryTimeS},
    };
    j["aomdv"] = {
        {"max_paths", c.protocol.aomdv.maxPaths},
        {"max_replies", c.protocol.aomdv.maxReplies},
    };
    const DsdvParams& d = c.protocol.dsdv;
    j["dsdv"] = {
        {"update_period_s", d.updatePeriodS},
        {"triggered_min_interval_s", d.triggeredMinIntervalS},
        {"settling_weight", d.settlingWeight},
        {"missed_updates_allowed", d.missedUpdatesAllowed},
    };
    const ScenarioParams& s = c.scenario;
    json corners = json::array();
    for (const auto& [lat, lon] : c.cornerText)
    {
        corners.push_back({lat, lon});
    }
    json shapes = json::array();
    for (const ScenarioShape& sh : s.shapes)
    {
        shapes.push_back({{"sensors", sh.sensors}, {"rows", sh.rows}, {"sources", sh.sources}, {"flows", sh.flows}});
    }
    j["scenario"] = {
        {"corners", corners},
        {"layout", layoutName(s.placement.layout)},
        {"row_spacing_m", s.placement.rowSpacingM},
        {"plant_spacing_m", s.placement.plantSpacingM},
        {"sink_energy_j", s.sinkEnergyJ},
        {"sensor_energy_j", s.sensorEnergyJ},
        {"shapes", shapes},
    };
    const TrafficParams& t = s.traffic;
    j["traffic"] = {
        {"rate_pps", t.ratePps},
        {"payload_bytes", t.payloadBytes},
        {"start_min_s", t.startMinS},
        {"start_max_s", t.startMaxS},
        {"destination_policy", policyName(t.policy)},
    };
    return j;
}

} // namespace wsnsim

#include "wsnsim/config.hpp"

#include "doctest.h"

using namespace wsnsim;
using nlohmann::json;

namespace {

std::vector<std::string>
errorsOf(const std::string& text)
{
    try
    {
        parseConfig(text);
    }
    catch (const ConfigError& e)
    {
        return e.errors();
    }
    return {};
}

bool
mentions(const std::vector<std::string>& errors, const std::string& needle)
{
    for (const std::string& e : errors)
    {
        if (e.find(needle) != std::string::npos)
        {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_CASE("empty input gives the defaults")
{
    const ExperimentConfig c = parseConfig("");
    CHECK(c.protocols == protocolNames());
    CHECK(c.scenarios == std::vector<int>{1, 2, 3});
    CHECK(c.nRuns == 30);
    CHECK(c.simTimeS == 180.0);
    CHECK(c.radio.rangeM == 60.0);
    CHECK(c.protocol.aodv.helloIntervalS == 1.0);
    CHECK(c.protocol.aodv.modHelloIntervalS == 5.0);
    CHECK(c.scenario.sinkEnergyJ == 50000.0);
    CHECK(configToJson(parseConfig("  \n")) == configToJson(c));
    CHECK(configToJson(parseConfig("{}")) == configToJson(c));
}

TEST_CASE("edit distance and nearest key")
{
    CHECK(editDistance("kitten", "sitting") == 3);
    CHECK(editDistance("", "abc") == 3);
    CHECK(editDistance("same", "same") == 0);
    CHECK(nearestKey("protocls", {"scenarios", "protocols", "n_runs"}) == "protocols");
    CHECK(nearestKey("x", {}).empty());
}

TEST_CASE("a misspelt key names the nearest valid key")
{
    const auto errs = errorsOf(R"({"protocls": ["AODV"]})");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].find("unknown key 'protocls'") != std::string::npos);
    CHECK(errs[0].find("did you mean 'protocols'") != std::string::npos);
    CHECK(mentions(errorsOf(R"({"aodv": {"helo_interval_s": 2}})"), "aodv.hello_interval_s"));
}

TEST_CASE("range errors are reported together")
{
    const auto errs = errorsOf(R"({"aodv": {"hello_interval_s": -1}, "n_runs": 0, "protocols": ["AODX"]})");
    CHECK(errs.size() == 3);
    CHECK(mentions(errs, "aodv.hello_interval_s"));
    CHECK(mentions(errs, "n_runs"));
    CHECK(mentions(errs, "did you mean 'AODV'"));
}

TEST_CASE("type errors and malformed JSON")
{
    CHECK(mentions(errorsOf(R"({"n_runs": "ten"})"), "n_runs"));
    CHECK_FALSE(errorsOf("{").empty());
    CHECK_FALSE(errorsOf("[1, 2]").empty());
    CHECK(mentions(errorsOf(R"({"scenarios": [4]})"), "scenarios"));
    CHECK(mentions(errorsOf(R"({"traffic": {"destination_policy": "random"}})"), "destination_policy"));
    CHECK(mentions(errorsOf(R"({"scenario": {"corners": [["x", "y"], ["1", "2"], ["1", "2"], ["1", "2"]]}})"),
                   "corners"));
}

TEST_CASE("overrides land in the right fields")
{
    const ExperimentConfig c = parseConfig(R"({
        "protocols": ["DSDV", "AOMDVMOD"],
        "scenarios": [2],
        "n_runs": 3,
        "master_seed": 99,
        "aodv": {"mod_hello_interval_s": 4.0},
        "aomdv": {"max_paths": 2},
        "dsdv": {"update_period_s": 10},
        "traffic": {"destination_policy": "all_to_sink", "rate_pps": 2}
    })");
    CHECK(c.protocols == std::vector<std::string>{"DSDV", "AOMDVMOD"});
    CHECK(c.scenarios == std::vector<int>{2});
    CHECK(c.nRuns == 3);
    CHECK(c.masterSeed == 99);
    CHECK(c.protocol.aodv.modHelloIntervalS == 4.0);
    CHECK(c.protocol.aomdv.maxPaths == 2);
    CHECK(c.protocol.dsdv.updatePeriodS == 10.0);
    CHECK(c.scenario.traffic.policy == DestinationPolicy::AllToSink);
    CHECK(c.scenario.traffic.ratePps == 2.0);
}

TEST_CASE("configuration round trip")
{
    ExperimentConfig c = parseConfig(R"({"n_runs": 7, "radio": {"range_m": 55}, "mac": {"max_backoffs": 3}})");
    const json once = configToJson(c);
    const json twice = configToJson(configFromJson(once));
    CHECK(once == twice);
    CHECK(once.at("radio").at("range_m") == 55.0);
}

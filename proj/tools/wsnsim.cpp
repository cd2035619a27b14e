// Command-line experiment runner.

#include "wsnsim/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;

std::vector<std::string>
splitList(const std::vector<std::string>& items)
{
    std::vector<std::string> out;
    for (const std::string& item : items)
    {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ','))
        {
            if (!part.empty())
            {
                out.push_back(part);
            }
        }
    }
    return out;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Wireless sensor network routing simulator: runs a protocol x scenario x seed matrix"};
    std::string configPath;
    std::vector<std::string> protocols;
    std::vector<std::string> scenarios;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::optional<double> simTime;
    std::string outDir = "results";
    unsigned threads = 0;
    bool printConfig = false;

    app.add_option("--config", configPath, "JSON configuration, or a metadata.json from an earlier run");
    app.add_option("--protocol", protocols, "Protocol(s): DSDV, AODV, AODVMOD, AOMDV, AOMDVMOD (comma separated or repeated)");
    app.add_option("--scenario", scenarios, "Scenario id(s) 1-3 (comma separated or repeated)");
    app.add_option("--runs", runs, "Replications per protocol and scenario");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--sim-time", simTime, "Simulated seconds per run");
    app.add_option("--out", outDir, "Output directory")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = automatic)");
    app.add_flag("--print-config", printConfig, "Print the effective configuration and exit");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    wsnsim::ExperimentConfig config;
    try
    {
        nlohmann::json doc = nlohmann::json::object();
        if (!configPath.empty())
        {
            std::ifstream in(configPath);
            if (!in)
            {
                throw wsnsim::ConfigError({"cannot open " + configPath});
            }
            std::stringstream text;
            text << in.rdbuf();
            const std::string body = text.str();
            if (body.find_first_not_of(" \t\r\n") != std::string::npos)
            {
                try
                {
                    doc = nlohmann::json::parse(body);
                }
                catch (const nlohmann::json::parse_error& e)
                {
                    throw wsnsim::ConfigError({configPath + ": malformed JSON: " + e.what()});
                }
            }
            if (doc.is_object() && doc.contains("config") && doc.contains("runs"))
            {
                doc = doc.at("config");
            }
        }
        if (!doc.is_object())
        {
            throw wsnsim::ConfigError({"configuration must be a JSON object"});
        }
        if (!protocols.empty())
        {
            doc["protocols"] = splitList(protocols);
        }
        if (!scenarios.empty())
        {
            nlohmann::json ids = nlohmann::json::array();
            for (const std::string& s : splitList(scenarios))
            {
                try
                {
                    std::size_t used = 0;
                    const int v = std::stoi(s, &used);
                    if (used != s.size())
                    {
                        throw std::invalid_argument(s);
                    }
                    ids.push_back(v);
                }
                catch (const std::exception&)
                {
                    throw wsnsim::ConfigError({"--scenario: '" + s + "' is not an integer"});
                }
            }
            doc["scenarios"] = ids;
        }
        if (runs)
        {
            doc["n_runs"] = *runs;
        }
        if (seed)
        {
            doc["master_seed"] = *seed;
        }
        if (simTime)
        {
            doc["sim_time_s"] = *simTime;
        }
        config = wsnsim::configFromJson(doc);
    }
    catch (const wsnsim::ConfigError& e)
    {
        std::cerr << e.what() << '\n';
        return kExitConfig;
    }

    if (printConfig)
    {
        std::cout << wsnsim::configToJson(config).dump(2) << '\n';
        return 0;
    }

    try
    {
        const auto reports = wsnsim::runMatrix(config, threads);
        wsnsim::writeArtifacts(outDir, config, reports);
        std::cout << wsnsim::summaryText(config, reports);
        std::cout << "wrote " << reports.size() << " runs to " << outDir << '\n';
    }
    catch (const wsnsim::ScenarioError& e)
    {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception& e)
    {
        std::cerr << "run failed: " << e.what() << '\n';
        return kExitRun;
    }
    return 0;
}

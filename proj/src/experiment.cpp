#include "wsnsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace wsnsim {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::string
num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string
optNum(const std::optional<double>& v)
{
    return v ? num(*v) : std::string();
}

struct CellKey
{
    std::string protocol;
    int scenario;
    int run;
};

std::vector<CellKey>
cells(const ExperimentConfig& config)
{
    std::vector<CellKey> out;
    for (const std::string& p : config.protocols)
    {
        for (int s : config.scenarios)
        {
            for (int r = 0; r < config.nRuns; ++r)
            {
                out.push_back(CellKey{p, s, r});
            }
        }
    }
    return out;
}

void
writeFile(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out)
    {
        throw RunFailure("cannot write " + path.string());
    }
}

} // namespace

int
protocolIndex(const std::string& name)
{
    const auto& names = protocolNames();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
    {
        throw ContractViolation("unknown protocol " + name);
    }
    return static_cast<int>(it - names.begin());
}

std::uint64_t
deriveRunSeed(std::uint64_t master, int protocolIdx, int scenario, int runIndex)
{
    if (protocolIdx < 0 || protocolIdx >= 8 || scenario < 0 || scenario >= 32 || runIndex < 0)
    {
        throw ContractViolation("seed derivation input out of range");
    }
    const std::uint64_t k = (static_cast<std::uint64_t>(runIndex) << 8) |
                            (static_cast<std::uint64_t>(scenario) << 3) | static_cast<std::uint64_t>(protocolIdx);
    return mix64(master + kGolden * k);
}

std::uint64_t
deriveWorkloadSeed(std::uint64_t master, int scenario, int runIndex)
{
    const std::uint64_t k = (static_cast<std::uint64_t>(runIndex) << 8) | static_cast<std::uint64_t>(scenario);
    return mix64(mix64(master) ^ (kGolden * (k + 1)));
}

Scenario
makeScenario(const ExperimentConfig& config, int scenario, int runIndex)
{
    RngStream rng(deriveWorkloadSeed(config.masterSeed, scenario, runIndex), globalStreamId(Subsystem::Scenario));
    return buildScenario(scenario, config.scenario, config.radio, rng);
}

NetworkParams
makeNetworkParams(const ExperimentConfig& config, const std::string& protocol)
{
    const auto variant = parseVariant(protocol, config.protocol.aodv);
    if (!variant)
    {
        throw ContractViolation("unknown protocol " + protocol);
    }
    NetworkParams p;
    p.variant = *variant;
    p.protocol = config.protocol;
    p.radio = config.radio;
    p.csma = config.csma;
    p.reportDeliveryLoss = config.reportDeliveryLoss;
    p.simTimeS = config.simTimeS;
    return p;
}

CellResult
runCell(const ExperimentConfig& config, const std::string& protocol, int scenario, int runIndex)
{
    const Scenario sc = makeScenario(config, scenario, runIndex);
    const std::uint64_t seed = deriveRunSeed(config.masterSeed, protocolIndex(protocol), scenario, runIndex);
    Network net(sc, makeNetworkParams(config, protocol), seed);
    CellResult out;
    out.result = net.run();
    std::vector<std::uint32_t> flowIds;
    for (const Flow& f : sc.flows)
    {
        flowIds.push_back(f.id);
    }
    out.report = makeReport(protocol, scenario, seed, out.result, flowIds);
    return out;
}

std::vector<RunReport>
runMatrix(const ExperimentConfig& config, unsigned threads)
{
    const std::vector<CellKey> todo = cells(config);
    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
        if (const char* cap = std::getenv("WSNSIM_THREADS"))
        {
            const long v = std::strtol(cap, nullptr, 10);
            if (v > 0)
            {
                threads = std::min(threads, static_cast<unsigned>(v));
            }
        }
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, todo.size())));

    std::vector<RunReport> reports(todo.size());
    std::vector<std::string> failures(todo.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < todo.size(); i = next++)
        {
            const CellKey& c = todo[i];
            try
            {
                reports[i] = runCell(config, c.protocol, c.scenario, c.run).report;
            }
            catch (const std::exception& e)
            {
                failures[i] = c.protocol + " scenario " + std::to_string(c.scenario) + " run " +
                              std::to_string(c.run) + ": " + e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
    {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool)
    {
        t.join();
    }
    std::string msg;
    for (const std::string& f : failures)
    {
        if (!f.empty())
        {
            msg += (msg.empty() ? "" : "\n") + f;
        }
    }
    if (!msg.empty())
    {
        throw RunFailure(msg);
    }
    return reports;
}

std::string
runsCsvHeader()
{
    return "protocol,scenario,seed,pdr,delay_ms,total_energy_kj,avg_energy_kj,avg_energy_sensors_kj,offered,"
           "delivered,drop_queue,drop_csma,drop_noroute,drop_collision,hello_tx,rreq_tx,rrep_tx,rerr_tx,"
           "dsdv_update_tx";
}

std::string
runsCsv(const std::vector<RunReport>& reports)
{
    std::ostringstream out;
    out << runsCsvHeader() << '\n';
    for (const RunReport& r : reports)
    {
        out << r.protocol << ',' << r.scenario << ',' << r.seed << ',' << num(r.pdr) << ',' << optNum(r.delayMs)
            << ',' << num(r.energy.totalKj) << ',' << num(r.energy.averageKj) << ','
            << num(r.energy.averageSensorsKj) << ',' << r.offered << ',' << r.delivered << ',' << r.dropQueue
            << ',' << r.dropCsma << ',' << r.dropNoRoute << ',' << r.dropCollision << ',' << r.helloTx << ','
            << r.rreqTx << ',' << r.rrepTx << ',' << r.rerrTx << ',' << r.dsdvUpdateTx << '\n';
    }
    return out.str();
}

std::vector<CellAggregate>
aggregateReports(const ExperimentConfig& config, const std::vector<RunReport>& reports)
{
    std::vector<CellAggregate> out;
    for (const std::string& p : config.protocols)
    {
        for (int s : config.scenarios)
        {
            std::vector<double> pdr, delay, total, avg, sensors;
            std::size_t excluded = 0;
            for (const RunReport& r : reports)
            {
                if (r.protocol != p || r.scenario != s)
                {
                    continue;
                }
                pdr.push_back(r.pdr);
                if (r.delayMs)
                {
                    delay.push_back(*r.delayMs);
                }
                else
                {
                    excluded += 1;
                }
                total.push_back(r.energy.totalKj);
                avg.push_back(r.energy.averageKj);
                sensors.push_back(r.energy.averageSensorsKj);
            }
            if (pdr.empty())
            {
                continue;
            }
            CellAggregate c;
            c.protocol = p;
            c.scenario = s;
            c.pdr = aggregate(pdr, config.confidence);
            if (!delay.empty())
            {
                c.delayMs = aggregate(delay, config.confidence);
            }
            c.delayExcluded = excluded;
            c.totalEnergyKj = aggregate(total, config.confidence);
            c.avgEnergyKj = aggregate(avg, config.confidence);
            c.avgEnergySensorsKj = aggregate(sensors, config.confidence);
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::string
aggregatesCsv(const std::vector<CellAggregate>& cells)
{
    std::ostringstream out;
    out << "protocol,scenario,metric,n,mean,stddev,ci_halfwidth,excluded\n";
    auto row = [&out](const CellAggregate& c, const char* metric, const std::optional<Aggregate>& a,
                      std::size_t excluded) {
        out << c.protocol << ',' << c.scenario << ',' << metric << ',';
        if (a)
        {
            out << a->n << ',' << num(a->mean) << ',' << optNum(a->stddev) << ',' << optNum(a->halfwidth);
        }
        else
        {
            out << "0,,,";
        }
        out << ',' << excluded << '\n';
    };
    for (const CellAggregate& c : cells)
    {
        row(c, "pdr", c.pdr, 0);
        row(c, "delay_ms", c.delayMs, c.delayExcluded);
        row(c, "total_energy_kj", c.totalEnergyKj, 0);
        row(c, "avg_energy_kj", c.avgEnergyKj, 0);
        row(c, "avg_energy_sensors_kj", c.avgEnergySensorsKj, 0);
    }
    return out.str();
}

ScoreTable
scoreReports(const ExperimentConfig& config, const std::vector<RunReport>& reports)
{
    MetricColumn pdr{"pdr", true, {}};
    MetricColumn delay{"delay", false, {}};
    MetricColumn energy{"energy", false, {}};
    for (const std::string& p : config.protocols)
    {
        double sp = 0.0, sd = 0.0, se = 0.0;
        std::size_t n = 0, nd = 0;
        for (const RunReport& r : reports)
        {
            if (r.protocol != p)
            {
                continue;
            }
            sp += r.pdr;
            se += r.energy.averageKj;
            n += 1;
            if (r.delayMs)
            {
                sd += *r.delayMs;
                nd += 1;
            }
        }
        const double dn = static_cast<double>(std::max<std::size_t>(n, 1));
        pdr.means.push_back(sp / dn);
        energy.means.push_back(se / dn);
        delay.means.push_back(nd == 0 ? std::numeric_limits<double>::infinity() : sd / static_cast<double>(nd));
    }
    return scoreSummary(config.protocols, {pdr, delay, energy});
}

std::string
summaryText(const ExperimentConfig& config, const std::vector<RunReport>& reports)
{
    std::ostringstream out;
    out << "Scores per metric (" << config.protocols.size() << " = best, 1 = worst), means over scenarios";
    for (int s : config.scenarios)
    {
        out << ' ' << s;
    }
    out << " and " << config.nRuns << " runs each\n\n";
    out << formatScoreTable(scoreReports(config, reports));
    out << "\nMeans per scenario\n";
    for (const CellAggregate& c : aggregateReports(config, reports))
    {
        out << "  " << c.protocol << " s" << c.scenario << ": pdr " << num(c.pdr.mean) << ", delay_ms "
            << (c.delayMs ? num(c.delayMs->mean) : std::string("n/a")) << ", avg_energy_kj "
            << num(c.avgEnergyKj.mean) << '\n';
    }
    return out.str();
}

nlohmann::json
metadata(const ExperimentConfig& config)
{
    nlohmann::json runs = nlohmann::json::array();
    for (const CellKey& c : cells(config))
    {
        runs.push_back({{"protocol", c.protocol},
                        {"scenario", c.scenario},
                        {"run_index", c.run},
                        {"seed", deriveRunSeed(config.masterSeed, protocolIndex(c.protocol), c.scenario, c.run)},
                        {"workload_seed", deriveWorkloadSeed(config.masterSeed, c.scenario, c.run)}});
    }
    return {{"generator", "wsnsim"}, {"config", configToJson(config)}, {"runs", runs}};
}

ExperimentConfig
configFromDocument(const nlohmann::json& doc)
{
    if (doc.is_object() && doc.contains("config") && doc.contains("runs"))
    {
        return configFromJson(doc.at("config"));
    }
    return configFromJson(doc);
}

void
writeArtifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
               const std::vector<RunReport>& reports)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        throw RunFailure("cannot create " + dir.string() + ": " + ec.message());
    }
    writeFile(dir / "runs.csv", runsCsv(reports));
    writeFile(dir / "aggregates.csv", aggregatesCsv(aggregateReports(config, reports)));
    writeFile(dir / "summary.txt", summaryText(config, reports));
    writeFile(dir / "metadata.json", metadata(config).dump(2) + "\n");
}

} // namespace wsnsim

// Protocol x scenario x replication matrix and its output files.
#pragma once

#include "wsnsim/config.hpp"
#include "wsnsim/metrics.hpp"
#include "wsnsim/network.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsnsim {

/// A replication that could not complete.
class RunFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Position of a protocol name in protocolNames(); used in seed derivation.
int protocolIndex(const std::string& name);

/// Per-run seed; injective over (protocol, scenario, run) for a fixed master seed.
std::uint64_t deriveRunSeed(std::uint64_t master, int protocolIdx, int scenario, int runIndex);

/// Seed for placement and flows; shared by every protocol in the same (scenario, run).
std::uint64_t deriveWorkloadSeed(std::uint64_t master, int scenario, int runIndex);

/// Scenario exactly as a given replication sees it.
Scenario makeScenario(const ExperimentConfig& config, int scenario, int runIndex);

NetworkParams makeNetworkParams(const ExperimentConfig& config, const std::string& protocol);

struct CellResult
{
    RunReport report;
    RunResult result;
};

/// Runs one replication.
CellResult runCell(const ExperimentConfig& config, const std::string& protocol, int scenario, int runIndex);

/// Every (protocol, scenario, run) in config order. `threads` = 0 picks the
/// hardware concurrency, capped by WSNSIM_THREADS when set. Throws RunFailure.
std::vector<RunReport> runMatrix(const ExperimentConfig& config, unsigned threads = 0);

std::string runsCsvHeader();
std::string runsCsv(const std::vector<RunReport>& reports);

struct CellAggregate
{
    std::string protocol;
    int scenario = 0;
    Aggregate pdr;
    /// Runs without any delivery are left out of the delay aggregate.
    std::optional<Aggregate> delayMs;
    std::size_t delayExcluded = 0;
    Aggregate totalEnergyKj;
    Aggregate avgEnergyKj;
    Aggregate avgEnergySensorsKj;
};

std::vector<CellAggregate> aggregateReports(const ExperimentConfig& config, const std::vector<RunReport>& reports);
std::string aggregatesCsv(const std::vector<CellAggregate>& cells);

/// Ranks the protocols on mean PDR, delay and average energy over all runs.
ScoreTable scoreReports(const ExperimentConfig& config, const std::vector<RunReport>& reports);
std::string summaryText(const ExperimentConfig& config, const std::vector<RunReport>& reports);

/// The effective configuration plus the seed of every run.
nlohmann::json metadata(const ExperimentConfig& config);

/// Accepts a configuration document or a metadata document written by writeArtifacts.
ExperimentConfig configFromDocument(const nlohmann::json& doc);

/// Writes runs.csv, aggregates.csv, summary.txt and metadata.json.
void writeArtifacts(const std::filesystem::path& dir, const ExperimentConfig& config,
                    const std::vector<RunReport>& reports);

} // namespace wsnsim

// Experiment configuration: JSON parsing with strict key checking, defaults,
// and serialization of the full effective configuration.
#pragma once

#include "wsnsim/mac.hpp"
#include "wsnsim/radio.hpp"
#include "wsnsim/routing.hpp"
#include "wsnsim/scenario.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wsnsim {

/// Every problem found in a configuration, reported together.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return m_errors; }

  private:
    std::vector<std::string> m_errors;
};

struct ExperimentConfig
{
    std::vector<std::string> protocols = protocolNames();
    std::vector<int> scenarios{1, 2, 3};
    int nRuns = 30;
    std::uint64_t masterSeed = 1;
    double simTimeS = 180.0;
    double confidence = 0.95;

    RadioParams radio;
    CsmaParams csma;
    bool reportDeliveryLoss = true;
    ProtocolParams protocol;
    ScenarioParams scenario;
    /// Corner coordinates as given (DMS or decimal text), latitude then longitude.
    std::array<std::pair<std::string, std::string>, 4> cornerText = defaultFieldCornerStrings();
};

/// Levenshtein edit distance.
std::size_t editDistance(std::string_view a, std::string_view b);

/// Closest candidate by edit distance; empty when there are no candidates.
std::string nearestKey(std::string_view key, const std::vector<std::string>& candidates);

/// Validates a parsed JSON document. Throws ConfigError listing every problem.
ExperimentConfig configFromJson(const nlohmann::json& doc);

/// Parses JSON text (empty or whitespace-only text gives the defaults).
ExperimentConfig parseConfig(std::string_view text);

/// Full effective configuration; configFromJson(configToJson(c)) reproduces c.
nlohmann::json configToJson(const ExperimentConfig& config);

} // namespace wsnsim

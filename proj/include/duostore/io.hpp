#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "duostore/core.hpp"
#include "duostore/duo.hpp"
#include "duostore/verify.hpp"

namespace duostore {

/// Malformed or inconsistent input file.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contents of the JSON config file. Prices come from a CSV unless the
/// config carries them inline under "prices".
struct RunConfig {
  StorageUnit units[2];
  double lambda = 0.0;
  std::array<double, 2> initial_levels{};
  std::array<double, 2> final_levels{};
  std::optional<ToleranceSet> tolerances;
  double oracle_budget = kDefaultOracleBudget;
  std::uint64_t seed = 0;
  std::vector<double> prices;  // inline prices, may be empty
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

/// Assembles the instance; missing tolerances get the defaults.
ProblemInstance build_instance(const RunConfig& config,
                               std::vector<double> prices);

std::vector<double> parse_prices_csv(const std::string& text);
std::vector<double> load_prices(const std::filesystem::path& path);
std::string prices_to_csv(const std::vector<double>& prices);

/// One row per t: t,x1,x2,S1,S2,mu1,mu2,kappa2.
struct StrategyTable {
  Strategy strategy;
  MultiplierPath multipliers;
};

std::string strategy_to_csv(const Strategy& strategy,
                            const MultiplierPath& multipliers);
/// Rebuilds levels from the printed S columns (t = 0 from the instance's
/// initial levels) and checks that the row count equals `horizon`.
StrategyTable parse_strategy_csv(const std::string& text, int horizon,
                                 std::array<double, 2> initial_levels);

std::string horizons_to_json(const SolveResult& result);
std::string certificate_to_json(const CertificateReport& report);
std::string gap_to_json(const GapReport& report);

/// Four stacked panels over t: prices, S1, S2 and the forecast horizon.
std::string render_plot_svg(const std::vector<double>& prices,
                            const SolveResult& result);

/// Self-contained instance (config with inline prices) plus both
/// strategies, for reproducing a failed comparison.
std::string counterexample_bundle(const ProblemInstance& instance,
                                  const Strategy& algorithm,
                                  const Strategy& reference,
                                  const std::string& reason);

struct PriceGenerator {
  int horizon = 744;
  double base = 40.0;
  double amplitude = 10.0;
  double weekend_dip = -5.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 42;
};

/// Daily cycle peaking mid-afternoon, an additive weekend offset and
/// Gaussian noise, clamped to at least 1.
std::vector<double> generate_prices(const PriceGenerator& gen);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace duostore

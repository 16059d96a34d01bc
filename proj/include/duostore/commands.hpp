#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "duostore/io.hpp"

namespace duostore {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // certificate or assertion failed
inline constexpr int kExitInput = 2;   // unreadable or invalid input
inline constexpr int kExitSolver = 3;  // solver hard error

struct CommandOptions {
  std::filesystem::path prices;
  std::filesystem::path config;
  std::filesystem::path out;
  std::filesystem::path strategy;  // verify: defaults to <out>/strategy.csv
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
  double perturb = 0.2;
  PriceGenerator generator;
};

/// Config plus prices, units ordered so that unit 1 has the larger E/P
/// ratio. Every command works in this frame.
struct LoadedRun {
  RunConfig config;
  ProblemInstance instance;
  bool swapped = false;
};

LoadedRun load_run(const CommandOptions& options);

int cmd_solve(const CommandOptions& options, std::ostream& log);
int cmd_verify(const CommandOptions& options, std::ostream& log);
int cmd_oracle(const CommandOptions& options, std::ostream& log);
int cmd_horizon_test(const CommandOptions& options, std::ostream& log);
int cmd_gen_prices(const CommandOptions& options, std::ostream& log);

/// Prices after `after` scaled by 1 + f or 1 - f with a seeded random sign.
std::vector<double> perturb_tail(const std::vector<double>& prices, int after,
                                 double fraction, std::uint64_t seed);

struct HorizonTestReport {
  int tau1 = 0;
  int forecast = 0;
  double max_deviation = 0.0;
  bool pass = false;
};

/// Solves, perturbs every price after the first forecast horizon, solves
/// again and compares both units' levels up to the first decision horizon.
HorizonTestReport horizon_test(const ProblemInstance& instance, double fraction,
                               std::uint64_t seed);

}  // namespace duostore

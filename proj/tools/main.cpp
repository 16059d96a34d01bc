#include <iostream>

#include "CLI11.hpp"
#include "duostore/commands.hpp"

int main(int argc, char** argv) {
  using namespace duostore;
  CLI::App app{"Joint arbitrage schedules for two storage units"};
  app.require_subcommand(1);

  CommandOptions o;
  std::uint64_t seed = 0;
  double delta = 0.0;

  const auto inputs = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run config")->required();
    sub->add_option("--prices", o.prices, "CSV with columns t,price");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve and write reports");
  inputs(solve);
  solve->add_option("--out", o.out, "output directory");

  CLI::App* verify = app.add_subcommand("verify", "certify a strategy.csv");
  inputs(verify);
  verify->add_option("--out", o.out, "directory holding strategy.csv");
  verify->add_option("--strategy", o.strategy, "strategy file");

  CLI::App* oracle = app.add_subcommand("oracle", "compare with the grid DP");
  inputs(oracle);
  oracle->add_option("--out", o.out, "output directory");
  CLI::Option* delta_opt =
      oracle->add_option("--delta", delta, "grid step (energy), default E_j/100");

  CLI::App* horizon =
      app.add_subcommand("horizon-test", "perturb prices beyond the forecast horizon");
  inputs(horizon);
  CLI::Option* seed_h = horizon->add_option("--seed", seed, "perturbation seed");
  horizon->add_option("--perturb", o.perturb, "relative perturbation")
      ->check(CLI::Range(0.0, 0.99));

  CLI::App* gen = app.add_subcommand("gen-prices", "synthetic daily-cycle prices");
  gen->add_option("--out", o.out, "output directory (stdout when omitted)");
  CLI::Option* seed_g = gen->add_option("--seed", seed, "noise seed");
  gen->add_option("--hours", o.generator.horizon, "number of hourly periods");
  gen->add_option("--base", o.generator.base, "mean price");
  gen->add_option("--amplitude", o.generator.amplitude, "daily swing");
  gen->add_option("--weekend-dip", o.generator.weekend_dip,
                  "offset added on Saturdays and Sundays");
  gen->add_option("--noise-sd", o.generator.noise_sd, "Gaussian noise sd");

  CLI11_PARSE(app, argc, argv);
  if (*seed_h || *seed_g) o.seed = seed;
  if (*delta_opt) o.delta = delta;

  if (*solve) return cmd_solve(o, std::cerr);
  if (*verify) return cmd_verify(o, std::cerr);
  if (*oracle) return cmd_oracle(o, std::cout);
  if (*horizon) return cmd_horizon_test(o, std::cerr);
  return cmd_gen_prices(o, std::cout);
}

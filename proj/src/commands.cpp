#include "duostore/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace duostore {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

void print_certificate(const CertificateReport& c, std::ostream& log) {
  log << "certificate: " << (c.overall ? "pass" : "FAIL")
      << " (feasible=" << c.feasible << " max_violation=" << c.max_violation
      << ", minimization=" << c.minimization_ok << " gap=" << c.worst_gap
      << " kkt=" << c.worst_kkt << ", slackness=" << c.slackness_ok << " "
      << c.slackness_violations.size() << " violations)\n";
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    log << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BudgetExceeded& e) {
    log << "refused: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    log << "invalid: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    log << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace

LoadedRun load_run(const CommandOptions& o) {
  if (o.config.empty()) throw InputError("--config is required");
  LoadedRun run;
  run.config = load_config(o.config);
  std::vector<double> prices;
  if (!o.prices.empty()) {
    prices = load_prices(o.prices);
  } else if (!run.config.prices.empty()) {
    prices = run.config.prices;
  } else {
    throw InputError("--prices is required (config has no inline prices)");
  }
  if (o.seed) run.config.seed = *o.seed;
  ProblemInstance inst = build_instance(run.config, std::move(prices));
  const ValidationReport report = validate_instance(inst);
  if (!report.ok()) throw InputError("validation failed: " + report.summary());
  const UnitOrder order = order_units(inst.unit1, inst.unit2);
  run.swapped = order.swapped;
  run.instance = order.swapped ? swap_units(inst) : inst;
  return run;
}

int cmd_solve(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const LoadedRun run = load_run(o);
    if (run.swapped) log << "units exchanged: unit 1 has the larger E/P ratio\n";
    const SolveResult r = solve(run.instance);
    const fs::path out = o.out.empty() ? fs::path(".") : o.out;
    ensure_dir(out);
    write_text(out / "strategy.csv", strategy_to_csv(r.strategy, r.multipliers));
    write_text(out / "horizons.json", horizons_to_json(r));
    write_text(out / "certificate.json", certificate_to_json(r.certificate));
    write_text(out / "plot.svg",
               render_plot_svg(run.instance.costs.prices(), r));
    log << "cost " << r.cost << " over " << run.instance.horizon()
        << " periods, " << r.horizons.stages.size() << " stages\n";
    for (const Diagnostic& d : r.diagnostics)
      log << to_string(d.kind) << ": " << d.detail << "\n";
    print_certificate(r.certificate, log);
    return r.certificate.overall ? kExitOk : kExitFailed;
  });
}

int cmd_verify(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const LoadedRun run = load_run(o);
    fs::path path = o.strategy;
    if (path.empty()) path = (o.out.empty() ? fs::path(".") : o.out) / "strategy.csv";
    const StrategyTable tab =
        parse_strategy_csv(read_text(path), run.instance.horizon(),
                           run.instance.initial_levels);
    const CertificateReport c = certify(tab.strategy, tab.multipliers,
                                        run.instance, run.instance.tolerances);
    print_certificate(c, log);
    return c.overall ? kExitOk : kExitFailed;
  });
}

int cmd_oracle(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const LoadedRun run = load_run(o);
    const ProblemInstance& inst = run.instance;
    const double d1 = o.delta ? *o.delta : inst.unit1.capacity / 100.0;
    const double d2 = o.delta ? *o.delta : inst.unit2.capacity / 100.0;
    const SolveResult r = solve(inst);
    const OracleResult dp = oracle_dp(inst, d1, d2, run.config.oracle_budget);
    const GapReport g = compare(r.cost, dp, inst);
    log << gap_to_json(g);
    if (!o.out.empty()) {
      ensure_dir(o.out);
      write_text(o.out / "gap.json", gap_to_json(g));
    }
    if (!g.ok()) {
      const fs::path dir = o.out.empty() ? fs::path(".") : o.out;
      ensure_dir(dir);
      write_text(dir / "counterexample.json",
                 counterexample_bundle(inst, r.strategy, dp.strategy,
                                       g.beats_grid ? "gap above bound"
                                                    : "grid strategy is cheaper"));
      log << "counterexample written to " << (dir / "counterexample.json") << "\n";
      return kExitFailed;
    }
    return kExitOk;
  });
}

std::vector<double> perturb_tail(const std::vector<double>& prices, int after,
                                 double fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> p = prices;
  for (std::size_t t = 1; t <= p.size(); ++t) {
    const bool up = coin(rng);
    if (static_cast<int>(t) > after) p[t - 1] *= up ? 1.0 + fraction : 1.0 - fraction;
  }
  return p;
}

HorizonTestReport horizon_test(const ProblemInstance& instance, double fraction,
                               std::uint64_t seed) {
  const SolveResult base = solve(instance);
  HorizonTestReport rep;
  const StageResult& first = base.horizons.stages.front();
  rep.tau1 = first.decision;
  rep.forecast = first.forecast;

  ProblemInstance perturbed = instance;
  perturbed.costs = instance.costs.with_prices(
      perturb_tail(instance.costs.prices(), rep.forecast, fraction, seed));
  const SolveResult other = solve(perturbed);
  for (int t = 0; t <= rep.tau1; ++t) {
    rep.max_deviation = std::max(
        {rep.max_deviation,
         std::abs(base.strategy.levels1[t] - other.strategy.levels1[t]),
         std::abs(base.strategy.levels2[t] - other.strategy.levels2[t])});
  }
  rep.pass = rep.max_deviation <= instance.tolerances.eps_S;
  return rep;
}

int cmd_horizon_test(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    const LoadedRun run = load_run(o);
    const HorizonTestReport rep =
        horizon_test(run.instance, o.perturb, run.config.seed);
    log << "tau1=" << rep.tau1 << " forecast=" << rep.forecast
        << " perturb=" << o.perturb << " max_deviation=" << rep.max_deviation
        << " -> " << (rep.pass ? "pass" : "FAIL") << "\n";
    return rep.pass ? kExitOk : kExitFailed;
  });
}

int cmd_gen_prices(const CommandOptions& o, std::ostream& log) {
  return guarded(log, [&] {
    PriceGenerator g = o.generator;
    if (o.seed) g.seed = *o.seed;
    if (g.horizon <= 0) throw InputError("--hours must be positive");
    if (g.noise_sd < 0.0) throw InputError("--noise-sd must be nonnegative");
    const std::string csv = prices_to_csv(generate_prices(g));
    if (o.out.empty()) {
      log << csv;
    } else {
      ensure_dir(o.out);
      write_text(o.out / "prices.csv", csv);
    }
    return kExitOk;
  });
}

}  // namespace duostore

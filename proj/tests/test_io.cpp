#include "doctest.h"
#include "duostore/commands.hpp"
#include "duostore/io.hpp"
#include "support.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace duostore;

TEST_CASE("price csv parsing") {
  CHECK(parse_prices_csv("t,price\n1,10\n2,20.5\n") == std::vector<double>{10, 20.5});
  CHECK(parse_prices_csv("1,3\n2,4\n") == std::vector<double>{3, 4});
  CHECK_THROWS_AS(parse_prices_csv("t,price\n1,10\n3,20\n"), InputError);
  CHECK_THROWS_AS(parse_prices_csv("t,price\n1,0\n"), InputError);
  CHECK_THROWS_AS(parse_prices_csv("t,price\n1,ten\n"), InputError);
  CHECK_THROWS_AS(parse_prices_csv(""), InputError);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({"units":[{"E":7000,"P":500},{"E":9000,"P":2000}],
    "lambda":5e-5,"initial_levels":[0,0],"final_levels":[0,100],
    "tolerances":{"eps_S":0.5},"oracle_budget":1e6,"seed":9})");
  CHECK(c.units[1].rate == 2000);
  CHECK(c.final_levels[1] == 100);
  CHECK(c.tolerances->eps_S == 0.5);
  CHECK(c.oracle_budget == 1e6);
  CHECK(c.seed == 9);
  const auto inst = build_instance(c, {40, 50});
  CHECK(inst.tolerances.eps_S == 0.5);
  CHECK(inst.tolerances.eps_x == doctest::Approx(1e-9 * 2500));
  CHECK_THROWS_AS(parse_config("{\"units\":[]}"), InputError);
  CHECK_THROWS_AS(parse_config("not json"), InputError);
}

TEST_CASE("config round trip") {
  RunConfig c;
  c.units[0] = {3, 1};
  c.units[1] = {2, 1.5};
  c.lambda = 0.01;
  c.initial_levels = {1, 2};
  c.final_levels = {0, 1};
  c.prices = {10, 20};
  const auto back = parse_config(config_to_json(c));
  CHECK(back.units[1].capacity == 2);
  CHECK(back.prices == c.prices);
  CHECK(back.initial_levels == c.initial_levels);
}

TEST_CASE("strategy csv round trip keeps the printed balance") {
  std::mt19937_64 rng(13);
  auto inst = support::random_instance(rng, 25);
  const auto r = solve(inst);
  const std::string csv = strategy_to_csv(r.strategy, r.multipliers);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,S1,S2,mu1,mu2,kappa2");
  double s1 = 0, s2 = 0;
  bool first = true;
  while (std::getline(in, line)) {
    double v[8];
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1],
                &v[2], &v[3], &v[4], &v[5], &v[6], &v[7]);
    if (!first) {
      CHECK(std::abs(s1 + v[1] - v[3]) <= 1e-8 * inst.unit1.capacity);
      CHECK(std::abs(s2 + v[2] - v[4]) <= 1e-8 * inst.unit2.capacity);
    }
    first = false;
    s1 = v[3];
    s2 = v[4];
  }
  const auto tab = parse_strategy_csv(csv, 25, inst.initial_levels);
  CHECK(certify(tab.strategy, tab.multipliers, inst, inst.tolerances).overall ==
        r.certificate.overall);
  CHECK_THROWS_AS(parse_strategy_csv(csv, 26, inst.initial_levels), InputError);
}

TEST_CASE("generated prices") {
  PriceGenerator flat{48, 40, 0, 0, 0, 1};
  for (double p : generate_prices(flat)) CHECK(p == 40);

  PriceGenerator g{24 * 5, 40, 10, 0, 0, 1};
  const auto p = generate_prices(g);
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  CHECK(*lo == doctest::Approx(30).epsilon(1e-9));
  CHECK(*hi == doctest::Approx(50).epsilon(1e-9));
  CHECK(p[13] == doctest::Approx(50));  // t = 14

  PriceGenerator noisy{200, 40, 10, -5, 3, 42};
  CHECK(generate_prices(noisy) == generate_prices(noisy));
  noisy.seed = 43;
  const auto other = generate_prices(noisy);
  noisy.seed = 42;
  CHECK(generate_prices(noisy) != other);

  PriceGenerator weekend{24 * 7, 40, 0, -5, 0, 1};
  const auto w = generate_prices(weekend);
  CHECK(w[24 * 4] == 40);
  CHECK(w[24 * 5] == 35);
  CHECK(w[24 * 7 - 1] == 35);
}

TEST_CASE("price tail perturbation leaves the head alone") {
  const std::vector<double> p(30, 50.0);
  const auto q = perturb_tail(p, 10, 0.2, 3);
  for (int t = 0; t < 10; ++t) CHECK(q[t] == 50);
  for (int t = 10; t < 30; ++t) CHECK((q[t] == doctest::Approx(60) || q[t] == doctest::Approx(40)));
  CHECK(perturb_tail(p, 10, 0.2, 3) == q);
}

TEST_CASE("reports are valid documents") {
  std::mt19937_64 rng(14);
  auto inst = support::random_instance(rng, 12);
  const auto r = solve(inst);
  const std::string h = horizons_to_json(r);
  CHECK(h.find("\"mu1_star\"") != std::string::npos);
  CHECK(h.find("\"unit2_stages\"") != std::string::npos);
  CHECK(certificate_to_json(r.certificate).find("\"overall\"") != std::string::npos);
  const std::string svg = render_plot_svg(inst.costs.prices(), r);
  CHECK(svg.rfind("<svg", 0) == 0);
  std::size_t panels = 0;
  for (std::size_t at = 0; (at = svg.find("<polyline", at)) != std::string::npos; ++at) ++panels;
  CHECK(panels == 4);
  const std::string bundle = counterexample_bundle(inst, r.strategy, r.strategy, "test");
  const auto back = parse_config(bundle);
  CHECK(back.prices == inst.costs.prices());
}

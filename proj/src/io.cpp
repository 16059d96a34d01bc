#include "duostore/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace duostore {

using nlohmann::json;

namespace {

std::string fmt9(double v) {
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double round9(double v) { return std::stod(fmt9(v)); }

double number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw InputError(std::string("config: missing numeric key '") + key + "'");
  return j[key].get<double>();
}

std::array<double, 2> pair_of(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 2)
    throw InputError(std::string("config: '") + key +
                     "' must be an array of two numbers");
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    if (!j[key][i].is_number())
      throw InputError(std::string("config: '") + key + "' must be numeric");
    out[i] = j[key][i].get<double>();
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(s[i])) ++i;
  return s.substr(i);
}

double parse_double(const std::string& cell, int line) {
  const std::string s = trim(cell);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v))
    throw InputError("line " + std::to_string(line) + ": bad number '" + s +
                     "'");
  return v;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

json tolerances_json(const ToleranceSet& t) {
  return {{"eps_mu", t.eps_mu},
          {"eps_x", t.eps_x},
          {"eps_S", t.eps_S},
          {"eps_cost", t.eps_cost}};
}

json stage_json(const StageResult& s) {
  return {{"start", s.start},
          {"decision", s.decision},
          {"forecast", s.forecast},
          {"boundary", to_string(s.boundary)},
          {"theta_star", s.theta_star},
          {"boundary_gap", s.boundary_gap}};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config: top level must be an object");

  RunConfig c;
  if (!j.contains("units") || !j["units"].is_array() || j["units"].size() != 2)
    throw InputError("config: 'units' must be an array of two {E, P}");
  for (int i = 0; i < 2; ++i) {
    const json& u = j["units"][i];
    if (!u.is_object()) throw InputError("config: unit must be an object");
    c.units[i] = {number(u, "E"), number(u, "P")};
  }
  c.lambda = number(j, "lambda");
  c.initial_levels = pair_of(j, "initial_levels");
  c.final_levels = pair_of(j, "final_levels");
  if (j.contains("tolerances") && !j["tolerances"].is_null()) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw InputError("config: 'tolerances' must be an object");
    ToleranceSet tol{};
    tol.eps_mu = tol.eps_x = tol.eps_S = tol.eps_cost = -1.0;  // unset
    for (auto [key, field] :
         {std::pair{"eps_mu", &ToleranceSet::eps_mu},
          std::pair{"eps_x", &ToleranceSet::eps_x},
          std::pair{"eps_S", &ToleranceSet::eps_S},
          std::pair{"eps_cost", &ToleranceSet::eps_cost}}) {
      if (t.contains(key)) tol.*field = number(t, key);
    }
    c.tolerances = tol;
  }
  if (j.contains("oracle_budget")) c.oracle_budget = number(j, "oracle_budget");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      throw InputError("config: 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("prices")) {
    if (!j["prices"].is_array())
      throw InputError("config: 'prices' must be an array");
    for (const json& p : j["prices"]) {
      if (!p.is_number()) throw InputError("config: prices must be numeric");
      c.prices.push_back(p.get<double>());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["units"] = json::array({{{"E", c.units[0].capacity}, {"P", c.units[0].rate}},
                            {{"E", c.units[1].capacity}, {"P", c.units[1].rate}}});
  j["lambda"] = c.lambda;
  j["initial_levels"] = c.initial_levels;
  j["final_levels"] = c.final_levels;
  if (c.tolerances) j["tolerances"] = tolerances_json(*c.tolerances);
  j["oracle_budget"] = c.oracle_budget;
  j["seed"] = c.seed;
  if (!c.prices.empty()) j["prices"] = c.prices;
  return j.dump(2) + "\n";
}

ProblemInstance build_instance(const RunConfig& config,
                               std::vector<double> prices) {
  if (prices.empty()) throw InputError("no prices given");
  ProblemInstance inst = make_instance(
      config.units[0], config.units[1],
      CostModel::quadratic_impact(std::move(prices), config.lambda),
      config.initial_levels, config.final_levels);
  if (config.tolerances) {
    const ToleranceSet& t = *config.tolerances;
    if (t.eps_mu > 0) inst.tolerances.eps_mu = t.eps_mu;
    if (t.eps_x > 0) inst.tolerances.eps_x = t.eps_x;
    if (t.eps_S > 0) inst.tolerances.eps_S = t.eps_S;
    if (t.eps_cost > 0) inst.tolerances.eps_cost = t.eps_cost;
  }
  return inst;
}

std::vector<double> parse_prices_csv(const std::string& text) {
  const std::vector<std::string> lines = data_lines(text);
  if (lines.empty()) throw InputError("price file is empty");
  std::size_t first = 0;
  if (lines[0].find_first_not_of("0123456789.,+-eE \t") != std::string::npos)
    first = 1;  // header
  std::vector<double> prices;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    const auto cells = split(lines[i], ',');
    if (cells.size() != 2)
      throw InputError("line " + std::to_string(ln) + ": expected 't,price'");
    const double t = parse_double(cells[0], ln);
    if (t != static_cast<double>(prices.size() + 1))
      throw InputError("line " + std::to_string(ln) + ": expected t=" +
                       std::to_string(prices.size() + 1));
    const double p = parse_double(cells[1], ln);
    if (!(p > 0.0))
      throw InputError("line " + std::to_string(ln) +
                       ": price must be strictly positive");
    prices.push_back(p);
  }
  if (prices.empty()) throw InputError("price file has no rows");
  return prices;
}

std::vector<double> load_prices(const std::filesystem::path& path) {
  return parse_prices_csv(read_text(path));
}

std::string prices_to_csv(const std::vector<double>& prices) {
  std::string out = "t,price\n";
  for (std::size_t t = 0; t < prices.size(); ++t)
    out += std::to_string(t + 1) + "," + fmt9(prices[t]) + "\n";
  return out;
}

// Levels are rounded to the printed precision first and increments are
// taken from the rounded levels, so the printed columns agree up to the
// rounding of one subtraction.
std::string strategy_to_csv(const Strategy& s, const MultiplierPath& m) {
  const int T = s.horizon();
  std::string out = "t,x1,x2,S1,S2,mu1,mu2,kappa2\n";
  for (int t = 1; t <= T; ++t) {
    const double a1 = round9(s.levels1[t - 1]), b1 = round9(s.levels1[t]);
    const double a2 = round9(s.levels2[t - 1]), b2 = round9(s.levels2[t]);
    const auto k = static_cast<std::size_t>(t - 1);
    const double mu1 = k < m.mu1.size() ? m.mu1[k] : 0.0;
    const SecondParam nu = k < m.nu2.size() ? m.nu2[k] : SecondParam{};
    out += std::to_string(t) + "," + fmt9(b1 - a1) + "," + fmt9(b2 - a2) +
           "," + fmt9(b1) + "," + fmt9(b2) + "," + fmt9(mu1) + "," +
           fmt9(nu.mu2) + "," + fmt9(nu.kappa2) + "\n";
  }
  return out;
}

StrategyTable parse_strategy_csv(const std::string& text, int horizon,
                                 std::array<double, 2> initial_levels) {
  const std::vector<std::string> lines = data_lines(text);
  if (lines.empty() || lines[0] != "t,x1,x2,S1,S2,mu1,mu2,kappa2")
    throw InputError("strategy file: missing header");
  const int rows = static_cast<int>(lines.size()) - 1;
  if (rows != horizon)
    throw InputError("strategy file: " + std::to_string(rows) +
                     " rows, expected " + std::to_string(horizon));
  StrategyTable tab;
  tab.strategy.levels1.push_back(initial_levels[0]);
  tab.strategy.levels2.push_back(initial_levels[1]);
  for (int i = 1; i <= rows; ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 8)
      throw InputError("strategy file line " + std::to_string(i + 1) +
                       ": expected 8 columns");
    double v[8];
    for (int c = 0; c < 8; ++c) v[c] = parse_double(cells[c], i + 1);
    if (v[0] != i)
      throw InputError("strategy file line " + std::to_string(i + 1) +
                       ": expected t=" + std::to_string(i));
    tab.strategy.levels1.push_back(v[3]);
    tab.strategy.levels2.push_back(v[4]);
    tab.multipliers.mu1.push_back(v[5]);
    tab.multipliers.nu2.push_back({v[6], v[7]});
  }
  return tab;
}

std::string horizons_to_json(const SolveResult& r) {
  json stages = json::array();
  for (std::size_t i = 0; i < r.horizons.stages.size(); ++i) {
    const StageResult& s = r.horizons.stages[i];
    json e = stage_json(s);
    e.erase("theta_star");
    e["mu1_star"] = s.theta_star;
    if (i < r.state_matches.size()) {
      const StateMatch& m = r.state_matches[i];
      e["state_match"] = {{"match", m.match}, {"level2", m.level2}};
    }
    json inner = json::array();
    if (i < r.unit2_horizons.size()) {
      const double mu1 = s.theta_star;
      for (const StageResult& u : r.unit2_horizons[i].stages) {
        json ue = stage_json(u);
        const SecondParam nu =
            r.reduced ? SecondParam{u.theta_star, 0.0}
                      : unembed_second(u.theta_star, mu1);
        ue["mu2_star"] = nu.mu2;
        ue["kappa2_star"] = nu.kappa2;
        inner.push_back(std::move(ue));
      }
    }
    e["unit2_stages"] = std::move(inner);
    stages.push_back(std::move(e));
  }
  json diags = json::array();
  for (const Diagnostic& d : r.diagnostics)
    diags.push_back(
        {{"kind", to_string(d.kind)}, {"time", d.time}, {"detail", d.detail}});
  json j = {{"reduced", r.reduced},
            {"stages", std::move(stages)},
            {"diagnostics", std::move(diags)}};
  return j.dump(2) + "\n";
}

std::string certificate_to_json(const CertificateReport& c) {
  json slack = json::array();
  for (const auto& [unit, t] : c.slackness_violations)
    slack.push_back({{"unit", unit}, {"t", t}});
  json j = {{"overall", c.overall},
            {"feasible", c.feasible},
            {"max_violation", c.max_violation},
            {"minimization_ok", c.minimization_ok},
            {"worst_gap", c.worst_gap},
            {"worst_kkt", c.worst_kkt},
            {"worst_time", c.worst_time},
            {"slackness_ok", c.slackness_ok},
            {"slackness_violations", std::move(slack)}};
  return j.dump(2) + "\n";
}

std::string gap_to_json(const GapReport& g) {
  json j = {{"cost_alg", g.cost_alg},     {"cost_dp", g.cost_dp},
            {"gap", g.gap},               {"bound", g.bound},
            {"beats_grid", g.beats_grid}, {"within_bound", g.within_bound},
            {"ok", g.ok()}};
  return j.dump(2) + "\n";
}

std::string render_plot_svg(const std::vector<double>& prices,
                            const SolveResult& r) {
  const int T = static_cast<int>(prices.size());
  const std::vector<int> fh = forecast_by_time(r.horizons, T);

  struct Panel {
    const char* title;
    std::vector<double> y;  // index 0 is t = 0 or t = 1, see offset
    int offset;
  };
  std::vector<double> fhd(fh.begin(), fh.end());
  const Panel panels[4] = {{"price", prices, 1},
                           {"S1", r.strategy.levels1, 0},
                           {"S2", r.strategy.levels2, 0},
                           {"forecast horizon", fhd, 1}};

  const double W = 960, H = 170, left = 70, right = 20, top = 24, gap = 40;
  const double plot_w = W - left - right;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << 4 * (H + gap) + top << "\" font-family=\"sans-serif\""
      << " font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int k = 0; k < 4; ++k) {
    const Panel& p = panels[k];
    const double y0 = top + k * (H + gap);
    double lo = 0.0, hi = 1.0;
    if (!p.y.empty()) {
      lo = *std::min_element(p.y.begin(), p.y.end());
      hi = *std::max_element(p.y.begin(), p.y.end());
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
    const auto X = [&](double t) {
      return left + plot_w * (T > 0 ? t / T : 0.0);
    };
    const auto Y = [&](double v) { return y0 + H - H * (v - lo) / (hi - lo); };
    svg << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << plot_w
        << "\" height=\"" << H << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << left << "\" y=\"" << y0 - 6 << "\">" << p.title
        << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y0 + 10
        << "\" text-anchor=\"end\">" << fmt9(hi) << "</text>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << y0 + H
        << "\" text-anchor=\"end\">" << fmt9(lo) << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.2\" "
           "points=\"";
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      const double t = static_cast<double>(i) + p.offset;
      svg << fmt9(X(t)) << "," << fmt9(Y(p.y[i])) << " ";
    }
    svg << "\"/>\n";
  }
  const double yb = top + 4 * (H + gap) - gap + 16;
  svg << "<text x=\"" << left << "\" y=\"" << yb << "\">t = 0</text>\n";
  svg << "<text x=\"" << left + plot_w << "\" y=\"" << yb
      << "\" text-anchor=\"end\">t = " << T << "</text>\n</svg>\n";
  return svg.str();
}

std::string counterexample_bundle(const ProblemInstance& instance,
                                  const Strategy& algorithm,
                                  const Strategy& reference,
                                  const std::string& reason) {
  RunConfig c;
  c.units[0] = instance.unit1;
  c.units[1] = instance.unit2;
  c.lambda = instance.costs.impact();
  c.initial_levels = instance.initial_levels;
  c.final_levels = instance.final_levels;
  c.tolerances = instance.tolerances;
  c.prices = instance.costs.prices();
  json j = json::parse(config_to_json(c));
  j["reason"] = reason;
  j["algorithm_levels"] = {algorithm.levels1, algorithm.levels2};
  j["reference_levels"] = {reference.levels1, reference.levels2};
  return j.dump(2) + "\n";
}

std::vector<double> generate_prices(const PriceGenerator& g) {
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(std::max(0, g.horizon)));
  for (int t = 1; t <= g.horizon; ++t) {
    const int day = (t - 1) / 24;
    const bool weekend = day % 7 == 5 || day % 7 == 6;
    double v = g.base +
               g.amplitude * std::sin(2.0 * std::numbers::pi * (t - 8) / 24.0) +
               (weekend ? g.weekend_dip : 0.0);
    const double z = noise(rng);  // drawn every hour so seeds stay aligned
    if (g.noise_sd > 0.0) v += g.noise_sd * z;
    p[t - 1] = std::max(1.0, v);
  }
  return p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace duostore

#include "wsn/cli.hpp"

#include "wsn/errors.hpp"
#include "wsn/simulate.hpp"
#include "wsn/tradeoff.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wsn::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string ScenarioConfig::to_text() const {
  std::ostringstream s;
  auto kv = [&](const char* k, const std::string& v) { s << k << '=' << v << '\n'; };
  auto num = [&](double v) { return format_number(v); };
  kv("command", command);
  kv("scenario", scenario);
  kv("n", std::to_string(n));
  kv("l", num(l));
  kv("sigma-sq", num(sigma_sq));
  kv("alpha", num(alpha));
  kv("decay", decay);
  kv("rate-grid", num(rate_lo) + ":" + num(rate_hi) + ":" + std::to_string(rate_points));
  std::string al;
  for (std::size_t i = 0; i < alphas.size(); ++i) al += (i ? "," : "") + num(alphas[i]);
  kv("alphas", al);
  kv("alpha-grid", num(alpha_grid_lo) + ":" + num(alpha_grid_hi) + ":" + num(alpha_grid_step));
  kv("beta", beta ? num(*beta) : "");
  kv("beta-grid", num(beta_lo) + ":" + num(beta_hi) + ":" + num(beta_step));
  kv("rate-cap", num(rate_cap));
  kv("seed", std::to_string(seed));
  kv("out", out.string());
  kv("layout", layout ? layout->string() : "");
  kv("trials", std::to_string(trials));
  kv("replications", std::to_string(replications));
  kv("events", std::to_string(events));
  return s.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::string s;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Grid3 {
  double lo;
  double hi;
  double third;
};

Grid3 parse_grid(const std::string& flag, const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(flag + ": cannot parse '" + text + "' (expected LO:HI:N)");
    }
  }
  if (parts.size() != 3) throw ConfigError(flag + ": expected LO:HI:N, got '" + text + "'");
  return {parts[0], parts[1], parts[2]};
}

double parse_decay_parameter(const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("--decay: cannot parse parameter '" + text + "'");
}

CorrelationDecay decay_from(const std::string& spec) {
  if (spec == "iid") return CorrelationDecay::iid();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("--decay: expected iid, const:G or exp:RHO");
  const std::string kind = spec.substr(0, colon);
  const double p = parse_decay_parameter(spec.substr(colon + 1));
  if (kind == "const") {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("--g must lie in (0, 1)");
    return CorrelationDecay::constant(p);
  }
  if (kind == "exp") {
    if (!(p > 0.0)) throw ConfigError("--decay exp:RHO needs RHO > 0");
    return CorrelationDecay::exponential(p);
  }
  throw ConfigError("--decay: unknown kind '" + kind + "'");
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  if (cfg.scenario == "indep") return Scenario::indep(cfg.n, cfg.l, cfg.sigma_sq);
  if (cfg.scenario == "chain3") {
    const auto d = decay_from(cfg.decay);
    return Scenario::chain3(cfg.l, cfg.sigma_sq, d.parameter());
  }
  return Scenario::custom(read_layout_csv(*cfg.layout), cfg.l, cfg.sigma_sq, decay_from(cfg.decay));
}

std::vector<double> rate_grid(const ScenarioConfig& cfg) {
  return log_grid(cfg.rate_lo, cfg.rate_hi, cfg.rate_points);
}

void echo_config(const ScenarioConfig& cfg, std::ostream& log) {
  const auto text = cfg.to_text();
  log << text << std::flush;
  write_atomic(cfg.out / "config.txt", text);
}

}  // namespace

int cmd_sweep(const ScenarioConfig& cfg, std::ostream& log) {
  echo_config(cfg, log);
  const auto scenario = build_scenario(cfg);
  const auto rows = sweep(scenario, rate_grid(cfg), cfg.alpha);
  const auto groups = scenario.groups();

  CsvTable u({"rate", "U"});
  CsvTable k({"rate", "k_bar"});
  std::vector<std::string> m_head{"rate", "m_bar"};
  std::vector<std::string> s_head{"rate"};
  for (const auto& label : groups.labels) {
    m_head.push_back("m_" + label);
    s_head.push_back("A_" + label);
  }
  CsvTable m(m_head);
  CsvTable a({"rate", "A", "A_bayes"});
  CsvTable s(s_head);
  for (const auto& r : rows) {
    const auto rate = format_number(r.rate);
    u.add({rate, format_number(r.U)});
    k.add({rate, format_number(r.k_bar)});
    a.add({rate, format_number(r.A), format_number(r.A_bayes)});
    std::vector<std::string> mr{rate, format_number(r.m_bar)};
    std::vector<std::string> sr{rate};
    for (Eigen::Index g = 0; g < r.group_m.size(); ++g) {
      mr.push_back(format_number(r.group_m[g]));
      sr.push_back(format_number(r.per_state_A[g]));
    }
    m.add(std::move(mr));
    s.add(std::move(sr));
  }
  write_atomic(cfg.out / "fig_U.csv", u.str());
  write_atomic(cfg.out / "fig_kbar.csv", k.str());
  write_atomic(cfg.out / "fig_mbar.csv", m.str());
  write_atomic(cfg.out / "fig_A.csv", a.str());
  write_atomic(cfg.out / "fig_A_states.csv", s.str());
  log << "wrote " << rows.size() << " rows to " << cfg.out.string() << "\n";
  return kOk;
}

int cmd_frontier(const ScenarioConfig& cfg, std::ostream& log) {
  echo_config(cfg, log);
  const auto scenario = build_scenario(cfg);
  const auto f = frontier(scenario, rate_grid(cfg), cfg.alphas);
  CsvTable t({"alpha", "rate", "U", "A", "A_bayes", "envelope"});
  auto add = [&](const FrontierPoint& p) {
    t.add({format_number(p.alpha), format_number(p.rate), format_number(p.U), format_number(p.A),
           format_number(p.A_bayes), p.on_envelope ? "1" : "0"});
  };
  for (const auto& curve : f.curves)
    for (const auto& p : curve) add(p);
  for (const auto& p : f.bayes) add(p);
  write_atomic(cfg.out / "frontier.csv", t.str());
  log << "wrote " << f.curves.size() << " curves plus the Bayes reference to "
      << (cfg.out / "frontier.csv").string() << "\n";
  return kOk;
}

int cmd_optimize(const ScenarioConfig& cfg, std::ostream& log) {
  echo_config(cfg, log);
  const auto scenario = build_scenario(cfg);
  OptimizerGrid grid{linear_grid(cfg.alpha_grid_lo, cfg.alpha_grid_hi, cfg.alpha_grid_step),
                     rate_grid(cfg), cfg.rate_cap};
  const auto betas =
      cfg.beta ? std::vector<double>{*cfg.beta} : linear_grid(cfg.beta_lo, cfg.beta_hi, cfg.beta_step);
  const auto scan = threshold_scan(scenario, betas, grid);

  CsvTable t({"beta", "alpha_star", "rate_star", "U_star", "feasible"});
  for (const auto& r : scan.rows)
    t.add({format_number(r.beta), format_number(r.alpha_star), format_number(r.rate_star),
           format_number(r.U_star), r.feasible ? "true" : "false"});
  write_atomic(cfg.out / "opt.csv", t.str());
  if (cfg.beta) {
    const auto& r = scan.rows.front();
    log << "beta=" << format_number(r.beta) << " feasible=" << (r.feasible ? "true" : "false")
        << " alpha_star=" << format_number(r.alpha_star)
        << " rate_star=" << format_number(r.rate_star) << " U_star=" << format_number(r.U_star)
        << "\n";
  } else {
    log << "transition_beta="
        << (std::isnan(scan.transition_beta) ? std::string("none")
                                             : format_number(scan.transition_beta))
        << "\n";
  }
  return kOk;
}

int cmd_validate(const ScenarioConfig& cfg, std::ostream& log) {
  echo_config(cfg, log);
  nlohmann::ordered_json report;
  report["seed"] = cfg.seed;
  report["events"] = cfg.events;
  report["trials"] = cfg.trials;
  report["replications"] = cfg.replications;
  auto checks = nlohmann::ordered_json::array();
  bool all_ok = true;
  std::ostringstream text;

  auto record = [&](const std::string& name, double observed, double expected, double tolerance) {
    const double dev = std::abs(observed - expected);
    const bool ok = dev <= tolerance;
    all_ok = all_ok && ok;
    checks.push_back({{"name", name},
                      {"observed", observed},
                      {"expected", expected},
                      {"deviation", dev},
                      {"tolerance", tolerance},
                      {"passed", ok}});
    text << (ok ? "PASS " : "FAIL ") << name << ": observed " << format_number(observed)
         << ", expected " << format_number(expected) << ", deviation " << format_number(dev)
         << " (tolerance " << format_number(tolerance) << ")\n";
  };

  // general product-form engine against the closed forms
  {
    const auto indep = Scenario::indep(8, 100.0, 1.0);
    const auto row = evaluate(indep, 1.0, 0.2);
    record("closed_form_indep_accuracy", row.A,
           indep_accuracy_closed(8, 1.0, 1.0, EnergyBudget(100.0, 0.2)), 1e-12);
    const auto chain = Scenario::chain3(10.0, 1.0, 0.25);
    const auto crow = evaluate(chain, 1.0, 0.4);
    record("closed_form_chain3_accuracy", crow.A,
           chain3_accuracy_closed(1.0, 0.25, 0.25, 1.0, EnergyBudget(10.0, 0.4)), 1e-12);
  }

  // CTMC occupancy against the product form
  {
    const auto events = static_cast<std::uint64_t>(cfg.events);
    const auto chain_b = BackoffConfig::chain3(1.0);
    const auto chain = simulate_ctmc(Graph::path(3), chain_b, Horizon::events(events),
                                     derive_seed(cfg.seed, 10));
    record("occupancy_tv_chain3_eta1",
           total_variation(chain.occupancy, stationary_distribution(chain.states, chain_b).pi), 0.0,
           0.01);
    const auto indep_b = BackoffConfig::uniform(8, 1.0);
    const auto indep = simulate_ctmc(Graph::edgeless(8), indep_b, Horizon::events(events),
                                     derive_seed(cfg.seed, 11));
    record("occupancy_tv_indep_n8_nu1",
           total_variation(indep.occupancy, stationary_distribution(indep.states, indep_b).pi),
           0.0, 0.01);
  }

  // Raudys approximation against trained FDA
  {
    const std::vector<std::pair<int, int>> cases{{4, 20}, {2, 10}};
    std::uint64_t stream = 20;
    for (const auto& [k, m] : cases) {
      const auto model = build_model(Graph::edgeless(k), 1.0, {});
      const auto est = empirical_generalization_accuracy(model, ActivityState::full(k), m,
                                                         cfg.trials, derive_seed(cfg.seed, stream++));
      record("raudys_vs_fda_k" + std::to_string(k) + "_m" + std::to_string(m), est.mean,
             raudys_accuracy<double>(k, k, m), 0.02);
    }
  }

  // full training-then-operation replications
  {
    EndToEndOptions pooled;
    pooled.pooling = ClassifierPooling::ByActiveCount;
    const auto indep = Scenario::indep(8, 100.0, 1.0);
    const auto e = replicate_end_to_end(indep.conflict, indep.model, BackoffConfig::uniform(8, 1.0),
                                        EnergyBudget(100.0, 0.2), pooled, cfg.replications,
                                        derive_seed(cfg.seed, 30));
    record("end_to_end_indep_nu1", e.mean,
           indep_accuracy_closed(8, 1.0, 1.0, EnergyBudget(100.0, 0.2)), 0.03);
    const auto chain = Scenario::chain3(10.0, 1.0, 0.25);
    const auto c = replicate_end_to_end(chain.conflict, chain.model, BackoffConfig::chain3(1.0),
                                        EnergyBudget(10.0, 0.4), EndToEndOptions{},
                                        cfg.replications, derive_seed(cfg.seed, 31));
    record("end_to_end_chain3_eta1", c.mean,
           chain3_accuracy_closed(1.0, 0.25, 0.25, 1.0, EnergyBudget(10.0, 0.4)), 0.04);
  }

  report["checks"] = checks;
  report["passed"] = all_ok;
  write_atomic(cfg.out / "report.json", report.dump(2) + "\n");
  write_atomic(cfg.out / "report.txt", text.str());
  log << text.str() << (all_ok ? "all checks passed\n" : "validation FAILED\n");
  return all_ok ? kOk : kValidationFailed;
}

namespace {

// Expands `--config FILE` into `--key=value` tokens placed ahead of the
// remaining arguments, so explicit flags (parsed later) win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::vector<std::string> injected;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file name");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    std::ifstream in(file);
    if (!in) throw ConfigError("--config: cannot open " + file);
    std::string line;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("--config: expected key=value, got '" + line + "'");
      auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      injected.push_back("--" + strip(line.substr(0, eq)) + "=" + strip(line.substr(eq + 1)));
    }
  }
  // the subcommand name must stay first so subcommand options resolve
  if (!rest.empty() && rest.front().rfind("-", 0) != 0) {
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), injected.begin(), injected.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
  }
  injected.insert(injected.end(), rest.begin(), rest.end());
  return injected;
}

struct RawFlags {
  std::string scenario = "indep";
  std::optional<int> n;
  std::optional<double> l;
  std::optional<double> alpha;
  std::optional<double> sigma_sq;
  std::optional<double> g;
  std::optional<std::string> decay;
  std::optional<std::string> rate_grid;
  std::optional<std::vector<double>> alphas;
  std::optional<std::string> alpha_grid;
  std::optional<double> beta;
  std::optional<std::string> beta_grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> layout;
  std::optional<int> trials;
  std::optional<int> replications;
  std::optional<long> events;
  std::optional<double> rate_cap;
};

ScenarioConfig resolve(const std::string& command, const RawFlags& f) {
  ScenarioConfig c;
  c.command = command;
  c.scenario = f.scenario;
  if (c.scenario != "indep" && c.scenario != "chain3" && c.scenario != "custom")
    throw ConfigError("--scenario must be one of indep, chain3, custom");
  if (f.g && f.decay) throw ConfigError("--g and --decay are mutually exclusive");

  if (c.scenario == "indep") {
    if (f.g || (f.decay && *f.decay != "iid"))
      throw ConfigError("--g/--decay: the indep scenario has i.i.d. measurements");
    c.n = f.n.value_or(8);
    if (c.n < 1 || c.n > kDefaultEnumerationCap)
      throw ConfigError("--n must lie in 1.." + std::to_string(kDefaultEnumerationCap));
    c.l = f.l.value_or(100.0);
    c.alpha = f.alpha.value_or(0.2);
    c.decay = "iid";
  } else if (c.scenario == "chain3") {
    if (f.n && *f.n != 3) throw ConfigError("--n: the chain3 scenario has exactly 3 nodes");
    if (f.decay && f.decay->rfind("const:", 0) != 0)
      throw ConfigError("--decay: the chain3 scenario takes a constant edge correlation (--g)");
    c.n = 3;
    c.l = f.l.value_or(10.0);
    c.alpha = f.alpha.value_or(0.4);
    c.decay = f.decay ? *f.decay : "const:" + format_number(f.g.value_or(0.25));
  } else {
    if (!f.layout) throw ConfigError("--layout: the custom scenario requires a layout CSV");
    c.layout = *f.layout;
    try {
      c.n = read_layout_csv(*c.layout).size();
    } catch (const InvalidLayout& e) {
      throw ConfigError(std::string("--layout: ") + e.what());
    }
    if (c.n > kDefaultEnumerationCap)
      throw ConfigError("--layout: more than " + std::to_string(kDefaultEnumerationCap) + " nodes");
    if (f.n && *f.n != c.n) throw ConfigError("--n disagrees with the layout's node count");
    c.l = f.l.value_or(100.0);
    c.alpha = f.alpha.value_or(0.2);
    c.decay = f.decay ? *f.decay : "const:" + format_number(f.g.value_or(0.25));
  }
  if (c.scenario != "indep") decay_from(c.decay);

  c.sigma_sq = f.sigma_sq.value_or(1.0);
  if (!(c.l > 0.0) || !std::isfinite(c.l)) throw ConfigError("--l must be positive");
  if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("--alpha must lie in [0, 1]");
  if (!(c.sigma_sq > 0.0) || !std::isfinite(c.sigma_sq)) throw ConfigError("--sigma-sq must be positive");

  if (f.rate_grid) {
    const auto g = parse_grid("--rate-grid", *f.rate_grid);
    c.rate_lo = g.lo;
    c.rate_hi = g.hi;
    c.rate_points = static_cast<int>(g.third);
    if (!(g.lo > 0.0) || g.hi < g.lo || g.third < 1 || g.third != std::floor(g.third))
      throw ConfigError("--rate-grid needs 0 < LO <= HI and an integer POINTS >= 1");
  }
  c.alphas = f.alphas.value_or(linear_grid(0.1, 0.9, 0.1));
  if (c.alphas.empty()) throw ConfigError("--alphas must not be empty");
  for (double a : c.alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("--alphas entries must lie in (0, 1)");
  if (f.alpha_grid) {
    const auto g = parse_grid("--alpha-grid", *f.alpha_grid);
    if (!(g.lo >= 0.0) || g.hi < g.lo || g.hi > 1.0 || !(g.third > 0.0))
      throw ConfigError("--alpha-grid needs 0 <= LO <= HI <= 1 and STEP > 0");
    c.alpha_grid_lo = g.lo;
    c.alpha_grid_hi = g.hi;
    c.alpha_grid_step = g.third;
  }
  if (f.beta && f.beta_grid) throw ConfigError("--beta and --beta-grid are mutually exclusive");
  if (f.beta) {
    if (!(*f.beta > 0.0 && *f.beta <= 1.0)) throw ConfigError("--beta must lie in (0, 1]");
    c.beta = *f.beta;
  }
  if (f.beta_grid) {
    const auto g = parse_grid("--beta-grid", *f.beta_grid);
    if (!(g.lo > 0.0) || g.hi < g.lo || g.hi > 1.0 || !(g.third > 0.0))
      throw ConfigError("--beta-grid needs 0 < LO <= HI <= 1 and STEP > 0");
    c.beta_lo = g.lo;
    c.beta_hi = g.hi;
    c.beta_step = g.third;
  }
  c.rate_cap = f.rate_cap.value_or(1e4);
  if (!(c.rate_cap > 0.0) || !std::isfinite(c.rate_cap)) throw ConfigError("--rate-cap must be positive");
  c.seed = f.seed.value_or(1);
  c.trials = f.trials.value_or(10000);
  if (c.trials < 1) throw ConfigError("--trials must be at least 1");
  c.replications = f.replications.value_or(500);
  if (c.replications < 1) throw ConfigError("--replications must be at least 1");
  c.events = f.events.value_or(1000000);
  if (c.events < 1) throw ConfigError("--events must be at least 1");

  if (f.out) {
    c.out = *f.out;
  } else if (const char* env = std::getenv("STL_OUT"); env && *env) {
    c.out = env;
  } else {
    c.out = ".";
  }
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lifetime/accuracy tradeoff analysis for CSMA sensor networks", "wsn-tradeoff"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);

  RawFlags f;
  app.add_option("--scenario", f.scenario, "indep | chain3 | custom");
  app.add_option("--n", f.n, "number of nodes (indep)");
  app.add_option("--l", f.l, "transmissions per battery");
  app.add_option("--alpha", f.alpha, "training fraction of the battery");
  app.add_option("--sigma-sq", f.sigma_sq, "measurement noise variance");
  app.add_option("--g", f.g, "constant edge correlation");
  app.add_option("--decay", f.decay, "iid | const:G | exp:RHO");
  app.add_option("--rate-grid", f.rate_grid, "LO:HI:POINTS, log-spaced back-off rates");
  app.add_option("--alphas", f.alphas, "frontier training fractions")->delimiter(',');
  app.add_option("--alpha-grid", f.alpha_grid, "optimizer alphas LO:HI:STEP");
  app.add_option("--beta", f.beta, "single accuracy target");
  app.add_option("--beta-grid", f.beta_grid, "accuracy targets LO:HI:STEP");
  app.add_option("--seed", f.seed, "root RNG seed");
  app.add_option("--out", f.out, "output directory (default $STL_OUT or .)");
  app.add_option("--layout", f.layout, "id,x,y CSV for the custom scenario");
  app.add_option("--trials", f.trials, "FDA training trials per check");
  app.add_option("--replications", f.replications, "end-to-end replications");
  app.add_option("--events", f.events, "CTMC events per occupancy check");
  app.add_option("--rate-cap", f.rate_cap, "largest finite back-off rate");

  std::string command;
  for (const char* name : {"sweep", "frontier", "optimize", "validate"}) {
    static const std::map<std::string, std::string> help{
        {"sweep", "figure data over the rate grid at one alpha"},
        {"frontier", "(U, A) curves for several alphas"},
        {"optimize", "maximize lifetime subject to an accuracy target"},
        {"validate", "simulation oracles against the analytic formulas"}};
    app.add_subcommand(name, help.at(name))->callback([&command, name] { command = name; });
  }

  try {
    auto expanded = expand_config(args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
    const auto cfg = resolve(command, f);
    if (command == "sweep") return cmd_sweep(cfg, out);
    if (command == "frontier") return cmd_frontier(cfg, out);
    if (command == "optimize") return cmd_optimize(cfg, out);
    return cmd_validate(cfg, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const InvalidLayout& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace wsn::cli

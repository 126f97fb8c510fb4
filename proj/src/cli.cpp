#include "liouville/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "liouville/fields.hpp"
#include "liouville/profile.hpp"

namespace liouville {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pinned verdict thresholds.
constexpr double kDivergenceStep = 1e-3;
constexpr double kDivergenceRadius = 10.0;
constexpr std::size_t kDivergencePoints = 1000;
constexpr double kRichardsonFloor = 1.9;
constexpr double kBoundErrorFactor = 10.0;
constexpr double kContrapositiveSlope = 2.0;
constexpr std::size_t kModicaPoints = 1000;
constexpr double kModicaTolerance = 1e-10;
constexpr double kMonotoneTolerance = 1e-8;
constexpr double kRatioTolerance = 1e-8;
constexpr double kDeficitFloor = 1e-9;
constexpr int kVerdictGridPoints = 9;
constexpr std::size_t kCorpusSize = 20;
constexpr double kStabilitySlack = 1e-8;
constexpr int kProfileSamples = 801;
constexpr double kProfileHalfWidth = 4.0;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
    throw ConfigError("config: bad value '" + t + "' for key " + std::string(key));
  return value;
}

// --- CSV output ---------------------------------------------------------

struct Table {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string render(const Table& t) {
  std::ostringstream os;
  os << "# schema=1\n";
  for (const auto& c : t.comments) os << "# " << c << '\n';
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// --- verdicts -----------------------------------------------------------

struct Verdict {
  std::string claim;
  bool pass = false;
  double measured = kNaN;
  double threshold = kNaN;
};

Table summary_table(const std::vector<Verdict>& verdicts) {
  Table t;
  t.header = {"claim", "status", "measured", "threshold"};
  for (const auto& v : verdicts)
    t.add({v.claim, v.pass ? "PASS" : "FAIL", format_double(v.measured), format_double(v.threshold)});
  return t;
}

int finish(const std::vector<Verdict>& verdicts, const fs::path& summary, std::ostream& log) {
  write_atomic(summary, render(summary_table(verdicts)));
  bool all = true;
  for (const auto& v : verdicts) {
    log << "  " << (v.pass ? "PASS" : "FAIL") << "  " << v.claim << "  measured=" << format_double(v.measured)
        << "  threshold=" << format_double(v.threshold) << '\n';
    all = all && v.pass;
  }
  return all ? exit_code::ok : exit_code::claim_failure;
}

// Runs a command body, mapping exceptions to the exit-code contract.
template <class Body>
int guarded(std::string_view name, std::ostream& log, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << name << ": configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::invalid_argument& e) {
    log << name << ": configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  } catch (const std::exception& e) {
    log << name << ": failed: " << e.what() << '\n';
    return exit_code::claim_failure;
  }
}

double local_slope(const std::vector<double>& R, const std::vector<double>& v, std::size_t i) {
  if (R.size() < 2) return kNaN;
  const std::size_t a = i == 0 ? 0 : i - 1;
  const std::size_t b = i == 0 ? 1 : i;
  return std::log(v[b] / v[a]) / std::log(R[b] / R[a]);
}

// --- summary input ------------------------------------------------------

std::map<std::string, Verdict> read_summary(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::map<std::string, Verdict> out;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) throw std::runtime_error("malformed row in " + path.string());
    Verdict v;
    v.claim = cells[0];
    v.pass = cells[1] == "PASS";
    v.measured = std::strtod(cells[2].c_str(), nullptr);
    v.threshold = std::strtod(cells[3].c_str(), nullptr);
    out[v.claim] = v;
  }
  return out;
}

}  // namespace

// --- configuration ------------------------------------------------------

void RunConfig::validate() const {
  if (dimension < 1 || dimension > kMaxDim)
    throw ConfigError("dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (!(k > 2.0)) throw ConfigError("k must satisfy k > 2 (got " + format_double(k) + ")");
  if (!(radii_min > 0.0)) throw ConfigError("radii.min must be positive");
  if (!(radii_max >= radii_min)) throw ConfigError("radii.max must be >= radii.min");
  if (!(radii_ratio > 1.0)) throw ConfigError("radii.ratio must exceed 1");
  if (quad_radial < 2) throw ConfigError("quad.radial must be >= 2");
  if (quad_angular < 2) throw ConfigError("quad.angular must be >= 2");
  if (!(tol_bridge > 0.0) || !(tol_identity > 0.0) || !(tol_divergence > 0.0))
    throw ConfigError("tolerances must be positive");
  if (mode != "ball" && mode != "slab" && mode != "auto") throw ConfigError("mode must be ball, slab or auto");
  if (mode == "ball" && dimension > 3) throw ConfigError("ball mode requires dimension <= 3");
}

std::vector<double> RunConfig::radii() const {
  validate();
  std::vector<double> r;
  const double limit = radii_max * (1.0 + 1e-12);
  for (int i = 0;; ++i) {
    const double R = radii_min * std::pow(radii_ratio, i);
    if (R > limit) break;
    r.push_back(std::min(R, radii_max));
  }
  return r;
}

QuadratureSpec RunConfig::quadrature() const {
  QuadratureSpec spec;
  spec.radial_order = quad_radial;
  spec.angular_order = quad_angular;
  return spec;
}

GrowthMode RunConfig::growth_mode() const {
  validate();
  if (mode == "ball") return GrowthMode::ball;
  if (mode == "slab") return GrowthMode::slab;
  return dimension <= 3 ? GrowthMode::ball : GrowthMode::slab;
}

void apply_setting(RunConfig& c, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  if (key == "dimension")
    c.dimension = parse_number<int>(key, value);
  else if (key == "k")
    c.k = parse_number<double>(key, value);
  else if (key == "radii.min")
    c.radii_min = parse_number<double>(key, value);
  else if (key == "radii.max")
    c.radii_max = parse_number<double>(key, value);
  else if (key == "radii.ratio")
    c.radii_ratio = parse_number<double>(key, value);
  else if (key == "quad.radial")
    c.quad_radial = parse_number<int>(key, value);
  else if (key == "quad.angular")
    c.quad_angular = parse_number<int>(key, value);
  else if (key == "tol.bridge")
    c.tol_bridge = parse_number<double>(key, value);
  else if (key == "tol.identity")
    c.tol_identity = parse_number<double>(key, value);
  else if (key == "tol.divergence")
    c.tol_divergence = parse_number<double>(key, value);
  else if (key == "seed")
    c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "mode")
    c.mode = trim(value);
  else
    throw ConfigError("config: unknown key '" + key + "'");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// --- commands -----------------------------------------------------------

int cmd_construct(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded("construct", log, [&] {
    config.validate();
    const Profile profile = Profile::build(config.k, config.tol_bridge);

    Table t;
    t.comments = {"k=" + format_double(config.k)};
    t.header = {"t", "g", "g_prime"};
    for (int i = 0; i < kProfileSamples; ++i) {
      const double x = -kProfileHalfWidth + 2.0 * kProfileHalfWidth * i / (kProfileSamples - 1);
      t.add({format_double(x), format_double(profile.g(x)), format_double(profile.g_prime(x))});
    }
    write_atomic(out_dir / "profile.csv", render(t));

    log << "construct: k=" << format_double(config.k) << "\n  amplitude A* = " << format_double(profile.amplitude())
        << "\n  C1 = " << format_double(profile.C1()) << "\n  C2 = " << format_double(profile.C2())
        << "\n  bridge residual = " << format_double(profile.bridge_residual()) << '\n';
    const double residual = std::abs(profile.bridge_residual());
    return finish({{"bridge", residual <= config.tol_bridge, residual, config.tol_bridge}},
                  out_dir / "construct_summary.csv", log);
  });
}

int cmd_growth(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded("growth", log, [&] {
    config.validate();
    if (config.radii_min < 1.0) throw ConfigError("growth requires radii.min >= 1");
    const GrowthMode mode = config.growth_mode();
    const auto radii = config.radii();
    const Profile profile = Profile::build(config.k, config.tol_bridge);
    const Counterexample fields = counterexample(config.dimension, profile);
    const GrowthSeries series = growth_series(fields, profile, radii, mode, config.quadrature());

    Table t;
    t.comments = {"mode=" + std::string(to_string(mode)), "dimension=" + std::to_string(config.dimension),
                  "k=" + format_double(config.k)};
    t.header = {"R", "value", "bound", "error_estimate", "local_slope"};
    double worst = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double allowed = series.bound(i) + kBoundErrorFactor * series.errors[i];
      worst = std::max(worst, series.values[i] / allowed);
      t.add({format_double(radii[i]), format_double(series.values[i]), format_double(series.bound(i)),
             format_double(series.errors[i]), format_double(local_slope(radii, series.values, i))});
    }
    write_atomic(out_dir / "growth.csv", render(t));

    double slope = series.fitted_slope;
    if (std::isnan(slope) && radii.size() >= 2) slope = fit_loglog_slope(series.radii, series.values);

    const SampleSet points = random_ball_points(config.dimension, kDivergencePoints, kDivergenceRadius, config.seed);
    const DivergenceCertificate cert = certify_divergence(fields, points, kDivergenceStep, config.hard_divergence);
    const Verdict divergence =
        config.hard_divergence
            ? Verdict{"divergence_order", cert.order >= kRichardsonFloor, cert.order, kRichardsonFloor}
            : Verdict{"divergence", cert.max_residual <= config.tol_divergence, cert.max_residual,
                      config.tol_divergence};

    log << "growth: N=" << config.dimension << " k=" << format_double(config.k) << " mode=" << to_string(mode)
        << "\n  fitted slope = " << format_double(slope) << "\n  C1 = " << format_double(series.C1)
        << "  C2 = " << format_double(series.C2) << '\n';
    if (slope > kContrapositiveSlope)
      log << "  fitted slope > 2: growth faster than R^2 leaves room for a nonconstant sigma\n";
    return finish({{"growth_bound", worst <= 1.0, worst, 1.0},
                   {"fitted_slope_gt_2", slope > kContrapositiveSlope, slope, kContrapositiveSlope},
                   divergence},
                  out_dir / "growth_summary.csv", log);
  });
}

int cmd_energy(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded("energy", log, [&] {
    config.validate();
    const int N = config.dimension;
    if (N > 3) throw ConfigError("energy requires dimension <= 3");
    const auto radii = config.radii();
    const Potential G = allen_cahn_potential();
    const ScalarField u = lift_1d(kink(), N);
    const auto ledgers = energy_ledgers(u, G, radii, config.quadrature());

    Table t;
    t.comments = {"dimension=" + std::to_string(N)};
    t.header = {"R", "dirichlet", "potential", "phi_R", "ratio", "deficit", "weighted_deficit"};
    double ratio_gap = 0.0;
    for (const auto& l : ledgers) {
      ratio_gap = std::max(ratio_gap, std::abs(l.ratio - 1.0));
      t.add({format_double(l.R), format_double(l.dirichlet), format_double(l.potential), format_double(l.phi_R),
             format_double(l.ratio), format_double(l.deficit), format_double(l.weighted_deficit)});
    }
    write_atomic(out_dir / "energy.csv", render(t));

    const SampleSet points = random_ball_points(N, kModicaPoints, radii.back(), config.seed);
    const double modica = modica_check(u, G, points);
    const double increment = ledgers.size() > 1 ? min_phi_increment(ledgers) : 0.0;

    // the kink's range lies in (-1, 1)
    const double edge = 1.0 - 1e-9;
    const auto H = hypothesis_H_constant(G, {-edge, edge}, 1001);
    if (!H) throw std::runtime_error("potential does not satisfy the concavity hypothesis");
    const double M = sample_potential_sup(u, G, radii.back());
    // Both checks need at least five radii spanning a factor of four; a
    // sparser grid is widened downward for the verdicts only.
    std::vector<EnergyLedger> check = ledgers;
    if (radii.size() < 5 || radii.back() < 4.0 * radii.front()) {
      const double lo = std::min(radii.front(), radii.back() / 4.0);
      std::vector<double> grid;
      for (int i = 0; i < kVerdictGridPoints; ++i)
        grid.push_back(lo * std::pow(radii.back() / lo, static_cast<double>(i) / (kVerdictGridPoints - 1)));
      check = energy_ledgers(u, G, grid, config.quadrature());
    }
    const DeficitBoundResult deficit = deficit_bound_check(check, N, H->K, M, kDeficitFloor);
    const LowerBoundResult lower = lower_bound_check(check);

    log << "energy: N=" << N << "\n  Phi(R_max) = " << format_double(ledgers.back().phi_R)
        << "\n  lower bound c = " << format_double(lower.c_measured) << " from R0 = " << format_double(lower.R0_measured)
        << '\n';
    return finish({{"modica", modica <= kModicaTolerance, modica, kModicaTolerance},
                   {"monotonicity", increment >= -kMonotoneTolerance, increment, -kMonotoneTolerance},
                   {"energy_ratio", ratio_gap <= kRatioTolerance, ratio_gap, kRatioTolerance},
                   {"deficit_bound_i", deficit.pass_i, deficit.C1_measured, deficit.C1_bound.value_or(kNaN)},
                   {"deficit_bound_ii", deficit.pass_ii, deficit.C2_measured, deficit.C2_bound.value_or(kNaN)},
                   {"lower_bound", lower.pass, lower.c_measured, 0.0}},
                  out_dir / "energy_summary.csv", log);
  });
}

int cmd_stability(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  return guarded("stability", log, [&] {
    config.validate();
    const int N = config.dimension;
    if (N > 2) throw ConfigError("stability requires dimension <= 2");
    const Potential G = allen_cahn_potential();
    const ScalarField u = lift_1d(kink(), N);
    const QuadratureSpec spec = config.quadrature();
    const auto corpus = random_test_functions(N, kCorpusSize, config.seed);

    Table t;
    t.comments = {"dimension=" + std::to_string(N), "seed=" + std::to_string(config.seed)};
    t.header = {"index", "kind", "support_radius", "Q", "identity_gap", "slack"};
    double max_gap = 0.0, min_Q = std::numeric_limits<double>::infinity(),
           min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& mu = corpus[i];
      const double Q = quadratic_form_Q(u, G, mu, spec);
      const double gap = lemma_identity_gap(u, G, mu, spec, config.mutation);
      const double slack = stability_inequality(u, G, mu, spec).slack;
      max_gap = std::max(max_gap, gap);
      min_Q = std::min(min_Q, Q);
      min_slack = std::min(min_slack, slack);
      t.add({std::to_string(i), mu.kind, format_double(mu.support_radius), format_double(Q), format_double(gap),
             format_double(slack)});
    }
    write_atomic(out_dir / "stability.csv", render(t));

    log << "stability: N=" << N << " corpus=" << corpus.size() << '\n';
    if (config.mutation != RhsMutation::none) log << "  right-hand side deliberately mutated\n";
    return finish({{"stability_identity", max_gap <= config.tol_identity, max_gap, config.tol_identity},
                   {"stability_inequality", min_slack >= -kStabilitySlack, min_slack, -kStabilitySlack},
                   {"kink_stable", min_Q >= -kStabilitySlack, min_Q, -kStabilitySlack}},
                  out_dir / "stability_summary.csv", log);
  });
}

int cmd_report(const RunConfig&, const fs::path& out_dir, std::ostream& log) {
  static const std::vector<std::string> required = {"growth.csv", "growth_summary.csv", "energy.csv",
                                                    "energy_summary.csv", "stability.csv", "stability_summary.csv"};
  std::vector<std::string> missing;
  for (const auto& name : required)
    if (!fs::exists(out_dir / name)) missing.push_back(name);
  if (!missing.empty()) {
    log << "report: missing input files:";
    for (const auto& m : missing) log << ' ' << m;
    log << '\n';
    return exit_code::config_error;
  }
  return guarded("report", log, [&] {
    std::map<std::string, Verdict> all;
    for (const char* name : {"growth_summary.csv", "energy_summary.csv", "stability_summary.csv"})
      all.merge(read_summary(out_dir / name));

    // (claim, source row)
    static const std::vector<std::pair<std::string, std::string>> rows = {
        {"growth bound of (phi sigma)^2", "growth_bound"},
        {"Modica gradient bound", "modica"},
        {"monotonicity of Phi(R)", "monotonicity"},
        {"stability identity", "stability_identity"},
        {"Dirichlet lower bound", "lower_bound"},
        {"energy ratio -> 1", "energy_ratio"},
        {"weighted deficit bound", "deficit_bound_i"},
        {"deficit bound", "deficit_bound_ii"},
        {"fitted slope > 2", "fitted_slope_gt_2"},
    };
    std::vector<Verdict> table;
    for (const auto& [label, key] : rows) {
      const auto it = all.find(key);
      if (it == all.end()) throw std::runtime_error("summary row '" + key + "' missing");
      Verdict v = it->second;
      v.claim = label;
      table.push_back(v);
    }
    log << "report:\n";
    return finish(table, out_dir / "report.csv", log);
  });
}

// --- command line -------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical checks for a Liouville-type theorem and its growth counterexample", "liouville_lab"};
  app.require_subcommand(1, 1);

  std::string config_path, mode, out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> settings;
  bool hard = false, mutate = false;
  app.add_option("--config", config_path, "flat key=value configuration file");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--mode", mode, "growth integration mode")->check(CLI::IsMember({"ball", "slab", "auto"}));
  app.add_flag("--hard-divergence", hard, "certify the divergence with nested finite differences");
  app.add_flag("--mutate-rhs", mutate, "corrupt the stability identity (expected to fail)");
  app.add_option("--set", settings, "override one config key, key=value");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&, const fs::path&, std::ostream&);
  };
  static const Command commands[] = {
      {"construct", "solve the bridge amplitude and tabulate the profile", cmd_construct},
      {"growth", "growth of (phi sigma)^2 and divergence certification", cmd_growth},
      {"energy", "energy identities of the lifted kink", cmd_energy},
      {"stability", "stability identity on a seeded test-function corpus", cmd_stability},
      {"report", "aggregate the verdicts", cmd_report},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::config_error;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      apply_setting(config, std::string_view(s).substr(0, eq), std::string_view(s).substr(eq + 1));
    }
    if (seed) config.seed = *seed;
    if (!mode.empty()) config.mode = mode;
    config.hard_divergence = hard;
    if (mutate) config.mutation = RhsMutation::flip_deficit_sign;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  for (const auto& c : commands)
    if (app.got_subcommand(c.name)) return c.run(config, out_dir, out);
  return exit_code::config_error;
}

}  // namespace liouville

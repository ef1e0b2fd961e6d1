#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"
#include "expertgame/game_sim.hpp"
#include "expertgame/game_solver.hpp"
#include "expertgame/rbm_sim.hpp"
#include "expertgame/verify.hpp"

namespace expertgame::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Appends every key of the --config JSON object that is not already given
// on the command line, so flags win over the file.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    const bool given = std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    auto token = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return fmt(v.get<double>());
      throw UsageError("config key '" + key + "' has an unsupported value");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(token(v));
    } else {
      args.push_back(flag);
      args.push_back(token(value));
    }
  }
  return args;
}

struct Globals {
  bool json_out = false;
  int threads = 1;
  std::string config;
};

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::vector<std::string>& argv, const json& params,
                    double seconds, const std::vector<std::string>& outputs) {
  json m{{"command", command},
         {"argv", argv},
         {"parameters", params},
         {"version", EXPERTGAME_VERSION},
         {"started_utc", utc_now()},
         {"wall_clock_seconds", seconds},
         {"outputs", outputs}};
  if (params.contains("seed")) m["seed"] = params["seed"];
  std::ofstream f(out_path + ".manifest.json");
  f << m.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  return f;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string fn;
  std::vector<double> point;
  double tol = 1e-9;
};

void require_dim(const EvalArgs& a, std::size_t n) {
  if (a.point.size() != n)
    throw UsageError("eval " + a.fn + ": expected " + std::to_string(n) +
                     " coordinates, got " + std::to_string(a.point.size()));
}

int cmd_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
  for (double v : a.point)
    if (!std::isfinite(v)) throw UsageError("eval: non-finite coordinate");
  json j{{"function", a.fn}, {"point", a.point}};
  std::ostringstream text;
  auto scalar = [&](double v) {
    j["value"] = v;
    text << fmt(v) << '\n';
  };
  auto state = [&]() { return RegretState(std::span<const double>(a.point)); };
  const std::string& f = a.fn;
  if (f == "u4") { require_dim(a, 4); scalar(u4(state())); }
  else if (f == "u3") { require_dim(a, 3); scalar(u3(state())); }
  else if (f == "u2") { require_dim(a, 2); scalar(u2(state())); }
  else if (f == "phi") {
    if (a.point.size() < 2 || a.point.size() > 4) throw UsageError("eval phi: 2 to 4 coordinates");
    scalar(phi(state()));
  } else if (f == "taylor") { require_dim(a, 4); scalar(taylor_u4_origin(state())); }
  else if (f == "v3") { require_dim(a, 3); scalar(v3(GapVector(std::span<const double>(a.point)))); }
  else if (f == "V2d") { require_dim(a, 2); scalar(V2d(a.point[0], a.point[1])); }
  else if (f == "V1") { require_dim(a, 1); scalar(V1_fn(a.point[0])); }
  else if (f == "V2") { require_dim(a, 1); scalar(V2_fn(a.point[0])); }
  else if (f == "f") { require_dim(a, 2); scalar(f_fn(a.point[0], a.point[1])); }
  else if (f == "r1") { require_dim(a, 2); scalar(r1_fn(a.point[0], a.point[1])); }
  else if (f == "h") { require_dim(a, 2); scalar(h_fn(a.point[0], a.point[1])); }
  else if (f == "r2") { require_dim(a, 2); scalar(r2_fn(a.point[0], a.point[1])); }
  else if (f == "grad") {
    const RegretState x = state();
    const Vec4 gr = x.size() == 4 ? u4_grad(x) : continuum_grad(x);
    std::vector<double> v(gr.begin(), gr.begin() + x.size());
    j["value"] = v;
    for (std::size_t i = 0; i < v.size(); ++i) text << (i ? " " : "") << fmt(v[i]);
    text << '\n';
  } else if (f == "hess") {
    require_dim(a, 4);
    const Mat4 h = u4_hess(state());
    json rows = json::array();
    for (const auto& r : h) {
      rows.push_back(std::vector<double>(r.begin(), r.end()));
      for (int i = 0; i < 4; ++i) text << (i ? " " : "") << fmt(r[i]);
      text << '\n';
    }
    j["value"] = rows;
  } else if (f == "comb") {
    require_dim(a, 4);
    const CombChoice c = comb_choice(state());
    const std::string s = "{" + std::to_string(c.leader + 1) + "," +
                          std::to_string(c.second + 1) + "}";
    j["value"] = s;
    j["leader"] = c.leader + 1;
    j["second"] = c.second + 1;
    text << s << '\n';
  } else if (f == "argmax") {
    require_dim(a, 4);
    const auto sets = hamiltonian_argmax(state(), a.tol);
    json v = json::array();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      v.push_back(sets[i].to_string());
      text << (i ? " " : "") << sets[i].to_string();
    }
    text << '\n';
    j["value"] = v;
    j["tol"] = a.tol;
  } else {
    throw UsageError("eval: unknown function '" + f +
                     "'; valid: u4, u3, u2, v3, V2d, V1, V2, f, r1, h, r2, grad, "
                     "hess, comb, argmax, phi, taylor");
  }
  if (g.json_out) out << j.dump(2) << '\n';
  else out << text.str();
  return kOk;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  int n = 4;
  double delta = 0.04;
  int radius = 0;
  double tol = 1e-8;
  std::string game = "minimax";
  std::string out;
};

int cmd_solve(const SolveArgs& a, const Globals& g, const std::vector<std::string>& argv,
              std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const int radius = a.radius > 0 ? a.radius : default_radius(a.delta);
  SolveOptions so;
  so.tol = a.tol;
  so.threads = g.threads;
  ValueGrid grid;
  if (a.game == "minimax") {
    grid = solve_vdelta(a.n, StoppingParam(a.delta), radius, so);
  } else if (a.game == "balanced_comb") {
    if (a.n != 4) throw UsageError("solve --game balanced_comb requires --n 4");
    grid = solve_underline_u(StoppingParam(a.delta), radius, so);
  } else {
    throw UsageError("solve: unknown game '" + a.game + "'; valid: minimax, balanced_comb");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::vector<long long> zero(a.n, 0);
  const double v0 = std::sqrt(a.delta) * grid.lattice_value(zero);
  const double target = continuum_value(RegretState(std::vector<double>(a.n, 0.0)));
  json summary{{"n", a.n},         {"delta", a.delta},          {"radius", radius},
               {"tol", a.tol},     {"game", a.game},            {"iterations", grid.iterations},
               {"last_change", grid.last_change}, {"rescaled_origin", v0},
               {"limit_origin", target}, {"error", v0 - target}};
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << json(grid).dump() << '\n';
    f.close();
    json params{{"n", a.n}, {"delta", a.delta}, {"radius", radius}, {"tol", a.tol},
                {"game", a.game}, {"threads", g.threads}};
    write_manifest(a.out, "solve", argv, params, secs, {a.out});
    summary["out"] = a.out;
  }
  if (g.json_out) {
    out << summary.dump(2) << '\n';
  } else {
    out << "n=" << a.n << " delta=" << fmt(a.delta) << " radius=" << radius
        << " iterations=" << grid.iterations << '\n'
        << "sqrt(delta)*V(0) = " << fmt(v0) << '\n'
        << "limit u(0)       = " << fmt(target) << '\n'
        << "error            = " << fmt(v0 - target) << '\n';
  }
  return kOk;
}

// ---- simulate -------------------------------------------------------------

struct GameArgs {
  double delta = 0.04;
  std::vector<double> x0;
  int n = 4;
  std::int64_t episodes = 10000;
  std::uint64_t seed = 1;
  std::string nature = "balanced_comb";
  std::vector<double> nature_table;
  std::string player = "gradient_u";
  double eta = 1.0;
  std::string out;
};

int cmd_simulate_game(const GameArgs& a, const Globals& g,
                      const std::vector<std::string>& argv, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig cfg;
  cfg.delta = a.delta;
  std::vector<double> x0 = a.x0.empty() ? std::vector<double>(a.n, 0.0) : a.x0;
  cfg.x0 = RegretState(std::span<const double>(x0));
  cfg.n_episodes = a.episodes;
  cfg.seed = a.seed;
  cfg.threads = g.threads;
  if (a.nature == "custom") {
    cfg.nature = NaturePolicy::custom(cfg.x0.size(), a.nature_table);
  } else {
    cfg.nature = parse_nature(a.nature, cfg.x0.size());
  }
  cfg.player = parse_player(a.player, a.eta);
  const SimResult r = estimate_regret(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string csv = SimResult::csv_header() + "\n" + r.csv_row() + "\n";
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << csv;
    f.close();
    json params = json(r);
    params["threads"] = g.threads;
    if (a.player == "mw") params["eta"] = a.eta;
    write_manifest(a.out, "simulate game", argv, params, secs, {a.out});
  }
  if (g.json_out) {
    json j = r;
    j["sqrt_delta_mean"] = std::sqrt(a.delta) * r.mean;
    out << j.dump(2) << '\n';
  } else if (a.out.empty()) {
    out << csv;
  } else {
    out << "mean regret = " << fmt(r.mean) << " +- " << fmt(r.std_error) << '\n';
  }
  return kOk;
}

struct RbmArgs {
  std::vector<double> y0;
  double dt = 1e-3;
  double horizon = 12.0;
  std::int64_t paths = 20000;
  std::uint64_t seed = 1;
  std::string out;
  std::string trace;
};

int cmd_simulate_rbm(const RbmArgs& a, const Globals& g,
                     const std::vector<std::string>& argv, std::ostream& out) {
  if (a.y0.size() != 2 && a.y0.size() != 3)
    throw UsageError("simulate rbm: --y0 needs 2 or 3 values");
  const auto t0 = std::chrono::steady_clock::now();
  McOptions o;
  o.dt = a.dt;
  o.horizon = a.horizon;
  o.n_paths = a.paths;
  o.seed = a.seed;
  o.threads = g.threads;
  const bool three = a.y0.size() == 3;
  const McEstimate e = three ? estimate_v_mc(GapVector(std::span<const double>(a.y0)), o)
                             : estimate_V_mc(a.y0[0], a.y0[1], o);
  const double exact = three ? v3(GapVector(std::span<const double>(a.y0)))
                             : V2d(a.y0[0], a.y0[1]);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream csv;
  csv << "y0,dt,horizon,n,mean,stderr,seed,closed_form\n";
  for (std::size_t i = 0; i < a.y0.size(); ++i) csv << (i ? " " : "") << fmt(a.y0[i]);
  csv << ',' << fmt(a.dt) << ',' << fmt(a.horizon) << ',' << a.paths << ','
      << fmt(e.mean) << ',' << fmt(e.std_error) << ',' << a.seed << ',' << fmt(exact)
      << '\n';
  std::vector<std::string> outputs;
  if (!a.trace.empty()) {
    auto f = open_out(a.trace);
    const ReflectionSpec spec = three ? ReflectionSpec::default3() : ReflectionSpec::default2();
    write_path_csv(f, a.y0, spec, o, std::max(1, static_cast<int>(std::lround(0.01 / a.dt))));
    outputs.push_back(a.trace);
  }
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << csv.str();
    f.close();
    outputs.insert(outputs.begin(), a.out);
    json params{{"y0", a.y0},     {"dt", a.dt},     {"horizon", a.horizon},
                {"paths", a.paths}, {"seed", a.seed}, {"threads", g.threads}};
    write_manifest(a.out, "simulate rbm", argv, params, secs, outputs);
  }
  if (g.json_out) {
    json j = e;
    j["y0"] = a.y0;
    j["seed"] = a.seed;
    j["closed_form"] = exact;
    out << j.dump(2) << '\n';
  } else if (a.out.empty()) {
    out << csv.str();
  } else {
    out << "estimate = " << fmt(e.mean) << " +- " << fmt(e.std_error)
        << " (closed form " << fmt(exact) << ")\n";
  }
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  bool quick = false;
  std::uint64_t seed = SuiteOptions{}.seed;
  std::string out;
};

int cmd_verify(const VerifyArgs& a, const Globals& g, const std::vector<std::string>& argv,
               std::ostream& out) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), a.suite) == names.end()) {
    std::string valid;
    for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
    throw UsageError("verify: unknown suite '" + a.suite + "'; valid: " + valid);
  }
  const auto t0 = std::chrono::steady_clock::now();
  SuiteOptions so;
  so.quick = a.quick;
  so.threads = g.threads;
  so.seed = a.seed;
  const auto reports = run_suite(a.suite, so);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.pass;
  json doc{{"suite", a.suite}, {"quick", a.quick}, {"pass", ok}, {"checks", reports}};
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << doc.dump(2) << '\n';
    f.close();
    json params{{"suite", a.suite}, {"quick", a.quick}, {"seed", a.seed},
                {"threads", g.threads}};
    write_manifest(a.out, "verify", argv, params, secs, {a.out});
  }
  if (g.json_out) out << doc.dump(2) << '\n';
  else print_summary(out, reports);
  return ok ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& argv_in, std::ostream& out, std::ostream& err) {
  std::vector<std::string> argv;
  try {
    argv = merge_config(argv_in);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  CLI::App app{"Expert-advice game laboratory: closed forms, solver, simulators, checks",
               "expertgame"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(EXPERTGAME_VERSION));
  Globals g;
  app.add_flag("--json", g.json_out, "Machine-readable output");
  app.add_option("--threads", g.threads, "Worker threads (default 1)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--config", g.config, "JSON file of defaults; flags win");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a closed-form function");
  eval->add_option("function", ea.fn, "u4 u3 u2 v3 V2d V1 V2 f r1 h r2 grad hess comb argmax phi taylor")
      ->required();
  eval->add_option("point", ea.point, "Coordinates")->required()->allow_extra_args();
  eval->add_option("--tol", ea.tol, "Tolerance for argmax");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Value iteration on the truncated lattice");
  solve->add_option("--n", sa.n, "Number of experts (2, 3 or 4)");
  solve->add_option("--delta", sa.delta, "Stopping parameter in (0, 1]");
  solve->add_option("--radius", sa.radius, "Truncation radius (default ceil(8/sqrt(delta)))");
  solve->add_option("--tol", sa.tol, "Sup-norm stopping tolerance");
  solve->add_option("--game", sa.game, "minimax or balanced_comb");
  solve->add_option("--out", sa.out, "Write the grid as JSON");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation");
  simulate->require_subcommand(1);
  GameArgs ga;
  auto* game = simulate->add_subcommand("game", "Discrete game with geometric stopping");
  game->add_option("--delta", ga.delta, "Stopping parameter");
  game->add_option("--n", ga.n, "Number of experts when --x0 is omitted");
  game->add_option("--x0", ga.x0, "Initial regret state");
  game->add_option("--episodes", ga.episodes, "Number of episodes");
  game->add_option("--seed", ga.seed, "Base seed");
  game->add_option("--nature", ga.nature, "balanced_comb, pure_comb, fixed:<labels>, custom");
  game->add_option("--nature-table", ga.nature_table, "Custom nature: 2^N weights over ranked masks");
  game->add_option("--player", ga.player, "gradient_u, uniform, follow_leader, mw");
  game->add_option("--eta", ga.eta, "Learning rate of the mw player");
  game->add_option("--out", ga.out, "CSV output path");
  RbmArgs ra;
  auto* rbm = simulate->add_subcommand("rbm", "Reflected Brownian motion local time");
  rbm->add_option("--y0", ra.y0, "Start point (2 or 3 gaps)")->required();
  rbm->add_option("--dt", ra.dt, "Time step");
  rbm->add_option("--horizon", ra.horizon, "Time horizon");
  rbm->add_option("--paths", ra.paths, "Number of paths");
  rbm->add_option("--seed", ra.seed, "Base seed");
  rbm->add_option("--out", ra.out, "CSV output path");
  rbm->add_option("--trace", ra.trace, "CSV dump of the first path");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", va.suite, "hjb vpde reflections hyperbolic combgaps regularity convergence all")
      ->required();
  verify->add_flag("--quick", va.quick, "Smaller samples and radii");
  verify->add_option("--seed", va.seed, "Seed for random sample points");
  verify->add_option("--out", va.out, "Report JSON path");

  std::vector<const char*> cargv;
  for (const auto& s : argv) cargv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << EXPERTGAME_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (eval->parsed()) return cmd_eval(ea, g, out);
    if (solve->parsed()) return cmd_solve(sa, g, argv, out);
    if (game->parsed()) return cmd_simulate_game(ga, g, argv, out);
    if (rbm->parsed()) return cmd_simulate_rbm(ra, g, argv, out);
    if (verify->parsed()) return cmd_verify(va, g, argv, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kCheckFailed;
  }
  err << "error: no command\n";
  return kUsage;
}

}  // namespace expertgame::cli

#include "commands.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "actplace/serialization.hpp"
#include "actplace/verify.hpp"

namespace actplace::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::infeasible:
      return exit_infeasible;
    case ErrorKind::certification:
      return exit_certification;
    default:
      return exit_invalid;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void configure_threads(std::ostream& err) {
  const char* raw = std::getenv(threads_env);
  if (raw == nullptr || *raw == '\0') return;
  char* end = nullptr;
  const long count = std::strtol(raw, &end, 10);
  if (*end != '\0' || count < 1) {
    err << "warning: ignoring " << threads_env << "='" << raw << "'\n";
    return;
  }
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(count));
#endif
}

// Where the Gramians come from: a cache, a descriptor file, or a shorthand.
struct Source {
  std::string gramian_file;
  std::string instance_file;
  int chain = 0;
  int er = 0;
  std::uint64_t seed = 1;
  std::string method;

  void attach(CLI::App& app, bool allow_cache = true) {
    if (allow_cache) app.add_option("--gramians,-g", gramian_file, "Gramian cache written by 'gramians'");
    app.add_option("--instance,-i", instance_file, "instance descriptor (JSON)");
    app.add_option("--chain", chain, "integrator chain with N nodes, horizon [0,1]");
    app.add_option("--er", er, "Erdos-Renyi network with N nodes (see --seed)");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--method", method, "Gramian type: finite | infinite")
        ->check(CLI::IsMember({"finite", "infinite", "finite-horizon", "infinite-horizon"}));
  }

  Json descriptor() const {
    const int given = !instance_file.empty() + (chain > 0) + (er > 0);
    if (given != 1) throw Error(ErrorKind::invalid_input, "give exactly one of --gramians, --instance, --chain, --er");
    if (!instance_file.empty()) return read_json_file(instance_file);
    if (chain > 0) return {{"type", "chain"}, {"n", chain}};
    return {{"type", "er"}, {"n", er}, {"seed", seed}};
  }

  LinearSystem system() const {
    LinearSystem sys = system_from_descriptor(descriptor());
    if (method.empty()) return sys;
    if (gramian_method_from_string(method) == GramianMethod::infinite_horizon)
      return sys.with_horizon(InfiniteHorizon{});
    return sys.is_finite_horizon() ? sys : sys.with_horizon(FiniteHorizon{0.0, 1.0});
  }

  std::pair<NodeGramianSet, Json> load() const {
    if (!gramian_file.empty()) {
      if (!instance_file.empty() || chain > 0 || er > 0)
        throw Error(ErrorKind::invalid_input, "--gramians cannot be combined with another instance source");
      const Json doc = read_json_file(gramian_file);
      NodeGramianSet g = gramians_from_json(doc);
      if (!method.empty() && gramian_method_from_string(method) != g.method())
        throw Error(ErrorKind::invalid_input, "--method disagrees with the cached Gramians");
      return {std::move(g), doc.value("instance", Json::object())};
    }
    Json desc = descriptor();
    if (!method.empty()) desc["method"] = to_string(gramian_method_from_string(method));
    return {node_gramians(system()), std::move(desc)};
  }
};

struct Output {
  std::string path;
  void attach(CLI::App& app) { app.add_option("--out,-o", path, "output file (default: stdout)"); }
  void emit(std::ostream& out, const std::string& text) const {
    if (path.empty())
      out << text;
    else
      write_text_file(path, text);
  }
};

std::string join_one_based(const ActuatorSet& set) {
  std::string s;
  for (const int i : set.one_based()) s += (s.empty() ? "" : ";") + std::to_string(i);
  return s;
}

ActuatorSet parse_set(const std::string& text, int n) {
  std::vector<int> nodes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      nodes.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::invalid_input, "bad node index '" + item + "'");
    }
  }
  return ActuatorSet::from_one_based(n, nodes);
}

const char* status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::infeasible:
      return "infeasible";
    case ErrorKind::certification:
      return "certification";
    default:
      return "invalid";
  }
}

// ---------------------------------------------------------------- gramians

struct GramiansCmd {
  Source source;
  Output output;

  void attach(CLI::App& app) {
    source.attach(app, false);
    output.attach(app);
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    const auto [g, desc] = source.load();
    output.emit(out, gramians_to_json(g, desc).dump(1) + "\n");
    double worst = 0.0;
    for (const double r : g.residuals()) worst = std::max(worst, r);
    err << "n = " << g.n() << ", " << to_string(g.method()) << ", tr(W_V^-1) = "
        << format_real(energy_metric(g, ActuatorSet::all(g.n()), 0.0)) << ", max residual = " << worst << ", "
        << seconds_since(start) << " s\n";
    return exit_ok;
  }
};

// ---------------------------------------------------------------- place-min

struct PlaceMinCmd {
  Source source;
  Output output;
  std::optional<double> E;
  std::optional<double> E_factor;
  double c = 1e-4;
  double a0 = 1e-4;
  double eps = 0.0;
  bool lazy = false;
  std::string solver = "bisection";
  int sweep = 0;

  void attach(CLI::App& app) {
    source.attach(app);
    output.attach(app);
    app.add_option("--E", E, "energy bound");
    app.add_option("--E-factor,-k", E_factor, "energy bound as a multiple of tr(W_V^-1)");
    app.add_option("--c", c, "allowed relative excess over E")->check(CLI::PositiveNumber);
    app.add_option("--a0", a0, "initial bisection accuracy on eps")->check(CLI::PositiveNumber);
    app.add_option("--eps", eps, "run the plain greedy at this eps (0 < eps <= 1/E)");
    app.add_flag("--lazy", lazy, "lazy marginal-gain evaluation");
    app.add_option("--solver", solver, "bisection | greedy | brute")
        ->check(CLI::IsMember({"bisection", "greedy", "brute"}));
    app.add_option("--sweep", sweep, "CSV sweep over E = 2^j tr(W_V^-1), j = 1..K")->check(CLI::Range(1, 1000));
  }

  std::string effective_solver() const { return eps > 0.0 && solver == "bisection" ? "greedy" : solver; }

  PlacementResult place(const NodeGramianSet& g, double bound, Exec exec) const {
    const GreedyOptions options{lazy, exec};
    const std::string which = effective_solver();
    if (which == "greedy") return greedy_min_actuators(g, bound, eps > 0.0 ? eps : 1.0 / bound, options);
    return min_actuators_bounded_energy(g, bound, c, a0, options);
  }

  Json parameters(double bound) const {
    Json p = {{"E", bound}, {"c", c}, {"a0", a0}, {"lazy", lazy}};
    if (eps > 0.0) p["eps"] = eps;
    return p;
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    const auto [g, desc] = source.load();
    const double floor = energy_metric(g, ActuatorSet::all(g.n()), 0.0);
    if (sweep > 0) return run_sweep(g, floor, out);

    if (E.has_value() == E_factor.has_value()) throw Error(ErrorKind::invalid_input, "give exactly one of --E, --E-factor");
    const double bound = E ? *E : *E_factor * floor;
    RunRecord record;
    record.instance = desc;
    record.n = g.n();
    record.gramian_method = to_string(g.method());
    record.solver = effective_solver() == "brute" ? "brute-force-min-actuators"
                    : effective_solver() == "greedy" ? "greedy-min-actuators"
                                                     : "bounded-energy-bisection";
    record.parameters = parameters(bound);
    if (effective_solver() == "brute") {
      record.oracle = brute_force_min_actuators(g, bound, eps);
      if (!record.oracle->feasible) {
        std::ostringstream msg;
        msg << "no subset meets E = " << format_real(bound);
        throw InfeasibleError(msg.str(), floor);
      }
    } else {
      record.placement = place(g, bound, Exec::parallel);
    }
    record.wall_time_s = seconds_since(start);
    output.emit(out, to_json(record).dump(2) + "\n");
    const ActuatorSet& chosen = record.placement ? record.placement->delta : record.oracle->optimal_set;
    err << "delta = " << chosen.to_string() << " (" << chosen.size() << " of " << g.n() << ")\n";
    return exit_ok;
  }

  int run_sweep(const NodeGramianSet& g, double floor, std::ostream& out) const {
    struct Row {
      std::string status = "ok";
      std::optional<PlacementResult> result;
    };
    std::vector<Row> rows(static_cast<std::size_t>(sweep));
    // Points run concurrently; each solver is then serial inside.
    for_each_index(Exec::parallel, rows.size(), [&](std::size_t j) {
      const double k = std::ldexp(1.0, static_cast<int>(j) + 1);
      try {
        rows[j].result = place(g, k * floor, Exec::serial);
      } catch (const Error& e) {
        rows[j].status = status_of(e.kind());
      }
    });
    std::ostringstream csv;
    csv << "n,k,E,status,cardinality,delta,metric_exact,metric_eps,eps,bound_F,controllable\n";
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const double k = std::ldexp(1.0, static_cast<int>(j) + 1);
      csv << g.n() << ',' << format_real(k) << ',' << format_real(k * floor) << ',' << rows[j].status;
      if (const auto& r = rows[j].result) {
        csv << ',' << r->delta.size() << ',' << join_one_based(r->delta) << ',' << format_real(r->metric_exact) << ','
            << format_real(r->metric_eps) << ',' << format_real(r->eps_used) << ','
            << (r->bound_F ? format_real(*r->bound_F) : "") << ',' << (r->controllable ? 1 : 0);
      } else {
        csv << ",,,,,,,";
      }
      csv << '\n';
    }
    output.emit(out, csv.str());
    return exit_ok;
  }
};

// ---------------------------------------------------------------- place-budget

struct PlaceBudgetCmd {
  Source source;
  Output output;
  int r = 0;
  int sweep = 0;
  std::string delta_c;
  double c = 1e-4;
  double a0 = 1e-4;
  double a0p = 1e-4;
  double eps = 0.0;
  int l = 0;
  bool lazy = false;
  std::string solver = "bisection";

  void attach(CLI::App& app) {
    source.attach(app);
    output.attach(app);
    app.add_option("--r", r, "actuator budget")->check(CLI::PositiveNumber);
    app.add_option("--sweep", sweep, "CSV sweep over r = 1..R")->check(CLI::PositiveNumber);
    app.add_option("--delta-c", delta_c, "controllable seed set, e.g. 1,3 (default: found automatically)");
    app.add_option("--c", c, "allowed relative excess in the inner search")->check(CLI::PositiveNumber);
    app.add_option("--a0", a0, "initial bisection accuracy on eps")->check(CLI::PositiveNumber);
    app.add_option("--a0p", a0p, "bisection accuracy on E")->check(CLI::PositiveNumber);
    app.add_option("--eps", eps, "perturbation for the naive and brute-force solvers");
    app.add_option("--l", l, "naive greedy step count (default r)");
    app.add_flag("--lazy", lazy, "lazy marginal-gain evaluation");
    app.add_option("--solver", solver, "bisection | naive | brute")
        ->check(CLI::IsMember({"bisection", "naive", "brute"}));
  }

  ActuatorSet seed_set(const NodeGramianSet& g) const {
    if (!delta_c.empty()) return parse_set(delta_c, g.n());
    return controllable_seed_set(g, c, a0, {lazy, Exec::parallel});
  }

  void solve(const NodeGramianSet& g, int budget, const std::optional<ActuatorSet>& seed, Exec exec,
             RunRecord& record) const {
    if (solver == "brute") {
      record.oracle = brute_force_min_energy(g, budget, eps, exec);
    } else if (solver == "naive") {
      if (!(eps > 0.0)) throw Error(ErrorKind::parameter, "the naive solver needs --eps > 0");
      record.placement = naive_budget_greedy(g, budget, eps, l > 0 ? l : budget, {lazy, exec});
    } else {
      record.placement = min_energy_budgeted(g, budget, *seed, c, a0, a0p, {lazy, exec});
    }
  }

  int run(std::ostream& out, std::ostream& err) const {
    const auto start = Clock::now();
    const auto [g, desc] = source.load();
    if ((r > 0) == (sweep > 0)) throw Error(ErrorKind::invalid_input, "give exactly one of --r, --sweep");
    std::optional<ActuatorSet> seed;
    if (solver == "bisection") seed = seed_set(g);
    const Json params = {{"c", c}, {"a0", a0}, {"a0p", a0p}, {"lazy", lazy}, {"eps", eps}, {"l", l},
                         {"delta_c", seed ? to_json(*seed) : Json(nullptr)}};

    if (sweep > 0) {
      std::vector<RunRecord> records(static_cast<std::size_t>(sweep));
      std::vector<std::string> status(records.size(), "ok");
      for_each_index(Exec::parallel, records.size(), [&](std::size_t j) {
        try {
          solve(g, static_cast<int>(j) + 1, seed, Exec::serial, records[j]);
        } catch (const Error& e) {
          status[j] = status_of(e.kind());
        }
      });
      std::ostringstream csv;
      csv << "n,r,status,cardinality,delta,metric_exact,E_used,controllable\n";
      for (std::size_t j = 0; j < records.size(); ++j) {
        csv << g.n() << ',' << j + 1 << ',' << status[j];
        const RunRecord& rec = records[j];
        if (rec.placement) {
          const auto& p = *rec.placement;
          csv << ',' << p.delta.size() << ',' << join_one_based(p.delta) << ',' << format_real(p.metric_exact) << ','
              << format_real(p.E_used) << ',' << (p.controllable ? 1 : 0);
        } else if (rec.oracle) {
          const auto& o = *rec.oracle;
          csv << ',' << o.optimal_set.size() << ',' << join_one_based(o.optimal_set) << ','
              << format_real(o.optimal_value) << ",," << (std::isfinite(o.optimal_value) ? 1 : 0);
        } else {
          csv << ",,,,,";
        }
        csv << '\n';
      }
      output.emit(out, csv.str());
      return exit_ok;
    }

    RunRecord record;
    record.instance = desc;
    record.n = g.n();
    record.gramian_method = to_string(g.method());
    record.solver = solver == "brute" ? "brute-force-min-energy" : solver == "naive" ? "naive-budget-greedy"
                                                                                  : "budgeted-energy-bisection";
    record.parameters = params;
    record.parameters["r"] = r;
    solve(g, r, seed, Exec::parallel, record);
    record.wall_time_s = seconds_since(start);
    output.emit(out, to_json(record).dump(2) + "\n");
    if (record.placement)
      err << "delta = " << record.placement->delta.to_string() << ", tr(W^-1) = "
          << format_real(record.placement->metric_exact) << "\n";
    else
      err << "delta = " << record.oracle->optimal_set.to_string() << ", value = "
          << format_real(record.oracle->optimal_value) << "\n";
    return exit_ok;
  }
};

// ---------------------------------------------------------------- verify

struct VerifyCmd {
  Source source;
  Output output;
  std::vector<std::string> suites{"all"};
  VerifyOptions options;

  void attach(CLI::App& app) {
    source.attach(app);
    output.attach(app);
    app.add_option("--suite", suites, "supermodularity | oracle | fact1 | fact2 | all")
        ->check(CLI::IsMember({"supermodularity", "oracle", "fact1", "fact2", "all"}));
    app.add_option("--triples", options.triples, "supermodularity samples");
    app.add_option("--eps", options.eps, "perturbation (default 0.05 tr(W_V)/n)");
    app.add_option("--c", options.c)->check(CLI::PositiveNumber);
    app.add_option("--a0", options.a0)->check(CLI::PositiveNumber);
    app.add_option("--r", options.r, "fact2 budget")->check(CLI::PositiveNumber);
    app.add_option("--l", options.l, "fact2 steps")->check(CLI::PositiveNumber);
  }

  int run(std::ostream& out, std::ostream& err) {
    options.seed = source.seed;
    const auto [g, desc] = source.load();
    std::vector<std::string> plan;
    for (const auto& s : suites) {
      if (s != "all") {
        plan.push_back(s);
        continue;
      }
      plan.push_back("supermodularity");
      if (g.n() <= 12)
        for (const char* name : {"oracle", "fact1", "fact2"}) plan.emplace_back(name);
    }
    Json reports = Json::array();
    bool passed = true;
    for (const auto& s : plan) {
      const VerifyReport report = run_verify_suite(s, g, options);
      passed = passed && report.passed;
      reports.push_back(report.to_json());
      err << s << ": " << (report.passed ? "pass" : "FAIL") << " (" << report.checks << " checks)\n";
    }
    output.emit(out, Json{{"instance", desc}, {"passed", passed}, {"suites", reports}}.dump(2) + "\n");
    return exit_ok;
  }
};

// ---------------------------------------------------------------- bench

struct BenchCmd {
  std::string out_dir = "bench_out";
  std::vector<int> sizes{10, 40};
  std::uint64_t seed = 1;
  int k_max = 50;
  int r_max = 5;
  double c = 0.1;
  double a0 = 1.0;
  double a0p = 1.0;
  bool lazy = true;

  void attach(CLI::App& app) {
    app.add_option("--out-dir", out_dir, "directory for the result files");
    app.add_option("--sizes", sizes, "random network sizes")->delimiter(',');
    app.add_option("--seed", seed, "random seed");
    app.add_option("--k-max", k_max, "largest j in E = 2^j tr(W_V^-1)")->check(CLI::Range(1, 1000));
    app.add_option("--r-max", r_max, "largest budget")->check(CLI::PositiveNumber);
    app.add_option("--c", c)->check(CLI::PositiveNumber);
    app.add_option("--a0", a0)->check(CLI::PositiveNumber);
    app.add_option("--a0p", a0p)->check(CLI::PositiveNumber);
    app.add_option("--lazy", lazy, "lazy greedy (default true)");
  }

  int run(std::ostream& out, std::ostream& err) const {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    Json summary = {{"tool_version", tool_version}, {"out_dir", out_dir}, {"seed", seed}};
    std::ostringstream sink;
    const auto call = [&](std::vector<std::string> args) {
      const int code = cli::run(args, sink, err);
      if (code != exit_ok) throw Error(ErrorKind::certification, "bench step failed: " + args.front());
    };
    const auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

    // Integrator chain with the default accuracies.
    auto start = Clock::now();
    const NodeGramianSet chain = finite_horizon_node_gramians(chain_network(5));
    Json chain_values = Json::object();
    for (const auto& set : {std::vector<int>{1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}})
      chain_values[ActuatorSet::from_one_based(5, set).to_string()] =
          energy_metric(chain, ActuatorSet::from_one_based(5, set), 0.0);
    const double e15 = energy_metric(chain, ActuatorSet::from_one_based(5, {1, 5}), 0.0);
    call({"place-min", "--chain", "5", "--E", format_real(e15), "--out", path("chain_place_min.json")});
    call({"place-budget", "--chain", "5", "--sweep", "5", "--out", path("chain_place_budget.csv")});
    summary["chain"] = {{"trace_inverse", chain_values}, {"wall_time_s", seconds_since(start)}};

    // Random networks, swept like the figures.
    const std::string cs = format_real(c), as = format_real(a0), aps = format_real(a0p);
    for (const int n : sizes) {
      start = Clock::now();
      const std::string tag = "er_n" + std::to_string(n);
      std::vector<std::string> src = {"--er", std::to_string(n), "--seed", std::to_string(seed)};
      auto with = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), src.begin(), src.end());
        head.insert(head.end(), tail.begin(), tail.end());
        if (lazy) head.push_back("--lazy");
        return head;
      };
      call({"gramians", "--er", std::to_string(n), "--seed", std::to_string(seed), "--out", path(tag + "_gramians.json")});
      call(with({"place-min"}, {"--sweep", std::to_string(k_max), "--c", cs, "--a0", as, "--out",
                                path(tag + "_place_min.csv")}));
      call(with({"place-budget"}, {"--sweep", std::to_string(r_max), "--c", cs, "--a0", as, "--a0p", aps, "--out",
                                   path(tag + "_place_budget.csv")}));
      summary["er"][std::to_string(n)] = {{"wall_time_s", seconds_since(start)}};
      err << tag << " done in " << seconds_since(start) << " s\n";
    }
    out << summary.dump(2) << "\n";
    write_text_file(path("summary.json"), summary.dump(2) + "\n");
    return exit_ok;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Actuator placement for linear network systems under average control energy"};
  app.set_version_flag("--version", std::string(tool_version));
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);

  GramiansCmd gramians;
  PlaceMinCmd place_min;
  PlaceBudgetCmd place_budget;
  VerifyCmd verify;
  BenchCmd bench;
  gramians.attach(*app.add_subcommand("gramians", "compute and cache per-node Gramians"));
  place_min.attach(*app.add_subcommand("place-min", "fewest actuators meeting an energy bound"));
  place_budget.attach(*app.add_subcommand("place-budget", "least energy with at most r actuators"));
  verify.attach(*app.add_subcommand("verify", "property and guarantee checks"));
  bench.attach(*app.add_subcommand("bench", "chain and random-network reproduction sweeps"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << "\n";
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  }

  configure_threads(err);
  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "gramians") return gramians.run(out, err);
    if (name == "place-min") return place_min.run(out, err);
    if (name == "place-budget") return place_budget.run(out, err);
    if (name == "verify") return verify.run(out, err);
    return bench.run(out, err);
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << " (floor " << format_real(e.floor()) << ")\n";
    return exit_infeasible;
  } catch (const StabilityError& e) {
    err << "error: " << e.what() << " (rightmost eigenvalue real part " << format_real(e.rightmost_real_part())
        << ")\n";
    return exit_invalid;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  }
}

}  // namespace actplace::cli

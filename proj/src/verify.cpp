#include "actplace/verify.hpp"

#include <cmath>
#include <limits>

#include "actplace/errors.hpp"
#include "actplace/random.hpp"

namespace actplace {

namespace {

constexpr int kOracleMaxNodes = 12;

void require_oracle_size(const NodeGramianSet& gramians, const char* suite) {
  if (gramians.n() > kOracleMaxNodes)
    throw Error(ErrorKind::size, std::string(suite) + " suite requires n <= 12");
}

void record(VerifyReport& report, bool ok, Json counterexample) {
  ++report.checks;
  if (!ok) {
    report.passed = false;
    report.failures.push_back(std::move(counterexample));
  }
}

}  // namespace

Json VerifyReport::to_json() const {
  return {{"suite", suite}, {"passed", passed}, {"checks", checks}, {"failures", failures}, {"details", details}};
}

double default_verify_eps(const NodeGramianSet& gramians) { return 0.05 * gramians.full().trace() / gramians.n(); }

std::vector<double> energy_ladder(const NodeGramianSet& gramians) {
  const double floor = energy_metric(gramians, ActuatorSet::all(gramians.n()), 0.0);
  std::vector<double> ladder;
  for (const double k : {1.05, 2.0, 8.0, 64.0, 1e3, 1e5, 1e8}) ladder.push_back(k * floor);
  return ladder;
}

double greedy_certificate(const NodeGramianSet& gramians, const GreedyTrace& trace, double eps) {
  const int n = gramians.n();
  const double full = linalg::trace_perturbed_inverse(gramians.full(), eps);
  const std::size_t l = trace.steps.size();
  const double before_last = l >= 2 ? trace.steps[l - 2].metric_after : n / eps;
  return 1.0 + std::log((n / eps - full) / (before_last - full));
}

VerifyReport verify_supermodularity(const NodeGramianSet& gramians, const VerifyOptions& options) {
  VerifyReport report;
  report.suite = "supermodularity";
  const int n = gramians.n();
  const double eps = options.eps > 0.0 ? options.eps : default_verify_eps(gramians);
  PortableRng rng(options.seed);
  double worst = std::numeric_limits<double>::infinity();

  struct Triple {
    ActuatorSet small, large;
    int a;
  };
  std::vector<Triple> triples;
  for (std::size_t t = 0; t < options.triples; ++t) {
    const int a = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    ActuatorSet small(n), large(n);
    for (int i = 0; i < n; ++i) {
      if (i == a) continue;
      const auto bucket = rng.next() % 3;
      if (bucket == 0) small.insert(i);
      if (bucket <= 1) large.insert(i);
    }
    triples.push_back({small, large, a});
  }
  std::vector<double> slack(triples.size());
  for_each_index(options.exec, triples.size(), [&](std::size_t t) {
    const auto& [small, large, a] = triples[t];
    const double small_drop = energy_metric(gramians, small, eps) - energy_metric(gramians, small.with(a), eps);
    const double large_drop = energy_metric(gramians, large, eps) - energy_metric(gramians, large.with(a), eps);
    slack[t] = small_drop - large_drop;
  });
  for (std::size_t t = 0; t < triples.size(); ++t) {
    worst = std::min(worst, slack[t]);
    record(report, slack[t] >= -options.slack,
           {{"delta1", to_json(triples[t].small)}, {"delta2", to_json(triples[t].large)},
            {"a", triples[t].a + 1}, {"slack", slack[t]}});
  }
  std::size_t strict = 0;
  for (const auto& t : triples) strict += t.small.size() < t.large.size() ? 1 : 0;
  report.details = {{"eps", eps}, {"triples", triples.size()}, {"strict_triples", strict}, {"min_slack", real_to_json(worst)}};
  return report;
}

VerifyReport verify_oracle(const NodeGramianSet& gramians, const VerifyOptions& options) {
  require_oracle_size(gramians, "oracle");
  VerifyReport report;
  report.suite = "oracle";
  Json runs = Json::array();
  for (const double E : energy_ladder(gramians)) {
    const PlacementResult placed = min_actuators_bounded_energy(gramians, E, options.c, options.a0, {false, options.exec});
    const OracleResult best = brute_force_min_actuators(gramians, E, 0.0, options.exec);
    const double ratio = static_cast<double>(placed.delta.size()) / static_cast<double>(best.optimal_set.size());
    const double gap = placed.metric_exact - placed.metric_eps;
    const double F = placed.bound_F.value_or(std::numeric_limits<double>::infinity());
    const Json run = {{"E", E},
                      {"delta", to_json(placed.delta)},
                      {"optimal", to_json(best.optimal_set)},
                      {"bound_F", real_to_json(F)},
                      {"metric_exact", real_to_json(placed.metric_exact)},
                      {"metric_eps", real_to_json(placed.metric_eps)},
                      {"eps", placed.eps_used}};
    record(report, best.feasible, {{"check", "oracle feasible"}, {"run", run}});
    record(report, ratio <= F, {{"check", "cardinality ratio <= F"}, {"run", run}});
    record(report, placed.metric_exact <= (1.0 + options.c) * E * (1.0 + 1e-12), {{"check", "(1+c)E guarantee"}, {"run", run}});
    record(report, placed.metric_eps <= E, {{"check", "perturbed metric <= E"}, {"run", run}});
    record(report, gap <= options.c * E * (1.0 + 1e-9), {{"check", "gap <= cE"}, {"run", run}});
    record(report, placed.controllable, {{"check", "controllable"}, {"run", run}});

    const double eps = 1.0 / E;
    const PlacementResult greedy = greedy_min_actuators(gramians, E, eps, {false, options.exec});
    const OracleResult relaxed = brute_force_min_actuators(gramians, E, eps, options.exec);
    record(report,
           static_cast<double>(greedy.delta.size()) <= greedy.bound_F.value_or(0.0) * relaxed.optimal_set.size(),
           {{"check", "greedy ratio <= F at eps = 1/E"}, {"E", E}, {"delta", to_json(greedy.delta)},
            {"optimal", to_json(relaxed.optimal_set)}});
    runs.push_back(run);
  }
  report.details = {{"runs", runs}, {"c", options.c}, {"a0", options.a0}};
  return report;
}

VerifyReport verify_fact1(const NodeGramianSet& gramians, const VerifyOptions& options) {
  require_oracle_size(gramians, "fact1");
  VerifyReport report;
  report.suite = "fact1";
  Json runs = Json::array();
  for (const double E : energy_ladder(gramians)) {
    const double eps = 1.0 / E;
    const PlacementResult greedy = greedy_min_actuators(gramians, E, eps, {false, options.exec});
    const OracleResult best = brute_force_min_actuators(gramians, E, eps, options.exec);
    const double lhs = static_cast<double>(greedy.trace.steps.size()) / best.optimal_set.size();
    const double rhs = greedy_certificate(gramians, greedy.trace, eps);
    const Json run = {{"E", E}, {"eps", eps}, {"l", greedy.trace.steps.size()},
                      {"optimal_size", best.optimal_set.size()}, {"ratio", lhs}, {"certificate", rhs}};
    record(report, lhs <= rhs * (1.0 + 1e-12), run);
    runs.push_back(run);
  }
  report.details = {{"runs", runs}};
  return report;
}

VerifyReport verify_fact2(const NodeGramianSet& gramians, const VerifyOptions& options) {
  require_oracle_size(gramians, "fact2");
  VerifyReport report;
  report.suite = "fact2";
  const double eps = options.eps > 0.0 ? options.eps : default_verify_eps(gramians);
  const PlacementResult naive = naive_budget_greedy(gramians, options.r, eps, options.l, {false, options.exec});
  const OracleResult best = brute_force_min_energy(gramians, options.r, eps, options.exec);
  const double bound = naive_greedy_bound(gramians.n(), options.r, options.l, eps, best.optimal_value);
  record(report, naive.metric_eps <= bound * (1.0 + 1e-12),
         {{"metric", naive.metric_eps}, {"bound", bound}, {"v_star", best.optimal_value}});
  report.details = {{"eps", eps},
                    {"r", options.r},
                    {"l", options.l},
                    {"delta", to_json(naive.delta)},
                    {"metric_eps", naive.metric_eps},
                    {"v_star", best.optimal_value},
                    {"v_star_set", to_json(best.optimal_set)},
                    {"bound", bound},
                    {"controllable", naive.controllable},
                    {"over_budget", static_cast<int>(naive.delta.size()) > options.r},
                    {"diagnostics", naive.diagnostics}};
  return report;
}

VerifyReport run_verify_suite(const std::string& suite, const NodeGramianSet& gramians, const VerifyOptions& options) {
  if (suite == "supermodularity") return verify_supermodularity(gramians, options);
  if (suite == "oracle") return verify_oracle(gramians, options);
  if (suite == "fact1") return verify_fact1(gramians, options);
  if (suite == "fact2") return verify_fact2(gramians, options);
  throw Error(ErrorKind::invalid_input, "unknown verify suite '" + suite + "'");
}

}  // namespace actplace

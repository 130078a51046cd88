#include <doctest.h>

#include "actplace/baselines.hpp"
#include "actplace/errors.hpp"
#include "actplace/instances.hpp"
#include "oracles.hpp"

using namespace actplace;

namespace {

NodeGramianSet random_gramians(std::mt19937_64& rng, int n, bool finite) {
  const Matrix a = oracle::random_hurwitz(n, rng, 0.3);
  return node_gramians(finite ? LinearSystem(a, FiniteHorizon{0, 1}) : LinearSystem(a, InfiniteHorizon{}));
}

const NodeGramianSet& chain5() {
  static const NodeGramianSet g = finite_horizon_node_gramians(chain_network(5));
  return g;
}

double trace_inv(const NodeGramianSet& g, std::vector<int> one_based) {
  return energy_metric(g, ActuatorSet::from_one_based(g.n(), one_based), 0.0);
}

// Textbook greedy written out directly: scan every candidate, keep strict improvements.
ActuatorSet reference_greedy(const NodeGramianSet& g, double E, double eps) {
  const int n = g.n();
  ActuatorSet current(n);
  double value = n / eps;
  while (value > E && static_cast<int>(current.size()) < n) {
    int best = -1;
    double best_value = 0.0;
    for (int a = 0; a < n; ++a) {
      if (current.contains(a)) continue;
      const double v = oracle::trace_inverse_direct(assemble_gramian(g, current.with(a)), eps);
      if (best < 0 || v < best_value * (1 - 1e-9)) {
        best = a;
        best_value = v;
      }
    }
    current.insert(best);
    value = best_value;
  }
  return current;
}

}  // namespace

TEST_CASE("greedy step accounting") {
  const auto& g = chain5();
  const double E = trace_inv(g, {1, 3});
  const PlacementResult r = greedy_min_actuators(g, E, 1.0 / E);
  CHECK(r.trace.steps.size() == r.delta.size());
  CHECK(r.metric_eps <= E);
  CHECK(r.trace.steps.back().metric_after == doctest::Approx(r.metric_eps));
  for (std::size_t k = 1; k < r.trace.steps.size(); ++k)
    CHECK(r.trace.steps[k].metric_after <= r.trace.steps[k - 1].metric_after);
  REQUIRE(r.bound_F.has_value());
  CHECK(*r.bound_F >= 1.0);
}

TEST_CASE("greedy matches a direct reference implementation") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 5;
    const auto g = random_gramians(rng, n, trial % 2 == 0);
    const double floor = energy_metric(g, ActuatorSet::all(n), 0.0);
    const double E = floor * (1.5 + trial);
    const double eps = 1.0 / E;
    CHECK(greedy_min_actuators(g, E, eps).delta == reference_greedy(g, E, eps));
  }
}

TEST_CASE("lazy, eager, serial and parallel greedy agree") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + trial % 8;
    const auto g = random_gramians(rng, n, trial % 2 == 1);
    const double E = energy_metric(g, ActuatorSet::all(n), 0.0) * std::ldexp(1.0, 1 + trial % 10);
    const double eps = 1.0 / E;
    const auto eager = greedy_min_actuators(g, E, eps, {false, Exec::serial});
    const auto eager_par = greedy_min_actuators(g, E, eps, {false, Exec::parallel});
    const auto lazy = greedy_min_actuators(g, E, eps, {true, Exec::serial});
    const auto lazy_par = greedy_min_actuators(g, E, eps, {true, Exec::parallel});
    CHECK(eager.delta == eager_par.delta);
    CHECK(eager.delta == lazy.delta);
    CHECK(eager.delta == lazy_par.delta);
    CHECK(eager.metric_eps == eager_par.metric_eps);
    CHECK(lazy.trace.evaluations <= eager.trace.evaluations);
  }
}

TEST_CASE("ties go to the lowest index") {
  // Identical decoupled nodes: every candidate has the same gain.
  const auto g = finite_horizon_node_gramians(LinearSystem(-Matrix::Identity(4, 4), FiniteHorizon{0, 1}));
  const double E = 1e3;
  const PlacementResult r = greedy_min_actuators(g, E, 1.0 / E);
  for (std::size_t k = 0; k < r.delta.size(); ++k) CHECK(r.delta.members()[k] == static_cast<int>(k));
  for (const bool lazy : {false, true}) {
    const auto all = run_greedy(g, 1e-3, {lazy, Exec::parallel}, [](std::size_t, double) { return false; });
    REQUIRE(all.steps.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(all.steps[static_cast<std::size_t>(k)].node == k);
  }
}

TEST_CASE("greedy parameter guards") {
  const auto& g = chain5();
  const double floor = trace_inv(g, {1, 2, 3, 4, 5});
  try {
    greedy_min_actuators(g, 0.5 * floor, 1.0 / floor);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.kind() == ErrorKind::infeasible);
  }
  CHECK_THROWS_AS(greedy_min_actuators(g, 2 * floor, 1.0 / floor), Error);  // eps > 1/E
  CHECK_THROWS_AS(greedy_min_actuators(g, 2 * floor, 0.0), Error);
}

TEST_CASE("bound F formula and components") {
  const auto& g = chain5();
  const double E = 100.0, eps = 1e-3;
  const BoundF f = compute_bound_F(g, E, eps);
  const double full = oracle::trace_inverse_direct(g.full(), eps);
  CHECK(f.value == doctest::Approx(1 + std::log((5 / eps - full) / (E - full))));
  CHECK(f.log_n == doctest::Approx(std::log(5.0)));
  CHECK(f.log_inv_eps == doctest::Approx(std::log(1 / eps)));
  CHECK_THROWS_AS(compute_bound_F(g, 1.0, eps), InfeasibleError);
}

TEST_CASE("marginal gain matches metric differences") {
  const auto& g = chain5();
  const ActuatorSet base = ActuatorSet::from_one_based(5, {1});
  const double eps = 1e-4;
  CHECK(marginal_gain(g, base, 2, eps) ==
        doctest::Approx(energy_metric(g, base, eps) - energy_metric(g, base.with(2), eps)).epsilon(1e-10));
  CHECK_THROWS_AS(marginal_gain(g, base, 0, eps), Error);
}

TEST_CASE("bounded-energy placement on the chain") {
  const auto& g = chain5();
  const PlacementResult r = min_actuators_bounded_energy(g, trace_inv(g, {1, 5}), 1e-4, 1e-4);
  CHECK(r.delta.to_string() == "{1,3}");
  CHECK(r.controllable);
  CHECK(r.metric_exact <= (1 + 1e-4) * trace_inv(g, {1, 5}));
  CHECK(r.metric_exact - r.metric_eps <= 1e-4 * trace_inv(g, {1, 5}));
  CHECK(!r.iterations.empty());

  const double big = 1e10 * trace_inv(g, {1, 2, 3, 4, 5});
  CHECK(min_actuators_bounded_energy(g, big, 1e-4, 1e-4).delta.to_string() == "{1}");

  CHECK_THROWS_AS(min_actuators_bounded_energy(g, 1.0, 1e-4, 1e-4), InfeasibleError);
}

TEST_CASE("bounded-energy placement guarantees on random systems") {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 4 + trial % 5;
    const auto g = random_gramians(rng, n, trial % 2 == 0);
    const double E = energy_metric(g, ActuatorSet::all(n), 0.0) * (1.2 + 5 * trial);
    const double c = 0.05;
    const PlacementResult r = min_actuators_bounded_energy(g, E, c, 1e-3);
    CHECK(r.metric_eps <= E);
    CHECK(r.metric_exact <= (1 + c) * E);
    CHECK(r.controllable);
    const OracleResult best = brute_force_min_actuators(g, E);
    REQUIRE(best.feasible);
    REQUIRE(r.bound_F.has_value());
    CHECK(static_cast<double>(r.delta.size()) <= *r.bound_F * best.optimal_set.size());
  }
}

TEST_CASE("budgeted placement on the chain matches brute force") {
  const auto& g = chain5();
  const ActuatorSet seed = controllable_seed_set(g, 1e-4, 1e-4);
  CHECK(seed.to_string() == "{1}");
  for (int r = 1; r <= 5; ++r) {
    const PlacementResult p = min_energy_budgeted(g, r, seed, 1e-4, 1e-4, 1e-4);
    const OracleResult best = brute_force_min_energy(g, r);
    CHECK(p.delta.contains(0));
    CHECK(static_cast<int>(p.delta.size()) <= r);
    CHECK(p.delta == best.optimal_set);
  }
  CHECK(min_energy_budgeted(g, 3, seed, 1e-4, 1e-4, 1e-4).metric_exact == doctest::Approx(81.7134).epsilon(1e-3));
  CHECK(min_energy_budgeted(g, 5, seed, 1e-4, 1e-4, 1e-4).delta == ActuatorSet::all(5));
}

TEST_CASE("budgeted placement guards") {
  const auto& g = chain5();
  CHECK_THROWS_AS(min_energy_budgeted(g, 1, ActuatorSet::from_one_based(5, {1, 2}), 1e-4, 1e-4, 1e-4), Error);
  try {
    min_energy_budgeted(g, 2, ActuatorSet::from_one_based(5, {2}), 1e-4, 1e-4, 1e-4);
    FAIL("expected controllability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::controllability);
  }
}

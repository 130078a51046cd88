#pragma once

#include <cstdint>

#include "actplace/placement.hpp"

namespace actplace {

/// Largest system the exhaustive oracles accept.
inline constexpr int brute_force_max_nodes = 20;

struct OracleResult {
  ActuatorSet optimal_set{1};
  double optimal_value = 0.0;
  std::uint64_t subsets_examined = 0;
  bool feasible = false;
};

/// Smallest |Delta| with energy_metric(Delta, eps) <= E; ties broken
/// lexicographically. eps = 0 gives the unperturbed problem.
OracleResult brute_force_min_actuators(const NodeGramianSet& gramians, double E, double eps = 0.0,
                                       Exec exec = Exec::parallel);

/// Minimum of energy_metric(Delta, eps) over 1 <= |Delta| <= r. Ties prefer the
/// smaller set, then the lexicographically first.
OracleResult brute_force_min_energy(const NodeGramianSet& gramians, int r, double eps = 0.0,
                                    Exec exec = Exec::parallel);

/// Plain l-step greedy on tr((W_Delta + eps I)^{-1}) with no bisection. The
/// result may exceed the budget r or leave the system uncontrollable; both
/// outcomes are recorded in diagnostics.
PlacementResult naive_budget_greedy(const NodeGramianSet& gramians, int r, double eps, int l,
                                    const GreedyOptions& options = {});

/// (1 - e^{-l/r}) v* + n e^{-l/r} / eps.
double naive_greedy_bound(int n, int r, int l, double eps, double v_star);

}  // namespace actplace

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actplace/system.hpp"

namespace actplace {

struct GreedyStep {
  int node = -1;  // zero-based
  double gain = 0.0;
  double metric_after = 0.0;
};

/// The sets Delta_0 (empty), Delta_1, ... visited by a greedy run.
struct GreedyTrace {
  std::vector<GreedyStep> steps;
  std::size_t evaluations = 0;
};

/// One probe of a bisection loop. For the epsilon search `parameter` is eps;
/// for the energy-bound search it is E.
struct BisectionStep {
  std::string stage;
  double parameter = 0.0;
  double accuracy = 0.0;
  std::size_t cardinality = 0;
  double gap = 0.0;
  double metric = 0.0;
};

struct PlacementResult {
  ActuatorSet delta{1};
  double metric_eps = 0.0;    // tr((W_Delta + eps I)^{-1})
  double metric_exact = 0.0;  // tr(W_Delta^{-1}), +inf if singular
  double eps_used = 0.0;
  double E_used = 0.0;
  std::optional<double> bound_F;
  bool controllable = false;
  GreedyTrace trace;
  std::vector<BisectionStep> iterations;
  std::vector<std::string> diagnostics;
};

struct GreedyOptions {
  bool lazy = false;
  Exec exec = Exec::parallel;
};

/// Gains within this relative distance of the best are ties; lowest index wins.
inline constexpr double tie_tolerance = 1e-12;

/// Shared state for one greedy sweep: the current W_Delta and its perturbed
/// trace-inverse. Candidate evaluations are const and may run concurrently.
class GainEvaluator {
 public:
  GainEvaluator(const NodeGramianSet& gramians, double eps);

  double eps() const noexcept { return eps_; }
  const ActuatorSet& current() const noexcept { return current_; }
  /// tr((W_Delta + eps I)^{-1}) for the current set.
  double current_metric() const noexcept { return current_metric_; }

  /// tr((W_{Delta + a} + eps I)^{-1}).
  double metric_with(int candidate) const;
  /// current_metric() - metric_with(candidate); non-negative up to rounding.
  double gain(int candidate) const { return current_metric_ - metric_with(candidate); }

  /// Adds a node and refreshes the stored metric. Pass the metric already
  /// evaluated for that node to skip recomputation.
  void accept(int node, std::optional<double> metric_after = std::nullopt);

 private:
  const NodeGramianSet* gramians_;
  double eps_;
  ActuatorSet current_;
  Matrix base_;  // W_Delta
  double current_metric_;
};

/// Runs the greedy from the empty set; after each pick `stop(metric)` is
/// consulted, and the run ends when it returns true or the set is full.
GreedyTrace run_greedy(const NodeGramianSet& gramians, double eps, const GreedyOptions& options,
                       const std::function<bool(std::size_t steps, double metric)>& stop);

/// Minimal set with tr((W_Delta + eps I)^{-1}) <= E by greedy selection.
/// Requires 0 < eps <= 1/E.
PlacementResult greedy_min_actuators(const NodeGramianSet& gramians, double E, double eps,
                                     const GreedyOptions& options = {});

/// Bisection on eps around the greedy so that tr(W_Delta^{-1}) <= (1 + c) E.
PlacementResult min_actuators_bounded_energy(const NodeGramianSet& gramians, double E, double c,
                                             double a0, const GreedyOptions& options = {});

/// Bisection on E so that the bounded-energy placement uses at most r nodes.
PlacementResult min_energy_budgeted(const NodeGramianSet& gramians, int r, const ActuatorSet& delta_c,
                                    double c, double a0, double a0p, const GreedyOptions& options = {});

/// A small controllable set from a bounded-energy run at a very large E. If
/// that run cannot be certified, E is lowered by factors of 100 (not below
/// 2 tr(W_V^{-1})) until one is.
ActuatorSet controllable_seed_set(const NodeGramianSet& gramians, double c, double a0,
                                  const GreedyOptions& options = {});

/// Default "very large E" used by controllable_seed_set: 1e12 * tr(W_V^{-1}).
double large_energy_bound(const NodeGramianSet& gramians);

struct BoundF {
  double value = 0.0;
  // Components of the asymptotic form O(log n + log 1/eps + log 1/(E - tr(W_V^{-1}))).
  double log_n = 0.0;
  double log_inv_eps = 0.0;
  double log_inv_margin = 0.0;
};

/// F = 1 + log[(n/eps - tr((W_V + eps I)^{-1})) / (E - tr((W_V + eps I)^{-1}))].
BoundF compute_bound_F(const NodeGramianSet& gramians, double E, double eps);

/// Standalone marginal gain tr((W_Delta + eps I)^{-1}) - tr((W_{Delta+a} + eps I)^{-1}).
double marginal_gain(const NodeGramianSet& gramians, const ActuatorSet& current, int candidate, double eps);

}  // namespace actplace

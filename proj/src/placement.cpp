#include "actplace/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "actplace/errors.hpp"

namespace actplace {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Stale gains below best * (1 - margin) cannot win or tie after re-evaluation.
constexpr double kLazyMargin = 1e-9;

// Lowest index among candidates whose gain is within tie_tolerance of the best.
std::size_t pick_best(const std::vector<double>& gains) {
  double best = -kInfinity;
  for (const double g : gains) best = std::max(best, g);
  const double threshold = best - tie_tolerance * std::abs(best);
  for (std::size_t k = 0; k < gains.size(); ++k)
    if (gains[k] >= threshold) return k;
  return 0;
}

PlacementResult describe_set(const NodeGramianSet& gramians, const ActuatorSet& delta, double E, double eps) {
  PlacementResult result;
  result.delta = delta;
  result.eps_used = eps;
  result.E_used = E;
  result.metric_exact = energy_metric(gramians, delta, 0.0);
  result.metric_eps = eps > 0.0 ? energy_metric(gramians, delta, eps) : result.metric_exact;
  result.controllable = is_controllable(gramians, delta).controllable;
  return result;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << name << " must be positive and finite (got " << value << ")";
    throw Error(ErrorKind::parameter, msg.str());
  }
}

}  // namespace

GainEvaluator::GainEvaluator(const NodeGramianSet& gramians, double eps)
    : gramians_(&gramians),
      eps_(eps),
      current_(gramians.n()),
      base_(Matrix::Zero(gramians.n(), gramians.n())),
      current_metric_(gramians.n() / eps) {
  require_positive(eps, "eps");
}

double GainEvaluator::metric_with(int candidate) const {
  return linalg::trace_perturbed_inverse(Matrix(base_ + gramians_->node(candidate)), eps_);
}

void GainEvaluator::accept(int node, std::optional<double> metric_after) {
  const double metric = metric_after ? *metric_after : metric_with(node);
  base_ += gramians_->node(node);
  current_.insert(node);
  current_metric_ = metric;
}

GreedyTrace run_greedy(const NodeGramianSet& gramians, double eps, const GreedyOptions& options,
                       const std::function<bool(std::size_t, double)>& stop) {
  const int n = gramians.n();
  GainEvaluator evaluator(gramians, eps);
  GreedyTrace trace;
  if (stop(0, evaluator.current_metric())) return trace;

  std::vector<double> stale_gain(static_cast<std::size_t>(n), kInfinity);
  while (static_cast<int>(evaluator.current().size()) < n) {
    std::vector<int> candidates;
    for (int a = 0; a < n; ++a)
      if (!evaluator.current().contains(a)) candidates.push_back(a);

    std::vector<double> metrics(candidates.size(), kInfinity);
    std::vector<double> gains(candidates.size(), -kInfinity);
    if (!options.lazy) {
      for_each_index(options.exec, candidates.size(),
                     [&](std::size_t k) { metrics[k] = evaluator.metric_with(candidates[k]); });
      for (std::size_t k = 0; k < candidates.size(); ++k) gains[k] = evaluator.current_metric() - metrics[k];
      trace.evaluations += candidates.size();
    } else {
      std::vector<bool> fresh(candidates.size(), false);
      double best_fresh = -kInfinity;
      for (;;) {
        std::size_t top = candidates.size();
        for (std::size_t k = 0; k < candidates.size(); ++k) {
          if (fresh[k]) continue;
          if (top == candidates.size() ||
              stale_gain[static_cast<std::size_t>(candidates[k])] >
                  stale_gain[static_cast<std::size_t>(candidates[top])])
            top = k;
        }
        if (top == candidates.size()) break;
        const double bound = stale_gain[static_cast<std::size_t>(candidates[top])];
        if (best_fresh > -kInfinity && bound < best_fresh - (kLazyMargin + tie_tolerance) * std::abs(best_fresh))
          break;
        metrics[top] = evaluator.metric_with(candidates[top]);
        gains[top] = evaluator.current_metric() - metrics[top];
        stale_gain[static_cast<std::size_t>(candidates[top])] = gains[top];
        fresh[top] = true;
        best_fresh = std::max(best_fresh, gains[top]);
        ++trace.evaluations;
      }
    }

    const std::size_t chosen = pick_best(gains);
    evaluator.accept(candidates[chosen], metrics[chosen]);
    trace.steps.push_back({candidates[chosen], gains[chosen], metrics[chosen]});
    if (stop(trace.steps.size(), metrics[chosen])) break;
  }
  return trace;
}

PlacementResult greedy_min_actuators(const NodeGramianSet& gramians, double E, double eps,
                                     const GreedyOptions& options) {
  require_positive(E, "E");
  require_positive(eps, "eps");
  if (eps > (1.0 / E) * (1.0 + 1e-15)) {
    std::ostringstream msg;
    msg << "greedy_min_actuators: eps = " << eps << " exceeds 1/E = " << 1.0 / E;
    throw Error(ErrorKind::parameter, msg.str());
  }
  const double floor = linalg::trace_perturbed_inverse(gramians.full(), eps);
  if (E < floor) {
    std::ostringstream msg;
    msg << "energy bound E = " << E << " is below tr((W_V + eps I)^{-1}) = " << floor;
    throw InfeasibleError(msg.str(), floor);
  }

  GreedyTrace trace = run_greedy(gramians, eps, options, [E](std::size_t, double metric) { return metric <= E; });
  const double final_metric = trace.steps.empty() ? gramians.n() / eps : trace.steps.back().metric_after;
  if (final_metric > E) {
    std::ostringstream msg;
    msg << "greedy exhausted all nodes without meeting E = " << E << " (reached " << final_metric << ")";
    throw InfeasibleError(msg.str(), floor);
  }

  ActuatorSet delta(gramians.n());
  for (const auto& step : trace.steps) delta.insert(step.node);
  PlacementResult result;
  result.delta = delta;
  result.metric_eps = final_metric;
  result.metric_exact = energy_metric(gramians, delta, 0.0);
  result.eps_used = eps;
  result.E_used = E;
  result.bound_F = compute_bound_F(gramians, E, eps).value;
  result.controllable = is_controllable(gramians, delta).controllable;
  result.trace = std::move(trace);
  return result;
}

PlacementResult min_actuators_bounded_energy(const NodeGramianSet& gramians, double E, double c, double a0,
                                             const GreedyOptions& options) {
  require_positive(E, "E");
  require_positive(c, "c");
  require_positive(a0, "a0");
  const double floor = energy_metric(gramians, ActuatorSet::all(gramians.n()), 0.0);
  if (!std::isfinite(floor))
    throw InfeasibleError("full actuation does not render the system controllable", floor);
  if (E < floor) {
    std::ostringstream msg;
    msg << "energy bound E = " << E << " is below the feasibility floor tr(W_V^{-1}) = " << floor;
    throw InfeasibleError(msg.str(), floor);
  }

  const double target = c * E;
  const double eps_floor = 1e-300 * (1.0 / E);
  std::map<double, PlacementResult> greedy_cache;
  const auto greedy = [&](double eps) -> const PlacementResult& {
    auto it = greedy_cache.find(eps);
    if (it == greedy_cache.end()) it = greedy_cache.emplace(eps, greedy_min_actuators(gramians, E, eps, options)).first;
    return it->second;
  };
  const auto gap_of = [&](const PlacementResult& r, double eps) { return perturbation_gap(gramians, r.delta, eps); };

  std::vector<BisectionStep> log;
  double a = a0;
  double lo = 0.0;
  double hi = 1.0 / E;
  double eps = 0.5 * (lo + hi);
  const PlacementResult* current = &greedy(eps);
  bool certified = false;
  while (!certified) {
    while (hi - lo > a) {
      current = &greedy(eps);
      const double gap = gap_of(*current, eps);
      log.push_back({"eps-inner", eps, a, current->delta.size(), gap, current->metric_eps});
      if (gap > target)
        hi = eps;
      else
        lo = eps;
      eps = 0.5 * (lo + hi);
    }
    if (gap_of(*current, eps) > target) {
      hi = eps;
      eps = 0.5 * (lo + hi);
    }
    current = &greedy(eps);
    const double gap = gap_of(*current, eps);
    log.push_back({"eps-exit", eps, a, current->delta.size(), gap, current->metric_eps});
    if (gap <= target) {
      certified = true;
    } else {
      a *= 0.5;
      if (eps < eps_floor || a < eps_floor) {
        std::ostringstream msg;
        msg << "epsilon bisection could not certify tr(W^{-1}) <= (1 + c) E above eps = " << eps;
        throw Error(ErrorKind::certification, msg.str());
      }
    }
  }

  PlacementResult result = *current;
  result.iterations = std::move(log);
  std::ostringstream note;
  note << "final accuracy a = " << a << "; greedy runs = " << greedy_cache.size();
  result.diagnostics.push_back(note.str());
  return result;
}

double large_energy_bound(const NodeGramianSet& gramians) {
  const double floor = energy_metric(gramians, ActuatorSet::all(gramians.n()), 0.0);
  if (!std::isfinite(floor)) throw InfeasibleError("full actuation does not render the system controllable", floor);
  return 1e12 * floor;
}

ActuatorSet controllable_seed_set(const NodeGramianSet& gramians, double c, double a0, const GreedyOptions& options) {
  // Very large bounds can ask for sets whose Gramian is singular in double
  // precision; step E down until the eps search certifies.
  const double floor = energy_metric(gramians, ActuatorSet::all(gramians.n()), 0.0);
  for (double E = large_energy_bound(gramians);; E *= 1e-2) {
    E = std::max(E, 2.0 * floor);
    try {
      return min_actuators_bounded_energy(gramians, E, c, a0, options).delta;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::certification || E <= 2.0 * floor) throw;
    }
  }
}

PlacementResult min_energy_budgeted(const NodeGramianSet& gramians, int r, const ActuatorSet& delta_c, double c,
                                    double a0, double a0p, const GreedyOptions& options) {
  const int n = gramians.n();
  require_positive(c, "c");
  require_positive(a0, "a0");
  require_positive(a0p, "a0'");
  if (delta_c.n() != n) throw Error(ErrorKind::dimension, "min_energy_budgeted: delta_C has the wrong ambient size");
  if (r < static_cast<int>(delta_c.size())) {
    std::ostringstream msg;
    msg << "budget r = " << r << " is smaller than |delta_C| = " << delta_c.size();
    throw Error(ErrorKind::parameter, msg.str());
  }
  if (r >= n) {
    const ActuatorSet all = ActuatorSet::all(n);
    PlacementResult result = describe_set(gramians, all, energy_metric(gramians, all, 0.0), 0.0);
    result.diagnostics.push_back("budget r >= n: every node is actuated");
    return result;
  }
  if (!is_controllable(gramians, delta_c).controllable)
    throw Error(ErrorKind::controllability,
                "delta_C = " + delta_c.to_string() + " does not render the system controllable");

  double lo = energy_metric(gramians, ActuatorSet::all(n), 0.0);
  double hi = energy_metric(gramians, delta_c, 0.0);
  double E = 0.5 * (lo + hi);
  std::vector<BisectionStep> log;
  std::optional<PlacementResult> within_budget;
  std::size_t last_cardinality = 0;
  while (hi - lo > a0p) {
    PlacementResult inner = min_actuators_bounded_energy(gramians, E, c, a0, options);
    last_cardinality = inner.delta.size();
    log.push_back({"E-bisection", E, a0p, inner.delta.size(), inner.metric_exact - inner.metric_eps,
                   inner.metric_exact});
    if (static_cast<int>(inner.delta.size()) > r) {
      lo = E;
    } else {
      hi = E;
      within_budget = std::move(inner);
    }
    E = 0.5 * (lo + hi);
  }
  if (static_cast<int>(last_cardinality) > r) {
    lo = E;
    E = 0.5 * (lo + hi);
  }

  PlacementResult result = min_actuators_bounded_energy(gramians, E, c, a0, options);
  log.push_back({"E-final", E, a0p, result.delta.size(), result.metric_exact - result.metric_eps,
                 result.metric_exact});
  if (static_cast<int>(result.delta.size()) > r) {
    std::ostringstream note;
    note << "final run at E = " << E << " selected " << result.delta.size()
         << " nodes; fell back to the last run within budget";
    if (within_budget) {
      result = *within_budget;
    } else {
      result = describe_set(gramians, delta_c, hi, 0.0);
      note << " (delta_C)";
    }
    result.diagnostics.push_back(note.str());
  }
  log.insert(log.end(), result.iterations.begin(), result.iterations.end());
  result.iterations = std::move(log);
  return result;
}

BoundF compute_bound_F(const NodeGramianSet& gramians, double E, double eps) {
  require_positive(eps, "eps");
  const double full = linalg::trace_perturbed_inverse(gramians.full(), eps);
  const double margin = E - full;
  if (!(margin > 0.0)) {
    std::ostringstream msg;
    msg << "bound F undefined: E = " << E << " does not exceed tr((W_V + eps I)^{-1}) = " << full;
    throw InfeasibleError(msg.str(), full);
  }
  const int n = gramians.n();
  BoundF bound;
  bound.value = 1.0 + std::log((n / eps - full) / margin);
  bound.log_n = std::log(static_cast<double>(n));
  bound.log_inv_eps = std::log(1.0 / eps);
  const double exact_margin = E - energy_metric(gramians, ActuatorSet::all(n), 0.0);
  bound.log_inv_margin = exact_margin > 0.0 ? std::log(1.0 / exact_margin) : kInfinity;
  return bound;
}

double marginal_gain(const NodeGramianSet& gramians, const ActuatorSet& current, int candidate, double eps) {
  if (current.contains(candidate))
    throw Error(ErrorKind::invalid_input, "marginal_gain: candidate already in the set");
  GainEvaluator evaluator(gramians, eps);
  for (const int node : current.members()) evaluator.accept(node);
  return evaluator.gain(candidate);
}

}  // namespace actplace

#include "actplace/baselines.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "actplace/errors.hpp"

namespace actplace {

namespace {

void require_small(const NodeGramianSet& gramians) {
  if (gramians.n() > brute_force_max_nodes) {
    std::ostringstream msg;
    msg << "exhaustive search is capped at n = " << brute_force_max_nodes << " (got n = " << gramians.n() << ")";
    throw Error(ErrorKind::size, msg.str());
  }
}

// All k-subsets of {0..n-1} as bit masks, in lexicographic order of their
// sorted index lists.
std::vector<std::uint64_t> combinations(int n, int k) {
  std::vector<std::uint64_t> out;
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    std::uint64_t mask = 0;
    for (const int i : idx) mask |= std::uint64_t{1} << i;
    out.push_back(mask);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

double metric_of_mask(const NodeGramianSet& gramians, std::uint64_t mask, double eps) {
  Matrix w = Matrix::Zero(gramians.n(), gramians.n());
  for (int i = 0; i < gramians.n(); ++i)
    if (mask & (std::uint64_t{1} << i)) w += gramians.node(i);
  return energy_metric(gramians, w, eps);
}

}  // namespace

OracleResult brute_force_min_actuators(const NodeGramianSet& gramians, double E, double eps, Exec exec) {
  require_small(gramians);
  const int n = gramians.n();
  OracleResult result;
  result.optimal_set = ActuatorSet(n);
  result.optimal_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const auto masks = combinations(n, k);
    std::vector<double> values(masks.size());
    for_each_index(exec, masks.size(), [&](std::size_t j) { values[j] = metric_of_mask(gramians, masks[j], eps); });
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if (values[j] <= E) {
        result.optimal_set = ActuatorSet::from_mask(n, masks[j]);
        result.optimal_value = values[j];
        result.subsets_examined += j + 1;
        result.feasible = true;
        return result;
      }
    }
    result.subsets_examined += masks.size();
  }
  return result;
}

OracleResult brute_force_min_energy(const NodeGramianSet& gramians, int r, double eps, Exec exec) {
  require_small(gramians);
  const int n = gramians.n();
  if (r < 1) throw Error(ErrorKind::parameter, "brute_force_min_energy: budget r must be at least 1");
  OracleResult result;
  result.optimal_set = ActuatorSet(n);
  result.optimal_value = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int k = 1; k <= std::min(r, n); ++k) {
    const auto masks = combinations(n, k);
    std::vector<double> values(masks.size());
    for_each_index(exec, masks.size(), [&](std::size_t j) { values[j] = metric_of_mask(gramians, masks[j], eps); });
    result.subsets_examined += masks.size();
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if (!found || values[j] < result.optimal_value) {
        found = true;
        result.optimal_value = values[j];
        result.optimal_set = ActuatorSet::from_mask(n, masks[j]);
      }
    }
  }
  result.feasible = std::isfinite(result.optimal_value);
  return result;
}

PlacementResult naive_budget_greedy(const NodeGramianSet& gramians, int r, double eps, int l,
                                    const GreedyOptions& options) {
  if (l < 1) throw Error(ErrorKind::parameter, "naive_budget_greedy: step count l must be at least 1");
  if (r < 1) throw Error(ErrorKind::parameter, "naive_budget_greedy: budget r must be at least 1");
  const std::size_t steps = static_cast<std::size_t>(std::min(l, gramians.n()));
  GreedyTrace trace =
      run_greedy(gramians, eps, options, [steps](std::size_t taken, double) { return taken >= steps; });

  PlacementResult result;
  result.delta = ActuatorSet(gramians.n());
  for (const auto& step : trace.steps) result.delta.insert(step.node);
  result.metric_eps = trace.steps.empty() ? gramians.n() / eps : trace.steps.back().metric_after;
  result.metric_exact = energy_metric(gramians, result.delta, 0.0);
  result.eps_used = eps;
  result.controllable = is_controllable(gramians, result.delta).controllable;
  result.trace = std::move(trace);
  if (static_cast<int>(result.delta.size()) > r) {
    std::ostringstream note;
    note << "over budget: selected " << result.delta.size() << " nodes with r = " << r;
    result.diagnostics.push_back(note.str());
  }
  if (!result.controllable) result.diagnostics.push_back("uncontrollable: selected set leaves W_Delta singular");
  return result;
}

double naive_greedy_bound(int n, int r, int l, double eps, double v_star) {
  const double decay = std::exp(-static_cast<double>(l) / r);
  return (1.0 - decay) * v_star + n * decay / eps;
}

}  // namespace actplace

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "actplace/linalg.hpp"
#include "actplace/parallel.hpp"

namespace actplace {

struct FiniteHorizon {
  double t0 = 0.0;
  double t1 = 1.0;
  double duration() const { return t1 - t0; }
};

struct InfiniteHorizon {};

using Horizon = std::variant<FiniteHorizon, InfiniteHorizon>;

/// The plant x' = A x + B u with B = diag(delta), over a finite window or
/// the infinite horizon.
class LinearSystem {
 public:
  LinearSystem(Matrix a, Horizon horizon);

  const Matrix& a() const noexcept { return a_; }
  const Horizon& horizon() const noexcept { return horizon_; }
  int n() const noexcept { return static_cast<int>(a_.rows()); }
  bool is_finite_horizon() const noexcept { return std::holds_alternative<FiniteHorizon>(horizon_); }

  LinearSystem with_horizon(Horizon horizon) const { return LinearSystem(a_, horizon); }

 private:
  Matrix a_;
  Horizon horizon_;
};

/// Subset of actuated nodes, stored as sorted zero-based indices.
/// Files and user-facing output use one-based indices.
class ActuatorSet {
 public:
  explicit ActuatorSet(int n) : n_(n) {}
  ActuatorSet(int n, std::vector<int> zero_based);

  static ActuatorSet from_one_based(int n, const std::vector<int>& one_based);
  static ActuatorSet all(int n);
  static ActuatorSet from_mask(int n, std::uint64_t mask);

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<int>& members() const noexcept { return members_; }
  std::vector<int> one_based() const;
  bool contains(int node) const;
  void insert(int node);
  ActuatorSet with(int node) const;
  std::string to_string() const;  // "{1,3}" in one-based notation

  friend bool operator==(const ActuatorSet&, const ActuatorSet&) = default;
  /// Lexicographic on the sorted index lists.
  friend bool operator<(const ActuatorSet& lhs, const ActuatorSet& rhs) {
    return lhs.members_ < rhs.members_;
  }

 private:
  int n_;
  std::vector<int> members_;
};

enum class GramianMethod { finite_horizon, infinite_horizon };

std::string to_string(GramianMethod method);
GramianMethod gramian_method_from_string(const std::string& tag);

/// The per-node Gramians W_1..W_n, computed once and read-only afterwards.
class NodeGramianSet {
 public:
  NodeGramianSet(LinearSystem system, GramianMethod method, std::vector<Matrix> per_node,
                 std::vector<double> residuals = {});

  int n() const noexcept { return system_.n(); }
  const LinearSystem& system() const noexcept { return system_; }
  GramianMethod method() const noexcept { return method_; }
  const std::vector<Matrix>& per_node() const noexcept { return per_node_; }
  const Matrix& node(int i) const { return per_node_.at(static_cast<std::size_t>(i)); }
  /// W_V, the full-actuation Gramian.
  const Matrix& full() const noexcept { return full_; }
  /// Lyapunov residuals per node (infinite horizon only; empty otherwise).
  const std::vector<double>& residuals() const noexcept { return residuals_; }

  /// lambda_min threshold for declaring W_Delta nonsingular:
  /// 1e-12 * (1 + tr(W_V) / n).
  double controllability_tolerance() const noexcept { return controllability_tolerance_; }

 private:
  LinearSystem system_;
  GramianMethod method_;
  std::vector<Matrix> per_node_;
  std::vector<double> residuals_;
  Matrix full_;
  double controllability_tolerance_;
};

/// W_i over [0, t1 - t0] via the block exponential of [[-A, I_i], [0, A^T]].
NodeGramianSet finite_horizon_node_gramians(const LinearSystem& system, Exec exec = Exec::parallel);

/// G_i solving A G_i + G_i A^T = -I_i; requires Hurwitz A.
NodeGramianSet infinite_horizon_node_gramians(const LinearSystem& system, Exec exec = Exec::parallel);

/// Dispatches on the system's horizon.
NodeGramianSet node_gramians(const LinearSystem& system, Exec exec = Exec::parallel);

Matrix assemble_gramian(const NodeGramianSet& gramians, const ActuatorSet& delta);

/// tr((W_Delta + eps I)^{-1}) for eps > 0. For eps == 0 returns tr(W_Delta^{-1})
/// when W_Delta is nonsingular, +infinity otherwise.
double energy_metric(const NodeGramianSet& gramians, const ActuatorSet& delta, double eps);
double energy_metric(const NodeGramianSet& gramians, const Matrix& w_delta, double eps);

/// tr(W_Delta^{-1}) - tr((W_Delta + eps I)^{-1}) evaluated as
/// sum eps / (lambda (lambda + eps)), +infinity when W_Delta is singular.
double perturbation_gap(const NodeGramianSet& gramians, const ActuatorSet& delta, double eps);

struct ControllabilityReport {
  bool controllable = false;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
};

ControllabilityReport is_controllable(const NodeGramianSet& gramians, const ActuatorSet& delta);

/// Rank of [B, AB, ..., A^{n-1} B] with B = diag(delta), columns normalized.
int kalman_rank(const LinearSystem& system, const ActuatorSet& delta);

/// (x1 - e^{A tau} x0)^T W_Delta^{-1} (x1 - e^{A tau} x0); on the infinite
/// horizon the drift term vanishes.
double min_transfer_energy(const NodeGramianSet& gramians, const ActuatorSet& delta,
                           const Vector& x0, const Vector& x1);

}  // namespace actplace

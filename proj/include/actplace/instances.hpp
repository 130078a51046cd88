#pragma once

#include <cstdint>
#include <vector>

#include "actplace/system.hpp"

namespace actplace {

/// Directed integrator chain: A_ii = -1, A_{i+1,i} = 1. Default window [0, 1].
LinearSystem chain_network(int n, Horizon horizon = FiniteHorizon{0.0, 1.0});

struct RandomNetworkConfig {
  int n = 10;
  std::uint64_t seed = 1;
  static constexpr double stabilization_factor = 1.1;

  /// 2 ln(n) / n clamped to 1.
  double edge_probability() const;
};

struct ErdosRenyiSystem {
  LinearSystem system;
  double raw_rightmost_real_part = 0.0;
  double shift = 0.0;  // A = A_raw - shift * I
  std::size_t edge_count = 0;
};

/// Bernoulli(p) adjacency over all ordered pairs (diagonal included) in
/// row-major order, then a standard normal weight per edge in the same
/// order, then A -= 1.1 * max Re(lambda) * I when that value is >= 0.
/// Returned with an infinite horizon.
ErdosRenyiSystem erdos_renyi_system(const RandomNetworkConfig& config);

/// Collection of non-empty subsets of {1..m}, elements one-based.
class HittingSetInstance {
 public:
  HittingSetInstance(int m, std::vector<std::vector<int>> sets);

  int m() const noexcept { return m_; }
  int p() const noexcept { return static_cast<int>(sets_.size()); }
  const std::vector<std::vector<int>>& sets() const noexcept { return sets_; }
  /// p x m zero-one matrix, C_ij = 1 iff set i contains element j.
  Matrix incidence() const;
  /// True when `elements` (one-based) meets every set.
  bool is_hit_by(const std::vector<int>& elements) const;

 private:
  int m_;
  std::vector<std::vector<int>> sets_;
};

struct HittingSetSystem {
  LinearSystem system;
  Matrix v;  // A = V^{-1} D V
  int m = 0;
  int p = 0;
  // Node blocks (zero-based, half-open): elements [0, m), sets [m, m + p), apex m + p.
  int set_block_begin() const { return m; }
  int apex() const { return m + p; }
};

/// n = m + p + 1, V = [[2I, 0, e], [C, (m+1)I, 0], [0, 0, 1]], D = diag(1..n),
/// A = V^{-1} D V over the window [0, ln n]. Throws if V fails the diagonal
/// dominance or closed-form inverse self-checks.
HittingSetSystem hitting_set_system(const HittingSetInstance& instance);

/// Closed-form V^{-1} for the reduction's V.
Matrix hitting_set_v_inverse(const HittingSetInstance& instance);

bool strictly_diagonally_dominant(const Matrix& m);

}  // namespace actplace

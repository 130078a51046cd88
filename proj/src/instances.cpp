#include "actplace/instances.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "actplace/errors.hpp"
#include "actplace/random.hpp"

namespace actplace {

LinearSystem chain_network(int n, Horizon horizon) {
  if (n < 1) throw Error(ErrorKind::parameter, "chain_network: n must be at least 1");
  Matrix a = -Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i + 1, i) = 1.0;
  return LinearSystem(std::move(a), horizon);
}

double RandomNetworkConfig::edge_probability() const {
  return std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / n);
}

ErdosRenyiSystem erdos_renyi_system(const RandomNetworkConfig& config) {
  if (config.n < 2) throw Error(ErrorKind::parameter, "erdos_renyi_system: n must be at least 2");
  const int n = config.n;
  const double p = config.edge_probability();
  PortableRng rng(config.seed);

  Matrix a = Matrix::Zero(n, n);
  std::size_t edges = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.bernoulli(p)) {
        a(i, j) = 1.0;
        ++edges;
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) a(i, j) = rng.normal();

  const double rightmost = linalg::max_real_eigenvalue(a);
  double shift = 0.0;
  // An already-stable draw is left alone; a rightmost part at (or within
  // rounding of) zero still gets a small positive shift.
  if (rightmost >= -linalg::hurwitz_margin)
    shift = RandomNetworkConfig::stabilization_factor * std::max(rightmost, 1e-6);
  a.diagonal().array() -= shift;
  return {LinearSystem(std::move(a), InfiniteHorizon{}), rightmost, shift, edges};
}

HittingSetInstance::HittingSetInstance(int m, std::vector<std::vector<int>> sets) : m_(m), sets_(std::move(sets)) {
  if (m < 1) throw Error(ErrorKind::invalid_input, "hitting set: m must be at least 1");
  if (sets_.empty()) throw Error(ErrorKind::invalid_input, "hitting set: collection must be non-empty");
  std::vector<bool> covered(static_cast<std::size_t>(m), false);
  for (auto& s : sets_) {
    if (s.empty()) throw Error(ErrorKind::invalid_input, "hitting set: every set must be non-empty");
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw Error(ErrorKind::invalid_input, "hitting set: repeated element within a set");
    for (const int e : s) {
      if (e < 1 || e > m) {
        std::ostringstream msg;
        msg << "hitting set: element " << e << " outside 1.." << m;
        throw Error(ErrorKind::invalid_input, msg.str());
      }
      covered[static_cast<std::size_t>(e - 1)] = true;
    }
  }
  for (int e = 0; e < m; ++e)
    if (!covered[static_cast<std::size_t>(e)]) {
      std::ostringstream msg;
      msg << "hitting set: element " << e + 1 << " appears in no set";
      throw Error(ErrorKind::invalid_input, msg.str());
    }
}

Matrix HittingSetInstance::incidence() const {
  Matrix c = Matrix::Zero(p(), m_);
  for (int i = 0; i < p(); ++i)
    for (const int e : sets_[static_cast<std::size_t>(i)]) c(i, e - 1) = 1.0;
  return c;
}

bool HittingSetInstance::is_hit_by(const std::vector<int>& elements) const {
  return std::all_of(sets_.begin(), sets_.end(), [&](const std::vector<int>& s) {
    return std::any_of(s.begin(), s.end(), [&](int e) {
      return std::find(elements.begin(), elements.end(), e) != elements.end();
    });
  });
}

bool strictly_diagonally_dominant(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    if (!(std::abs(m(i, i)) > off)) return false;
  }
  return true;
}

Matrix hitting_set_v_inverse(const HittingSetInstance& instance) {
  const int m = instance.m();
  const int p = instance.p();
  const int n = m + p + 1;
  const int apex = n - 1;
  const double scale = m + 1.0;
  Matrix inv = Matrix::Zero(n, n);
  for (int i = 0; i < m; ++i) {
    inv(i, i) = 0.5;
    inv(i, apex) = -0.5;
  }
  for (int i = 0; i < p; ++i) {
    const auto& set = instance.sets()[static_cast<std::size_t>(i)];
    inv(m + i, m + i) = 1.0 / scale;
    for (const int e : set) inv(m + i, e - 1) = -1.0 / (2.0 * scale);
    inv(m + i, apex) = static_cast<double>(set.size()) / (2.0 * scale);
  }
  inv(apex, apex) = 1.0;
  return inv;
}

HittingSetSystem hitting_set_system(const HittingSetInstance& instance) {
  const int m = instance.m();
  const int p = instance.p();
  const int n = m + p + 1;
  Matrix v = Matrix::Zero(n, n);
  v.topLeftCorner(m, m) = 2.0 * Matrix::Identity(m, m);
  v.block(0, n - 1, m, 1).setOnes();
  v.block(m, 0, p, m) = instance.incidence();
  v.block(m, m, p, p) = (m + 1.0) * Matrix::Identity(p, p);
  v(n - 1, n - 1) = 1.0;

  if (!strictly_diagonally_dominant(v))
    throw Error(ErrorKind::certification, "hitting_set_system: V is not strictly diagonally dominant");
  const Matrix v_inverse = hitting_set_v_inverse(instance);
  const double inverse_error = (v * v_inverse - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (inverse_error > 1e-12)
    throw Error(ErrorKind::certification, "hitting_set_system: closed-form V^{-1} check failed");

  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = i + 1.0;
  // A = V^{-1} (D V), solved against V rather than forming V^{-1}.
  Matrix a = v.partialPivLu().solve(d.asDiagonal() * v);
  return {LinearSystem(std::move(a), FiniteHorizon{0.0, std::log(static_cast<double>(n))}), std::move(v), m, p};
}

}  // namespace actplace

#include "actplace/system.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "actplace/errors.hpp"

namespace actplace {

LinearSystem::LinearSystem(Matrix a, Horizon horizon) : a_(std::move(a)), horizon_(horizon) {
  linalg::require_square(a_, "LinearSystem");
  linalg::require_finite(a_, "LinearSystem");
  if (const auto* finite = std::get_if<FiniteHorizon>(&horizon_)) {
    if (!(finite->t1 > finite->t0) || !std::isfinite(finite->t0) || !std::isfinite(finite->t1)) {
      std::ostringstream msg;
      msg << "LinearSystem: finite horizon requires t1 > t0 (got t0=" << finite->t0
          << ", t1=" << finite->t1 << ")";
      throw Error(ErrorKind::parameter, msg.str());
    }
  }
}

ActuatorSet::ActuatorSet(int n, std::vector<int> zero_based) : n_(n), members_(std::move(zero_based)) {
  if (n < 1) throw Error(ErrorKind::invalid_input, "ActuatorSet: ambient size must be positive");
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
    throw Error(ErrorKind::invalid_input, "ActuatorSet: duplicate node index");
  for (const int m : members_) {
    if (m < 0 || m >= n) {
      std::ostringstream msg;
      msg << "ActuatorSet: node " << m + 1 << " outside 1.." << n;
      throw Error(ErrorKind::invalid_input, msg.str());
    }
  }
}

ActuatorSet ActuatorSet::from_one_based(int n, const std::vector<int>& one_based) {
  std::vector<int> zero_based;
  zero_based.reserve(one_based.size());
  for (const int i : one_based) zero_based.push_back(i - 1);
  return ActuatorSet(n, std::move(zero_based));
}

ActuatorSet ActuatorSet::all(int n) {
  std::vector<int> members(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = i;
  return ActuatorSet(n, std::move(members));
}

ActuatorSet ActuatorSet::from_mask(int n, std::uint64_t mask) {
  std::vector<int> members;
  for (int i = 0; i < n; ++i)
    if (mask & (std::uint64_t{1} << i)) members.push_back(i);
  return ActuatorSet(n, std::move(members));
}

std::vector<int> ActuatorSet::one_based() const {
  std::vector<int> out(members_);
  for (int& m : out) ++m;
  return out;
}

bool ActuatorSet::contains(int node) const {
  return std::binary_search(members_.begin(), members_.end(), node);
}

void ActuatorSet::insert(int node) {
  if (node < 0 || node >= n_) throw Error(ErrorKind::invalid_input, "ActuatorSet::insert: index out of range");
  const auto it = std::lower_bound(members_.begin(), members_.end(), node);
  if (it != members_.end() && *it == node) return;
  members_.insert(it, node);
}

ActuatorSet ActuatorSet::with(int node) const {
  ActuatorSet copy(*this);
  copy.insert(node);
  return copy;
}

std::string ActuatorSet::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < members_.size(); ++k) out << (k ? "," : "") << members_[k] + 1;
  out << '}';
  return out.str();
}

std::string to_string(GramianMethod method) {
  return method == GramianMethod::finite_horizon ? "finite-horizon" : "infinite-horizon";
}

GramianMethod gramian_method_from_string(const std::string& tag) {
  if (tag == "finite-horizon" || tag == "finite") return GramianMethod::finite_horizon;
  if (tag == "infinite-horizon" || tag == "infinite") return GramianMethod::infinite_horizon;
  throw Error(ErrorKind::invalid_input, "unknown Gramian method tag '" + tag + "'");
}

NodeGramianSet::NodeGramianSet(LinearSystem system, GramianMethod method, std::vector<Matrix> per_node,
                               std::vector<double> residuals)
    : system_(std::move(system)),
      method_(method),
      per_node_(std::move(per_node)),
      residuals_(std::move(residuals)) {
  const int n = system_.n();
  if (static_cast<int>(per_node_.size()) != n)
    throw Error(ErrorKind::dimension, "NodeGramianSet: expected one Gramian per node");
  full_ = Matrix::Zero(n, n);
  for (auto& w : per_node_) {
    if (w.rows() != n || w.cols() != n)
      throw Error(ErrorKind::dimension, "NodeGramianSet: per-node Gramian has wrong shape");
    linalg::require_finite(w, "NodeGramianSet");
    w = linalg::symmetrize(w);
    full_ += w;
  }
  controllability_tolerance_ = 1e-12 * (1.0 + full_.trace() / n);
}

NodeGramianSet finite_horizon_node_gramians(const LinearSystem& system, Exec exec) {
  const auto* horizon = std::get_if<FiniteHorizon>(&system.horizon());
  if (horizon == nullptr)
    throw Error(ErrorKind::parameter, "finite_horizon_node_gramians: system has an infinite horizon");
  const int n = system.n();
  const double tau = horizon->duration();
  const Matrix& a = system.a();

  std::vector<Matrix> per_node(static_cast<std::size_t>(n));
  for_each_index(exec, per_node.size(), [&](std::size_t i) {
    Matrix block = Matrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -a * tau;
    block(static_cast<Eigen::Index>(i), n + static_cast<Eigen::Index>(i)) = tau;
    block.bottomRightCorner(n, n) = a.transpose() * tau;
    const Matrix e = linalg::expm(block);
    // e = [[F11, F12], [0, F22]] with F22 = e^{A^T tau}; W = F22^T F12.
    const Matrix w = e.bottomRightCorner(n, n).transpose() * e.topRightCorner(n, n);
    per_node[i] = 0.5 * (w + w.transpose());
  });
  return NodeGramianSet(system, GramianMethod::finite_horizon, std::move(per_node));
}

NodeGramianSet infinite_horizon_node_gramians(const LinearSystem& system, Exec exec) {
  const int n = system.n();
  const linalg::LyapunovSolver solver(system.a());
  std::vector<Matrix> per_node(static_cast<std::size_t>(n));
  std::vector<double> residuals(static_cast<std::size_t>(n));
  for_each_index(exec, per_node.size(), [&](std::size_t i) {
    Matrix q = Matrix::Zero(n, n);
    q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    per_node[i] = solver.solve(q);
    residuals[i] = solver.relative_residual(per_node[i], q);
  });
  return NodeGramianSet(system, GramianMethod::infinite_horizon, std::move(per_node), std::move(residuals));
}

NodeGramianSet node_gramians(const LinearSystem& system, Exec exec) {
  return system.is_finite_horizon() ? finite_horizon_node_gramians(system, exec)
                                    : infinite_horizon_node_gramians(system, exec);
}

Matrix assemble_gramian(const NodeGramianSet& gramians, const ActuatorSet& delta) {
  if (delta.n() != gramians.n())
    throw Error(ErrorKind::dimension, "assemble_gramian: actuator set size does not match system");
  Matrix w = Matrix::Zero(gramians.n(), gramians.n());
  for (const int i : delta.members()) w += gramians.node(i);
  return w;
}

double energy_metric(const NodeGramianSet& gramians, const Matrix& w_delta, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::parameter, "energy_metric: eps must be non-negative");
  const Vector lambda = linalg::symmetric_eigenvalues(w_delta);
  if (eps > 0.0) return linalg::trace_perturbed_inverse(lambda, eps);
  if (lambda(0) <= gramians.controllability_tolerance()) return std::numeric_limits<double>::infinity();
  return lambda.cwiseInverse().sum();
}

double energy_metric(const NodeGramianSet& gramians, const ActuatorSet& delta, double eps) {
  return energy_metric(gramians, assemble_gramian(gramians, delta), eps);
}

double perturbation_gap(const NodeGramianSet& gramians, const ActuatorSet& delta, double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::parameter, "perturbation_gap: eps must be non-negative");
  const Vector lambda = linalg::symmetric_eigenvalues(assemble_gramian(gramians, delta));
  if (lambda(0) <= gramians.controllability_tolerance()) return std::numeric_limits<double>::infinity();
  double gap = 0.0;
  for (const double l : lambda) gap += eps / (l * (l + eps));
  return gap;
}

ControllabilityReport is_controllable(const NodeGramianSet& gramians, const ActuatorSet& delta) {
  ControllabilityReport report;
  report.tolerance = gramians.controllability_tolerance();
  report.min_eigenvalue = linalg::min_eigenvalue(assemble_gramian(gramians, delta));
  report.controllable = report.min_eigenvalue > report.tolerance;
  return report;
}

int kalman_rank(const LinearSystem& system, const ActuatorSet& delta) {
  const int n = system.n();
  const auto m = static_cast<Eigen::Index>(delta.size());
  if (m == 0) return 0;
  Matrix b = Matrix::Zero(n, m);
  for (Eigen::Index k = 0; k < m; ++k) b(delta.members()[static_cast<std::size_t>(k)], k) = 1.0;
  Matrix kalman(n, n * m);
  Matrix block = b;
  for (int p = 0; p < n; ++p) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double norm = block.col(k).norm();
      kalman.col(p * m + k) = norm > 0.0 ? Vector(block.col(k) / norm) : Vector(block.col(k));
    }
    block = system.a() * block;
  }
  return linalg::numerical_rank(kalman, 1e-10);
}

double min_transfer_energy(const NodeGramianSet& gramians, const ActuatorSet& delta, const Vector& x0,
                           const Vector& x1) {
  const int n = gramians.n();
  if (x0.size() != n || x1.size() != n)
    throw Error(ErrorKind::dimension, "min_transfer_energy: state vectors must have length n");
  const ControllabilityReport report = is_controllable(gramians, delta);
  if (!report.controllable) {
    std::ostringstream msg;
    msg << "min_transfer_energy: actuator set " << delta.to_string()
        << " does not render the system controllable (lambda_min=" << report.min_eigenvalue << ")";
    throw Error(ErrorKind::controllability, msg.str());
  }
  Vector drift = x1;
  if (const auto* horizon = std::get_if<FiniteHorizon>(&gramians.system().horizon()))
    drift -= linalg::expm(gramians.system().a() * horizon->duration()) * x0;
  const Matrix w = assemble_gramian(gramians, delta);
  const Eigen::LDLT<Matrix> ldlt(w);
  return drift.dot(ldlt.solve(drift));
}

}  // namespace actplace

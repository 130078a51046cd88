#pragma once
// Independent reference computations used only by tests. None of these call
// into the library's numerical kernels.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Taylor series with scaling and squaring; terms run until they stop moving
/// the sum. Slow but transparent.
inline Matrix expm_taylor(const Matrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 0.25) ++squarings;
  const Matrix x = m / std::ldexp(1.0, squarings);
  Matrix sum = Matrix::Identity(m.rows(), m.cols());
  Matrix term = sum;
  for (int k = 1; k < 60; ++k) {
    term = term * x / k;
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-20 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Adaptive Simpson on a matrix-valued integrand with max-abs error control,
/// absolute tolerance `tol`, bisection depth limit `depth`.
inline Matrix adaptive_simpson(const std::function<Matrix(double)>& f, double a, double b, double tol = 1e-10,
                               int depth = 30) {
  struct Rec {
    const std::function<Matrix(double)>& f;
    Matrix run(double a, double b, const Matrix& fa, const Matrix& fm, const Matrix& fb, const Matrix& whole,
               double tol, int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const Matrix flm = f(lm), frm = f(rm);
      const Matrix left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const Matrix right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const Matrix diff = left + right - whole;
      if (depth <= 0 || diff.cwiseAbs().maxCoeff() <= 15.0 * tol) return left + right + diff / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + run(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } rec{f};
  const Matrix fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Matrix whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec.run(a, b, fa, fm, fb, whole, tol, depth);
}

/// W_i = int_0^T e^{At} e_i e_i^T e^{A^T t} dt by quadrature.
inline Matrix node_gramian_quadrature(const Matrix& a, int i, double duration, double tol = 1e-10) {
  const auto integrand = [&](double t) {
    const Vector col = expm_taylor(a * t).col(i);
    return Matrix(col * col.transpose());
  };
  // Split into unit pieces so the adaptive rule starts from a sane grid.
  const int pieces = std::max(1, static_cast<int>(std::ceil(duration)));
  Matrix total = Matrix::Zero(a.rows(), a.cols());
  for (int k = 0; k < pieces; ++k)
    total += adaptive_simpson(integrand, duration * k / pieces, duration * (k + 1) / pieces, tol / pieces);
  return total;
}

/// Kronecker-vectorized Lyapunov solve: (I (x) A + A (x) I) vec G = -vec Q.
inline Matrix lyapunov_kronecker(const Matrix& a, const Matrix& q) {
  const Eigen::Index n = a.rows();
  Matrix k = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      k.block(i * n, j * n, n, n) += a(i, j) * Matrix::Identity(n, n);  // A (x) I acts on column blocks
      if (i == j) k.block(i * n, i * n, n, n) += a;                      // I (x) A
    }
  const Vector vq = Eigen::Map<const Vector>(q.data(), n * n);
  Vector vg = k.fullPivLu().solve(-vq);
  return Eigen::Map<Matrix>(vg.data(), n, n);
}

/// tr((M + eps I)^{-1}) by explicit inversion.
inline double trace_inverse_direct(const Matrix& m, double eps) {
  return (m + eps * Matrix::Identity(m.rows(), m.cols())).inverse().trace();
}

/// Rank of the Kalman matrix by full-pivot LU on a column-normalized copy.
inline int kalman_rank(const Matrix& a, const std::vector<int>& nodes, double tol = 1e-9) {
  const Eigen::Index n = a.rows();
  Matrix b = Matrix::Zero(n, static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t k = 0; k < nodes.size(); ++k) b(nodes[k], static_cast<Eigen::Index>(k)) = 1.0;
  Matrix kal(n, n * b.cols());
  Matrix block = b;
  for (Eigen::Index p = 0; p < n; ++p) {
    kal.middleCols(p * b.cols(), b.cols()) = block;
    block = a * block;
  }
  for (Eigen::Index c = 0; c < kal.cols(); ++c)
    if (kal.col(c).norm() > 0) kal.col(c).normalize();
  Eigen::FullPivLU<Matrix> lu(kal);
  lu.setThreshold(tol);
  return static_cast<int>(lu.rank());
}

/// Hurwitz matrix with a random sparse pattern and a margin of at least `margin`.
inline Matrix random_hurwitz(int n, std::mt19937_64& rng, double margin = 0.2) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution edge(0.5);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || edge(rng)) a(i, j) = normal(rng);
  const double rightmost = a.eigenvalues().real().maxCoeff();
  a -= (rightmost + margin) * Matrix::Identity(n, n);
  return a;
}

inline Matrix random_psd(int n, std::mt19937_64& rng, int rank = -1) {
  std::normal_distribution<double> normal;
  const int k = rank < 0 ? n : rank;
  Matrix r(k, n);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = normal(rng);
  return r.transpose() * r;
}

inline std::vector<int> members(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < 32; ++i)
    if (mask & (1u << i)) out.push_back(i);
  return out;
}

/// Non-empty subsets of {0..n-1} by size, then lexicographically on the
/// sorted member lists.
inline std::vector<std::uint32_t> subsets_by_size(int n) {
  std::vector<std::uint32_t> masks;
  for (std::uint32_t m = 1; m < (1u << n); ++m) masks.push_back(m);
  std::sort(masks.begin(), masks.end(), [](std::uint32_t x, std::uint32_t y) {
    const int px = __builtin_popcount(x), py = __builtin_popcount(y);
    return px != py ? px < py : members(x) < members(y);
  });
  return masks;
}

}  // namespace oracle

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>

namespace actplace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Rightmost eigenvalue real part must be below -hurwitz_margin.
inline constexpr double hurwitz_margin = 1e-9;
/// Relative symmetry tolerance used before symmetrizing inputs.
inline constexpr double symmetry_tolerance = 1e-8;
/// PSD tolerance is psd_tolerance * ||M||_2.
inline constexpr double psd_tolerance = 1e-8;

void require_square(const Matrix& m, const char* who);
void require_finite(const Matrix& m, const char* who);

/// (M + M^T) / 2 after checking max |M_ij - M_ji| against the tolerance,
/// scaled by max(1, max|M_ij|).
Matrix symmetrize(const Matrix& m);

/// Matrix exponential by scaling and squaring with diagonal Pade
/// approximants of degree 3, 5, 7, 9 or 13 (Higham's 2005 variant).
Matrix expm(const Matrix& m);

/// Eigenvalues of a symmetric matrix in ascending order.
Vector symmetric_eigenvalues(const Matrix& m);

double min_eigenvalue(const Matrix& m);

/// Largest real part over the spectrum of a general square matrix.
double max_real_eigenvalue(const Matrix& a);

/// tr((M + eps I)^{-1}) as sum_i 1 / (lambda_i + eps). Eigenvalues of M are
/// clamped at zero since M is PSD up to rounding.
double trace_perturbed_inverse(const Matrix& m, double eps);
double trace_perturbed_inverse(const Vector& eigenvalues, double eps);

/// Numerical rank via singular values, threshold rel_tol * sigma_max.
int numerical_rank(const Matrix& m, double rel_tol = 1e-10);

enum class LyapunovMethod { automatic, kronecker, schur };

/// Systems at or below this order use the Kronecker solve under `automatic`.
inline constexpr Eigen::Index kronecker_max_order = 12;

/// Solves A G + G A^T = -Q for Hurwitz A. One instance factors A once and
/// serves any number of right-hand sides; solve() is const and thread-safe.
class LyapunovSolver {
 public:
  explicit LyapunovSolver(const Matrix& a, LyapunovMethod method = LyapunovMethod::automatic);
  ~LyapunovSolver();
  LyapunovSolver(LyapunovSolver&&) noexcept;
  LyapunovSolver& operator=(LyapunovSolver&&) noexcept;

  Matrix solve(const Matrix& q) const;
  LyapunovMethod method() const noexcept { return method_; }
  Eigen::Index order() const noexcept { return a_.rows(); }

  /// ||A G + G A^T + Q||_F / (1 + ||Q||_F).
  double relative_residual(const Matrix& g, const Matrix& q) const;

 private:
  struct Factorization;
  Matrix a_;
  LyapunovMethod method_;
  std::unique_ptr<Factorization> factors_;
};

Matrix solve_lyapunov(const Matrix& a, const Matrix& q,
                      LyapunovMethod method = LyapunovMethod::automatic);

}  // namespace linalg
}  // namespace actplace

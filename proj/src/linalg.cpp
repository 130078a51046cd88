#include "actplace/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "actplace/errors.hpp"

namespace actplace::linalg {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

// Pade coefficients b_0..b_m for degrees 3, 5, 7, 9, 13.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// 1-norm thresholds below which the degree-m approximant meets unit roundoff.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double one_norm(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

template <std::size_t N>
Matrix pade_low_order(const Matrix& a, const std::array<double, N>& b) {
  // U = A * sum_{k odd} b_k A^{k-1}, V = sum_{k even} b_k A^k.
  const auto n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < N; k += 2) {
    v += b[k] * power;
    u_inner += b[k + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  const auto n = a.rows();
  const auto& b = kPade13;
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner =
      a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
  const Matrix u = a * u_inner;
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

// Column-wise back substitution for the complex Schur form:
// T Y + Y T^H = C with T upper triangular.
ComplexMatrix solve_triangular_lyapunov(const ComplexMatrix& t, const ComplexMatrix& c) {
  const auto n = t.rows();
  ComplexMatrix y = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = c.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    ComplexMatrix shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

}  // namespace

void require_square(const Matrix& m, const char* who) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << who << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorKind::dimension, msg.str());
  }
}

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) throw Error(ErrorKind::invalid_input, std::string(who) + ": non-finite entries");
}

Matrix symmetrize(const Matrix& m) {
  require_square(m, "symmetrize");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > symmetry_tolerance * scale) {
    std::ostringstream msg;
    msg << "symmetrize: matrix asymmetric by " << asym;
    throw Error(ErrorKind::invalid_input, msg.str());
  }
  return 0.5 * (m + m.transpose());
}

Matrix expm(const Matrix& m) {
  require_square(m, "expm");
  require_finite(m, "expm");
  const double norm = one_norm(m);
  if (norm <= kTheta3) return pade_low_order(m, kPade3);
  if (norm <= kTheta5) return pade_low_order(m, kPade5);
  if (norm <= kTheta7) return pade_low_order(m, kPade7);
  if (norm <= kTheta9) return pade_low_order(m, kPade9);

  int squarings = 0;
  if (norm > kTheta13) squarings = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  Matrix result = pade13(m * std::ldexp(1.0, -squarings));
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Vector symmetric_eigenvalues(const Matrix& m) {
  const Matrix sym = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::certification, "symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

double min_eigenvalue(const Matrix& m) { return symmetric_eigenvalues(m)(0); }

double max_real_eigenvalue(const Matrix& a) {
  require_square(a, "max_real_eigenvalue");
  require_finite(a, "max_real_eigenvalue");
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::certification, "eigensolver did not converge");
  return solver.eigenvalues().real().maxCoeff();
}

double trace_perturbed_inverse(const Vector& eigenvalues, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::parameter, "trace_perturbed_inverse: eps must be positive");
  double sum = 0.0;
  for (const double lambda : eigenvalues) sum += 1.0 / (std::max(lambda, 0.0) + eps);
  return sum;
}

double trace_perturbed_inverse(const Matrix& m, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::parameter, "trace_perturbed_inverse: eps must be positive");
  return trace_perturbed_inverse(symmetric_eigenvalues(m), eps);
}

int numerical_rank(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  return static_cast<int>((s.array() > cutoff).count());
}

struct LyapunovSolver::Factorization {
  // Kronecker path: LU of (I (x) A + A (x) I).
  Eigen::PartialPivLU<Matrix> kron_lu;
  // Schur path: A = U T U^H.
  ComplexMatrix schur_t;
  ComplexMatrix schur_u;
};

LyapunovSolver::LyapunovSolver(const Matrix& a, LyapunovMethod method)
    : a_(a), method_(method), factors_(std::make_unique<Factorization>()) {
  require_square(a, "solve_lyapunov");
  require_finite(a, "solve_lyapunov");
  const double rightmost = max_real_eigenvalue(a);
  if (rightmost >= -hurwitz_margin) {
    std::ostringstream msg;
    msg << "solve_lyapunov: A is not Hurwitz (rightmost eigenvalue real part " << rightmost << ")";
    throw StabilityError(msg.str(), rightmost);
  }
  const auto n = a.rows();
  if (method_ == LyapunovMethod::automatic)
    method_ = n <= kronecker_max_order ? LyapunovMethod::kronecker : LyapunovMethod::schur;

  if (method_ == LyapunovMethod::kronecker) {
    const Matrix ident = Matrix::Identity(n, n);
    Matrix kron = Matrix::Zero(n * n, n * n);
    // Column-major vec: vec(A X) = (I (x) A) vec X, vec(X A^T) = (A (x) I) vec X.
    for (Eigen::Index i = 0; i < n; ++i) {
      kron.block(i * n, i * n, n, n) += a;
      for (Eigen::Index j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) += a(i, j) * ident;
    }
    factors_->kron_lu.compute(kron);
  } else {
    Eigen::ComplexSchur<Matrix> schur(a);
    if (schur.info() != Eigen::Success)
      throw Error(ErrorKind::certification, "solve_lyapunov: Schur decomposition failed");
    factors_->schur_t = schur.matrixT();
    factors_->schur_u = schur.matrixU();
  }
}

LyapunovSolver::~LyapunovSolver() = default;
LyapunovSolver::LyapunovSolver(LyapunovSolver&&) noexcept = default;
LyapunovSolver& LyapunovSolver::operator=(LyapunovSolver&&) noexcept = default;

Matrix LyapunovSolver::solve(const Matrix& q) const {
  const auto n = a_.rows();
  if (q.rows() != n || q.cols() != n) {
    std::ostringstream msg;
    msg << "solve_lyapunov: Q is " << q.rows() << "x" << q.cols() << ", expected " << n << "x" << n;
    throw Error(ErrorKind::dimension, msg.str());
  }
  const Matrix qs = symmetrize(q);
  Matrix g(n, n);
  if (method_ == LyapunovMethod::kronecker) {
    const Vector rhs = -Eigen::Map<const Vector>(qs.data(), n * n);
    const Vector x = factors_->kron_lu.solve(rhs);
    g = Eigen::Map<const Matrix>(x.data(), n, n);
  } else {
    const ComplexMatrix& u = factors_->schur_u;
    const ComplexMatrix c = -(u.adjoint() * qs.cast<std::complex<double>>() * u);
    const ComplexMatrix y = solve_triangular_lyapunov(factors_->schur_t, c);
    g = (u * y * u.adjoint()).real();
  }
  return 0.5 * (g + g.transpose());
}

double LyapunovSolver::relative_residual(const Matrix& g, const Matrix& q) const {
  return (a_ * g + g * a_.transpose() + q).norm() / (1.0 + q.norm());
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q, LyapunovMethod method) {
  return LyapunovSolver(a, method).solve(q);
}

}  // namespace actplace::linalg

#include <Eigen/Eigenvalues>
#include <cmath>

#include "pinflip/errors.hpp"
#include "pinflip/rng.hpp"
#include "pinflip/spectral.hpp"

namespace pinflip {

namespace {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Orthogonalises w against d and the first `cols` columns of V (classical
// Gram-Schmidt, repeated once when the first pass cancels most of w).
Vector orthogonalize(Vector& w, const Vector& d, const Matrix& V, Eigen::Index cols) {
  Vector coeff = Vector::Zero(cols);
  for (int pass = 0; pass < 2; ++pass) {
    const double before = w.norm();
    w -= d * d.dot(w);
    if (cols > 0) {
      const Vector c = V.leftCols(cols).transpose() * w;
      w -= V.leftCols(cols) * c;
      coeff += c;
    }
    if (w.norm() > 0.7 * before) break;
  }
  return coeff;
}

Vector random_start(std::size_t n, const Vector& d, const Matrix& V, Eigen::Index cols, std::uint64_t stream) {
  Philox rng(0x5eed, stream);
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform01(rng) - 0.5;
  orthogonalize(v, d, V, cols);
  return v / v.norm();
}

}  // namespace

LanczosResult lanczos_smallest(const std::function<void(const Vector&, Vector&)>& op, std::size_t n,
                               const Vector& deflate, const GapOptions& options) {
  if (n < 3) throw ArgumentError("iterative eigensolver needs at least 3 states");
  const Vector d = deflate / deflate.norm();
  const Eigen::Index m = std::min<Eigen::Index>(options.krylov_dim, static_cast<Eigen::Index>(n) - 1);
  const Eigen::Index keep = std::clamp<Eigen::Index>(options.keep, 1, m - 1);

  Matrix V(static_cast<Eigen::Index>(n), m + 1);
  Matrix H = Matrix::Zero(m + 1, m + 1);
  V.col(0) = random_start(n, d, V, 0, 0);
  Eigen::Index start = 0;
  Vector w(static_cast<Eigen::Index>(n));
  LanczosResult result;
  double last_residual = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    double beta = 0.0;
    for (Eigen::Index j = start; j < m; ++j) {
      op(V.col(j), w);
      ++result.iterations;
      const Vector c = orthogonalize(w, d, V, j + 1);
      H.col(j).head(j + 1) = c;
      beta = w.norm();
      const double scale = std::max(1.0, H.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff());
      if (beta < 1e-13 * scale) {
        // Invariant subspace found; continue from a fresh orthogonal direction.
        V.col(j + 1) = random_start(n, d, V, j + 1, static_cast<std::uint64_t>(result.iterations));
        beta = 0.0;
      } else {
        V.col(j + 1) = w / beta;
      }
    }
    Matrix T(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) T(i, j) = T(j, i) = H(i, j);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(T);
    if (es.info() != Eigen::Success) throw ConvergenceError("projected eigenproblem failed", last_residual);
    const Vector& theta = es.eigenvalues();
    const Matrix& Y = es.eigenvectors();
    const double estimate = std::fabs(beta * Y(m - 1, 0));
    if (estimate < options.tolerance) {
      Vector x = V.leftCols(m) * Y.col(0);
      x -= d * d.dot(x);
      x /= x.norm();
      op(x, w);
      const double value = x.dot(w);
      w -= value * x;
      w -= d * d.dot(w);
      const double true_residual = w.norm();
      last_residual = true_residual;
      if (true_residual < 10.0 * options.tolerance) {
        result.value = value;
        result.vector = x;
        result.residual = true_residual;
        return result;
      }
    } else {
      last_residual = estimate;
    }
    // Thick restart: keep the `keep` smallest Ritz vectors plus the residual direction.
    const Matrix kept = V.leftCols(m) * Y.leftCols(keep);
    const Vector next = V.col(m);
    V.leftCols(keep) = kept;
    V.col(keep) = next;
    H.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) {
      H(i, i) = theta[i];
      H(i, keep) = beta * Y(m - 1, i);
    }
    start = keep;
  }
  throw ConvergenceError("Lanczos did not converge to residual " + std::to_string(options.tolerance), last_residual);
}

}  // namespace pinflip

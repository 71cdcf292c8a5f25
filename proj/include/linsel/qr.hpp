#ifndef LINSEL_QR_HPP
#define LINSEL_QR_HPP

#include <Eigen/Core>
#include <vector>

namespace linsel {

/// QR factorization M = Q R of an m x n matrix with m >= n, built from
/// Householder reflectors U = I - v v^T / alpha with v = z + |z| e1,
/// alpha = |v|^2 / 2, so that U z = -|z| e1. Q is the transpose of the
/// product of the reflectors; R carries an upper-triangular n x n block
/// stacked over zeros.
struct QRFactorization {
  Eigen::MatrixXd Q;  // m x m orthogonal
  Eigen::MatrixXd R;  // m x n, zero strictly below the main diagonal
  /// Columns whose leading vector was numerically zero; the reflector is
  /// skipped there (identity) and the defect recorded.
  std::vector<int> deficient_columns;
};

/// Factor M (m >= n). `tol_rank` only controls when a reflector is skipped
/// as degenerate; it does not affect well-conditioned input.
QRFactorization householder_qr(const Eigen::MatrixXd& M,
                               double tol_rank = 1e-12);

/// Greedily selected row subset forming a basis of the row space.
struct RowBasis {
  std::vector<int> index_set;  // 0-based row indices, increasing
  Eigen::MatrixXd rows;        // k x s, the selected rows of A
  int rank = 0;                // k
};

/// Process rows in natural order; keep a row iff its residual after
/// projection onto the span of already-kept rows exceeds
/// tol_rank * (1 + max|A|). Deterministic: no pivoting by magnitude.
RowBasis select_row_basis(const Eigen::MatrixXd& A, double tol_rank);

/// Orthonormal basis of Ker A as the trailing s-k columns of Q from the QR
/// factorization of the selected rows transposed. Returns s x (s-k);
/// a zero matrix yields the identity (kernel is the whole space).
Eigen::MatrixXd ker_basis(const Eigen::MatrixXd& A, double tol_rank);

/// P1 w: projection of w onto Ker A^perp (the row space), computed as
/// w - N N^T w with N = ker_basis(A).
Eigen::VectorXd proj_ker_perp(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& w, double tol_rank);

/// P2 w: projection of w onto Ker A; satisfies P1 w + P2 w = w exactly.
Eigen::VectorXd proj_ker(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                         double tol_rank);

/// Solution flat of a consistent linear system A y = b: the minimal-norm
/// solution plus an orthonormal kernel basis. Solves exactly on the selected
/// row basis; consistency of the remaining rows is the caller's concern.
struct LinearFlat {
  Eigen::VectorXd base;    // minimal-norm solution, orthogonal to the kernel
  Eigen::MatrixXd kernel;  // s x (s-k), orthonormal columns
};

LinearFlat solve_min_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          double tol_rank);

}  // namespace linsel

#endif

#include "linsel/qr.hpp"

#include <cmath>

#include "linsel/errors.hpp"

namespace linsel {

namespace {

double max_abs(const Eigen::MatrixXd& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

}  // namespace

QRFactorization householder_qr(const Eigen::MatrixXd& M, double tol_rank) {
  const Eigen::Index m = M.rows();
  const Eigen::Index n = M.cols();
  if (m < n) throw ContractError("householder_qr requires m >= n");

  QRFactorization f;
  f.R = M;
  f.Q = Eigen::MatrixXd::Identity(m, m);  // accumulates the reflector product
  const double scale = 1.0 + max_abs(M);

  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd z = f.R.block(j, j, m - j, 1);
    const double znorm = z.norm();
    if (znorm <= tol_rank * scale) {
      // Degenerate leading vector: skip the reflector and record the defect.
      f.deficient_columns.push_back(static_cast<int>(j));
      continue;
    }
    Eigen::VectorXd v = z;
    v[0] += znorm;
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 <= tol_rank * tol_rank * scale * scale) {
      // z is already -|z| e1 on the active minor: U z = -|z| e1 holds with
      // the identity. Cancellation in v = z + |z| e1 would otherwise occur.
      f.R(j, j) = z[0];
      f.R.block(j + 1, j, m - j - 1, 1).setZero();
      continue;
    }
    const double alpha = vnorm2 / 2.0;

    // Apply U = I - v v^T / alpha to the active block of R and to the
    // accumulated product. The eliminated column is written in its exact
    // reflected form, -|z| e1.
    auto apply = [&](Eigen::Ref<Eigen::MatrixXd> block) {
      Eigen::RowVectorXd w = (v.transpose() * block) / alpha;
      block.noalias() -= v * w;
    };
    if (j + 1 < n) apply(f.R.block(j, j + 1, m - j, n - j - 1));
    apply(f.Q.block(j, 0, m - j, m));
    f.R(j, j) = -znorm;
    f.R.block(j + 1, j, m - j - 1, 1).setZero();
  }

  // Q is the transpose of the product of the reflectors.
  f.Q.transposeInPlace();
  return f;
}

RowBasis select_row_basis(const Eigen::MatrixXd& A, double tol_rank) {
  const Eigen::Index r = A.rows();
  const Eigen::Index s = A.cols();
  const double thresh = tol_rank * (1.0 + max_abs(A));

  RowBasis basis;
  Eigen::MatrixXd W(s, 0);  // orthonormal directions of kept rows
  for (Eigen::Index i = 0; i < r; ++i) {
    Eigen::VectorXd v = A.row(i).transpose();
    if (W.cols() > 0) {
      v -= W * (W.transpose() * v);
      v -= W * (W.transpose() * v);  // reorthogonalize
    }
    const double resid = v.norm();
    if (resid > thresh) {
      basis.index_set.push_back(static_cast<int>(i));
      W.conservativeResize(s, W.cols() + 1);
      W.col(W.cols() - 1) = v / resid;
    }
  }
  basis.rank = static_cast<int>(basis.index_set.size());
  basis.rows.resize(basis.rank, s);
  for (int k = 0; k < basis.rank; ++k)
    basis.rows.row(k) = A.row(basis.index_set[k]);
  return basis;
}

Eigen::MatrixXd ker_basis(const Eigen::MatrixXd& A, double tol_rank) {
  const Eigen::Index s = A.cols();
  RowBasis basis = select_row_basis(A, tol_rank);
  if (basis.rank == 0) return Eigen::MatrixXd::Identity(s, s);
  QRFactorization f = householder_qr(basis.rows.transpose(), tol_rank);
  return f.Q.rightCols(s - basis.rank);
}

Eigen::VectorXd proj_ker_perp(const Eigen::MatrixXd& A,
                              const Eigen::VectorXd& w, double tol_rank) {
  Eigen::MatrixXd N = ker_basis(A, tol_rank);
  return w - N * (N.transpose() * w);
}

Eigen::VectorXd proj_ker(const Eigen::MatrixXd& A, const Eigen::VectorXd& w,
                         double tol_rank) {
  return w - proj_ker_perp(A, w, tol_rank);
}

LinearFlat solve_min_norm(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          double tol_rank) {
  const Eigen::Index s = A.cols();
  if (A.rows() != b.size())
    throw ContractError("solve_min_norm: dimension mismatch");

  RowBasis basis = select_row_basis(A, tol_rank);
  const int k = basis.rank;

  LinearFlat flat;
  if (k == 0) {
    flat.base = Eigen::VectorXd::Zero(s);
    flat.kernel = Eigen::MatrixXd::Identity(s, s);
    return flat;
  }

  // Factor the selected rows transposed: Atilde^T = Q R with R1 the leading
  // k x k upper triangle. Atilde y = b restricted to u = Q^T y reads
  // R1^T u1 = btilde; minimal norm forces the free block u2 = 0.
  QRFactorization f = householder_qr(basis.rows.transpose(), tol_rank);
  Eigen::VectorXd bt(k);
  for (int i = 0; i < k; ++i) bt[i] = b[basis.index_set[i]];

  Eigen::VectorXd u(k);
  for (int i = 0; i < k; ++i) {
    double acc = bt[i];
    for (int l = 0; l < i; ++l) acc -= f.R(l, i) * u[l];
    const double piv = f.R(i, i);
    if (piv == 0.0)
      throw Error("solve_min_norm: zero pivot on a selected basis row");
    u[i] = acc / piv;
  }

  flat.base = f.Q.leftCols(k) * u;
  flat.kernel = f.Q.rightCols(s - k);
  return flat;
}

}  // namespace linsel

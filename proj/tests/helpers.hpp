// Shared test utilities: independent oracles and canned instances. Oracles
// here deliberately avoid the library's own linear algebra so they stay an
// independent check of it.
#ifndef LINSEL_TESTS_HELPERS_HPP
#define LINSEL_TESTS_HELPERS_HPP

#include <Eigen/Core>
#include <random>
#include <vector>

#include "linsel/expr.hpp"

namespace linsel_tests {

// Classical Gram-Schmidt with one reorthogonalization pass over the rows of
// A; returns an orthonormal basis of the row space as columns.
inline Eigen::MatrixXd gs_rowspace_basis(const Eigen::MatrixXd& A,
                                         double tol) {
  const Eigen::Index s = A.cols();
  const double thresh =
      tol * (1.0 + (A.size() ? A.cwiseAbs().maxCoeff() : 0.0));
  Eigen::MatrixXd Q(s, 0);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    Eigen::VectorXd v = A.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < Q.cols(); ++c)
        v -= Q.col(c) * Q.col(c).dot(v);
    if (v.norm() > thresh) {
      Q.conservativeResize(s, Q.cols() + 1);
      Q.col(Q.cols() - 1) = v / v.norm();
    }
  }
  return Q;
}

// Oracle for the row-space projection P1 w.
inline Eigen::VectorXd gs_project_rowspace(const Eigen::MatrixXd& A,
                                           const Eigen::VectorXd& w,
                                           double tol) {
  Eigen::MatrixXd Q = gs_rowspace_basis(A, tol);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(w.size());
  for (Eigen::Index c = 0; c < Q.cols(); ++c) p += Q.col(c) * Q.col(c).dot(w);
  return p;
}

inline Eigen::MatrixXd random_matrix(std::mt19937& rng, int rows, int cols,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = dist(rng);
  return M;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int dim,
                                     double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = dist(rng);
  return v;
}

// A = [x1], gamma = [x1^2] on [-1, 1]: solvable, the unique continuous
// solution is phi(t) = t.
inline linsel::Problem x_squared_problem() {
  return linsel::parse_problem(R"json({
    "n": 1, "r": 1, "s": 1,
    "A": [["x1"]],
    "gamma": ["x1*x1"],
    "domain": {"lo": [-1], "hi": [1]}
  })json");
}

// A = [x1], gamma = [abs(x1)] on [-1, 1]: pointwise solvable but the
// one-sided limits at 0 are incompatible; no continuous solution.
inline linsel::Problem abs_problem() {
  return linsel::parse_problem(R"json({
    "n": 1, "r": 1, "s": 1,
    "A": [["x1"]],
    "gamma": ["abs(x1)"],
    "domain": {"lo": [-1], "hi": [1]}
  })json");
}

// Constant inconsistent system: both rows demand different values.
inline linsel::Problem inconsistent_problem() {
  return linsel::parse_problem(R"json({
    "n": 1, "r": 2, "s": 1,
    "A": [["1"], ["1"]],
    "gamma": ["1", "2"],
    "domain": {"lo": [0], "hi": [1]}
  })json");
}

// Constant full-rank system: the fiber is the single point (1/2, -1/3)
// everywhere.
inline linsel::Problem constant_problem() {
  return linsel::parse_problem(R"json({
    "n": 1, "r": 2, "s": 2,
    "A": [["1", "0"], ["0", "1"]],
    "gamma": ["1/2", "-1/3"],
    "domain": {"lo": [-1], "hi": [1]}
  })json");
}

// Zero system A = 0, gamma = 0: the fiber is all of R^s everywhere.
inline linsel::Problem full_space_problem(int n, int s) {
  linsel::Problem p;
  p.ambient_dim = n;
  p.A.rows = 1;
  p.A.cols = s;
  for (int j = 0; j < s; ++j)
    p.A.entries.push_back(linsel::ScalarExpr::constant(0.0));
  p.gamma.dim = 1;
  p.gamma.entries.push_back(linsel::ScalarExpr::constant(0.0));
  p.domain.lo = Eigen::VectorXd::Constant(n, -1.0);
  p.domain.hi = Eigen::VectorXd::Constant(n, 1.0);
  return p;
}

// Random polynomial entry of total degree <= 2 in n variables.
inline linsel::ScalarExpr random_poly(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  using E = linsel::ScalarExpr;
  E e = E::constant(coef(rng));
  for (int v = 0; v < n; ++v) {
    e = e + E::constant(coef(rng)) * E::coordinate(v);
    for (int w = v; w < n; ++w)
      e = e + E::constant(coef(rng)) * E::coordinate(v) * E::coordinate(w);
  }
  return e;
}

inline linsel::Problem random_poly_problem(std::mt19937& rng, int n, int r,
                                           int s) {
  linsel::Problem p;
  p.ambient_dim = n;
  p.A.rows = r;
  p.A.cols = s;
  for (int i = 0; i < r * s; ++i) p.A.entries.push_back(random_poly(rng, n));
  p.gamma.dim = r;
  for (int i = 0; i < r; ++i) p.gamma.entries.push_back(random_poly(rng, n));
  p.domain.lo = Eigen::VectorXd::Constant(n, -1.0);
  p.domain.hi = Eigen::VectorXd::Constant(n, 1.0);
  return p;
}

}  // namespace linsel_tests

#endif

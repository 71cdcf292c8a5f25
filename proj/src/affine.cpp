#include "linsel/affine.hpp"

#include <cmath>

#include "linsel/qr.hpp"

namespace linsel {

AffineFiber AffineFiber::empty(int ambient_dim) {
  AffineFiber f;
  f.empty_ = true;
  f.ambient_ = ambient_dim;
  return f;
}

AffineFiber AffineFiber::point(const Eigen::VectorXd& p) {
  AffineFiber f;
  f.empty_ = false;
  f.ambient_ = static_cast<int>(p.size());
  f.base_ = p;
  f.dir_ = Eigen::MatrixXd(p.size(), 0);
  return f;
}

AffineFiber AffineFiber::full_space(int ambient_dim) {
  AffineFiber f;
  f.empty_ = false;
  f.ambient_ = ambient_dim;
  f.base_ = Eigen::VectorXd::Zero(ambient_dim);
  f.dir_ = Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
  return f;
}

AffineFiber AffineFiber::from_flat(const Eigen::VectorXd& base,
                                   const Eigen::MatrixXd& dir) {
  AffineFiber f;
  f.empty_ = false;
  f.ambient_ = static_cast<int>(base.size());
  f.dir_ = dir;
  // Minimal-norm normalization: remove the direction components of the base.
  f.base_ = base;
  if (dir.cols() > 0) f.base_ -= dir * (dir.transpose() * base);
  return f;
}

int AffineFiber::dim() const {
  if (empty_) throw ContractError("dim() on an empty fiber");
  return static_cast<int>(dir_.cols());
}

const Eigen::VectorXd& AffineFiber::base() const {
  if (empty_) throw ContractError("base() on an empty fiber");
  return base_;
}

const Eigen::MatrixXd& AffineFiber::dir() const {
  if (empty_) throw ContractError("dir() on an empty fiber");
  return dir_;
}

AffineFiber compute_fiber(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& gamma, double tol_rank,
                          double tol_res) {
  if (A.rows() != gamma.size())
    throw ContractError("compute_fiber: A rows must match gamma length");
  LinearFlat flat = solve_min_norm(A, gamma, tol_rank);
  const double resid = (A * flat.base - gamma).norm();
  if (resid > tol_res * (1.0 + gamma.norm()))
    return AffineFiber::empty(static_cast<int>(A.cols()));
  return AffineFiber::from_flat(flat.base, flat.kernel);
}

Eigen::VectorXd project_affine(const AffineFiber& F,
                               const Eigen::VectorXd& w) {
  if (F.is_empty())
    throw ContractError("project_affine onto an empty fiber");
  if (w.size() != F.ambient_dim())
    throw ContractError("project_affine: dimension mismatch");
  if (F.dir().cols() == 0) return F.base();
  return F.base() + F.dir() * (F.dir().transpose() * (w - F.base()));
}

double dist_affine_point(const AffineFiber& F, const Eigen::VectorXd& w) {
  if (F.is_empty())
    throw ContractError("distance to an empty fiber is undefined");
  return (w - project_affine(F, w)).norm();
}

AffineFiber restrict_fiber(const AffineFiber& F,
                           const std::vector<FiberConstraint>& constraints,
                           double tol_rank) {
  if (F.is_empty()) throw ContractError("restrict_fiber on an empty fiber");
  const int s = F.ambient_dim();
  const int k = F.dim();
  const Eigen::VectorXd& p = F.base();
  const Eigen::MatrixXd& D = F.dir();

  // Stack the conditions M_j (p + D t - p_j) = 0, M_j = I - G_j G_j^T, in
  // normal-equation form: S = sum D^T M_j D, rhs = sum D^T M_j (p_j - p).
  // M_j is an orthogonal projector, so M_j^T M_j = M_j and the assembly
  // reduces to Gram products with the constraint direction bases.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  bool any_rows = false;
  for (const FiberConstraint& c : constraints) {
    if (c.target == nullptr || c.target->is_empty())
      throw ContractError("restrict_fiber: constraint fiber must be nonempty");
    const AffineFiber& G = *c.target;
    if (G.dim() == s) continue;  // full space constrains nothing
    any_rows = true;
    if (k == 0) continue;  // point fiber: only the eps checks below apply
    const Eigen::VectorXd w = G.base() - p;
    if (G.dim() == 0) {
      S += Eigen::MatrixXd::Identity(k, k);
      rhs += D.transpose() * w;
    } else {
      const Eigen::MatrixXd Gm = D.transpose() * G.dir();  // k x dim(G)
      S += Eigen::MatrixXd::Identity(k, k) - Gm * Gm.transpose();
      rhs += D.transpose() * w - Gm * (G.dir().transpose() * w);
    }
  }

  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd tdir = Eigen::MatrixXd::Identity(k, k);
  if (any_rows && k > 0) {
    LinearFlat flat = solve_min_norm(S, rhs, tol_rank);
    t0 = flat.base;
    tdir = flat.kernel;
  }

  const Eigen::VectorXd v0 = k > 0 ? Eigen::VectorXd(p + D * t0) : p;
  for (const FiberConstraint& c : constraints) {
    if (dist_affine_point(*c.target, v0) > c.eps)
      return AffineFiber::empty(s);
  }
  if (k == 0) return F;
  return AffineFiber::from_flat(v0, D * tdir);
}

bool fibers_close(const AffineFiber& F, const AffineFiber& G, double tol) {
  if (F.is_empty() != G.is_empty()) return false;
  if (F.is_empty()) return true;
  if (F.dim() != G.dim()) return false;
  if (F.base().size() > 0 &&
      (F.base() - G.base()).cwiseAbs().maxCoeff() > tol)
    return false;
  if (F.dim() == 0) return true;
  const Eigen::MatrixXd Pf = F.dir() * F.dir().transpose();
  const Eigen::MatrixXd Pg = G.dir() * G.dir().transpose();
  return (Pf - Pg).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace linsel

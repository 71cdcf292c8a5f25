#ifndef LINSEL_AFFINE_HPP
#define LINSEL_AFFINE_HPP

#include <Eigen/Core>
#include <vector>

#include "linsel/config.hpp"
#include "linsel/errors.hpp"

namespace linsel {

/// An affine subspace of R^s. The empty set and the whole space are both
/// allowed. Nonempty fibers are stored minimal-norm-normalized: the base
/// point is orthogonal to the direction columns, which makes it the unique
/// nearest point of the fiber to the origin and gives a canonical
/// representation comparable across refinement steps.
class AffineFiber {
public:
  static AffineFiber empty(int ambient_dim);
  static AffineFiber point(const Eigen::VectorXd& p);
  static AffineFiber full_space(int ambient_dim);
  /// Build from any base point and direction basis; renormalizes so that
  /// base is orthogonal to the (orthonormal) direction columns.
  static AffineFiber from_flat(const Eigen::VectorXd& base,
                               const Eigen::MatrixXd& dir);

  bool is_empty() const { return empty_; }
  int ambient_dim() const { return ambient_; }
  /// Dimension of the direction space; only valid when nonempty.
  int dim() const;
  const Eigen::VectorXd& base() const;
  const Eigen::MatrixXd& dir() const;

private:
  bool empty_ = true;
  int ambient_ = 0;
  Eigen::VectorXd base_;
  Eigen::MatrixXd dir_;  // s x k, orthonormal columns
};

/// Solution fiber {lambda : A lambda = gamma} as an affine subspace:
/// minimal-norm least-squares base plus kernel directions. A residual
/// beyond tol_res * (1 + |gamma|) on any row marks the fiber Empty.
AffineFiber compute_fiber(const Eigen::MatrixXd& A,
                          const Eigen::VectorXd& gamma, double tol_rank,
                          double tol_res);

/// Nearest point of F to w in the euclidean norm. F must be nonempty.
Eigen::VectorXd project_affine(const AffineFiber& F, const Eigen::VectorXd& w);

/// |w - project_affine(F, w)|. F must be nonempty; callers branch on the
/// tag before asking for distances.
double dist_affine_point(const AffineFiber& F, const Eigen::VectorXd& w);

/// One tolerance-constrained restriction target.
struct FiberConstraint {
  const AffineFiber* target = nullptr;  // nonempty
  double eps = 0.0;
};

/// Affine approximation of {v in F : dist(v, G_j) <= eps_j for all j}.
/// The linear conditions "v - p_j orthogonal to G_j's complement" are
/// stacked in F's parametrization and solved in the least-squares sense
/// (normal equations, rank tolerance tol_rank). If the solution flat's
/// central point violates some constraint beyond its eps the result is
/// Empty; otherwise the flat, renormalized. Always a subset of F, never of
/// larger dimension.
AffineFiber restrict_fiber(const AffineFiber& F,
                           const std::vector<FiberConstraint>& constraints,
                           double tol_rank);

/// Equality of fibers up to `tol`: same tag, same dimension, bases within
/// tol and direction spaces within tol (compared as projectors, since the
/// basis itself is not unique).
bool fibers_close(const AffineFiber& F, const AffineFiber& G, double tol);

}  // namespace linsel

#endif

#ifndef LINSEL_SYNTH_HPP
#define LINSEL_SYNTH_HPP

#include <optional>
#include <vector>

#include "linsel/gamma.hpp"

namespace linsel {

/// Continuous, semialgebraic bump: sqrt(r^2 - |y-x|^2) inside the ball,
/// 0 outside.
double bump(const Eigen::VectorXd& x, double r, const Eigen::VectorXd& y);

/// Knobs of the cover-construction stage.
struct CoverConfig {
  /// Jump threshold factor of the discontinuity scan.
  double theta = 20.0;
  /// Relative tolerance for the stable-fiber compatibility check: every
  /// defined field sample must lie within cert_tol * (1 + |sample|) of the
  /// stable fiber at that point.
  double cert_tol = 1e-6;
  /// Initial radius of the halving search; 0 means twice the domain
  /// diameter, so a single clean ball can cover every sample strictly.
  double r_start = 0.0;
};

/// One ball of the finite cover together with its seed vector.
struct CoverAtom {
  std::size_t center = 0;  // sample index
  Eigen::VectorXd center_point;
  double radius = 0.0;
  Eigen::VectorXd seed;  // a point of the stable fiber at the center
};

struct ShrinkResult {
  bool ok = false;
  double radius = 0.0;
  std::string reason;  // on failure: why the search gave up
};

/// Halve the radius from r_start until the projection field of `seed`
/// around the sample `center` both scans clean (classification none) and is
/// compatible with the stable bundle on every ball sample. Radii below
/// 2 * mesh exhaust the grid: that is a "could not certify at this
/// resolution" failure, not a disproof. The seed must lie in the stable
/// fiber at the center.
ShrinkResult shrink_radius(std::size_t center, const Eigen::VectorXd& seed,
                           const Bundle& b0, const Bundle& b_stable,
                           const CoverConfig& cfg);

struct CoverResult {
  bool ok = false;
  std::vector<CoverAtom> atoms;
  /// Samples left uncovered when the construction failed.
  std::vector<std::size_t> uncovered;
};

/// Greedy finite cover: walk the samples in lexicographic order, give each
/// still-uncovered one an atom seeded with its stable-fiber base via
/// shrink_radius, and mark everything strictly inside the accepted ball as
/// covered. Points whose radius search fails are deferred; they only fail
/// the cover if no later atom reaches them. Requires a stable bundle with
/// no empty fiber.
CoverResult select_cover(const Bundle& b_stable, const Bundle& b0,
                         const CoverConfig& cfg);

/// The glued solution: cover atoms plus the problem, which is needed to
/// recompute the generation-0 fiber at arbitrary query points. Immutable
/// after construction; evaluation is pure.
class SolutionField {
public:
  /// Keeps its own copy of the problem (expression trees are shared, the
  /// copy is cheap), so the field stays valid past the caller's problem.
  SolutionField(std::vector<CoverAtom> atoms, Problem problem,
                Tolerances tol);

  /// Partition-of-unity blend at y: the bump-weighted average of the
  /// projections of the active atoms' seeds onto the fiber at y. The
  /// weights sum to one, so the value stays inside the (affine) fiber and
  /// A(y) phi(y) = gamma(y) up to numeric error. Raises on queries outside
  /// the domain box, on an empty fiber at y, and when no atom covers y.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& y) const;

  /// Sum of normalized weights minus one at y; diagnostic for tests.
  double weight_defect(const Eigen::VectorXd& y) const;

  const std::vector<CoverAtom>& atoms() const { return atoms_; }

private:
  std::vector<CoverAtom> atoms_;
  Problem problem_;
  Tolerances tol_;
};

/// Check the cover invariant (every sample has positive total bump weight)
/// and wrap the atoms into an evaluator.
SolutionField synthesize(std::vector<CoverAtom> atoms, const Bundle& b0,
                         const Problem& problem, const Tolerances& tol);

}  // namespace linsel

#endif

#include "linsel/synth.hpp"

#include <algorithm>
#include <cmath>

namespace linsel {

double bump(const Eigen::VectorXd& x, double r, const Eigen::VectorXd& y) {
  if (r <= 0.0) throw ContractError("bump radius must be > 0");
  const double d2 = (y - x).squaredNorm();
  if (d2 >= r * r) return 0.0;
  return std::sqrt(r * r - d2);
}

namespace {

/// A candidate ball is accepted when the field scans clean and each defined
/// field sample is compatible with the stable fiber at its point. The
/// second check is a consequence of local continuity of the field (a
/// continuous selection of solutions survives every refinement), and it
/// catches seed mismatches that sit below the jump scan's mesh floor.
bool ball_certifies(const GammaField& field, const Bundle& b_stable,
                    const CoverConfig& cfg, std::string* why) {
  DiscontinuityReport rep =
      discontinuity_scan(field, *b_stable.domain, cfg.theta);
  if (rep.classification != DiscontinuityReport::Class::None) {
    if (why) *why = "discontinuity scan flagged " +
                    std::to_string(rep.flagged.size()) + " point(s)";
    return false;
  }
  for (std::size_t i = 0; i < field.ball.size(); ++i) {
    if (!field.values[i]) continue;
    const AffineFiber& stable = b_stable.fibers[field.ball[i]];
    const double d = dist_affine_point(stable, *field.values[i]);
    if (d > cfg.cert_tol * (1.0 + field.values[i]->norm())) {
      if (why) *why = "field value incompatible with the stable fiber at sample " +
                      std::to_string(field.ball[i]);
      return false;
    }
  }
  return true;
}

}  // namespace

ShrinkResult shrink_radius(std::size_t center, const Eigen::VectorXd& seed,
                           const Bundle& b0, const Bundle& b_stable,
                           const CoverConfig& cfg) {
  const AffineFiber& stable = b_stable.fibers[center];
  if (stable.is_empty() ||
      dist_affine_point(stable, seed) > 1e-8 * (1.0 + seed.norm()))
    throw ContractError("shrink_radius seed is not in the stable fiber");

  const double mesh = b0.domain->mesh();
  double r = cfg.r_start > 0.0 ? cfg.r_start : 2.0 * b0.domain->diameter();
  ShrinkResult res;
  std::string why;
  while (r >= 2.0 * mesh) {
    GammaField field = gamma_field(b0, seed, center, r);
    if (ball_certifies(field, b_stable, cfg, &why)) {
      res.ok = true;
      res.radius = r;
      return res;
    }
    r /= 2.0;
  }
  res.reason = "mesh exhausted before certification (last obstacle: " + why +
               "); continuity not certified at this resolution";
  return res;
}

CoverResult select_cover(const Bundle& b_stable, const Bundle& b0,
                         const CoverConfig& cfg) {
  if (!empty_fiber_scan(b_stable).empty())
    throw ContractError("select_cover requires a bundle with no empty fiber");

  const std::size_t count = b_stable.domain->size();
  std::vector<bool> covered(count, false);
  std::vector<bool> deferred(count, false);

  CoverResult result;
  for (;;) {
    // Samples are stored in lexicographic order, so the first uncovered,
    // not-yet-deferred index is the greedy pick.
    std::size_t pick = count;
    for (std::size_t i = 0; i < count; ++i)
      if (!covered[i] && !deferred[i]) {
        pick = i;
        break;
      }
    if (pick == count) break;

    const Eigen::VectorXd seed = b_stable.fibers[pick].base();
    ShrinkResult shrink = shrink_radius(pick, seed, b0, b_stable, cfg);
    if (!shrink.ok) {
      deferred[pick] = true;  // a later atom may still cover it
      continue;
    }
    CoverAtom atom;
    atom.center = pick;
    atom.center_point = b_stable.domain->point(pick);
    atom.radius = shrink.radius;
    atom.seed = seed;
    for (std::size_t j :
         b_stable.domain->range_query(atom.center_point, shrink.radius)) {
      // Strict inequality: covered means positive bump weight.
      if ((b_stable.domain->point(j) - atom.center_point).norm() <
          shrink.radius)
        covered[j] = true;
    }
    result.atoms.push_back(std::move(atom));
  }

  for (std::size_t i = 0; i < count; ++i)
    if (!covered[i]) result.uncovered.push_back(i);
  result.ok = result.uncovered.empty();
  return result;
}

SolutionField::SolutionField(std::vector<CoverAtom> atoms, Problem problem,
                             Tolerances tol)
    : atoms_(std::move(atoms)), problem_(std::move(problem)), tol_(tol) {}

Eigen::VectorXd SolutionField::evaluate(const Eigen::VectorXd& y) const {
  if (!problem_.domain.contains_box(y))
    throw ContractError("solution query outside the domain box");

  double total = 0.0;
  std::vector<std::pair<const CoverAtom*, double>> active;
  for (const CoverAtom& a : atoms_) {
    const double w = bump(a.center_point, a.radius, y);
    if (w > 0.0) {
      active.emplace_back(&a, w);
      total += w;
    }
  }
  if (total <= 0.0)
    throw Error("cover violated: no atom is active at the query point");

  Eigen::MatrixXd A = eval_matrix(problem_.A, y, tol_.tol_eval);
  Eigen::VectorXd g = eval_vector(problem_.gamma, y, tol_.tol_eval);
  AffineFiber fiber = compute_fiber(A, g, tol_.tol_rank, tol_.tol_res);
  if (fiber.is_empty())
    throw Error("generation-0 fiber is empty at the query point");

  Eigen::VectorXd phi = Eigen::VectorXd::Zero(problem_.unknowns());
  for (const auto& [atom, w] : active)
    phi += (w / total) * project_affine(fiber, atom->seed);
  return phi;
}

double SolutionField::weight_defect(const Eigen::VectorXd& y) const {
  double total = 0.0;
  std::vector<double> weights;
  for (const CoverAtom& a : atoms_) {
    const double w = bump(a.center_point, a.radius, y);
    if (w > 0.0) {
      weights.push_back(w);
      total += w;
    }
  }
  if (total <= 0.0) return 1.0;
  double sum = 0.0;
  for (double w : weights) sum += w / total;
  return std::fabs(sum - 1.0);
}

SolutionField synthesize(std::vector<CoverAtom> atoms, const Bundle& b0,
                         const Problem& problem, const Tolerances& tol) {
  if (atoms.empty()) throw ContractError("synthesize needs at least one atom");
  for (std::size_t i = 0; i < b0.domain->size(); ++i) {
    double total = 0.0;
    for (const CoverAtom& a : atoms)
      total += bump(a.center_point, a.radius, b0.domain->point(i));
    if (total <= 0.0)
      throw Error("cover invariant violated: sample " + std::to_string(i) +
                  " has zero total weight");
  }
  return SolutionField(std::move(atoms), problem, tol);
}

}  // namespace linsel

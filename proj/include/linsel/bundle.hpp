#ifndef LINSEL_BUNDLE_HPP
#define LINSEL_BUNDLE_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "linsel/affine.hpp"
#include "linsel/domain.hpp"
#include "linsel/expr.hpp"

namespace linsel {

/// One affine fiber per sample point: the discrete counterpart of the
/// family (H_x) over the domain.
struct Bundle {
  std::shared_ptr<const SampledDomain> domain;
  std::vector<AffineFiber> fibers;  // parallel to domain->points()
  int generation = 0;               // refinement steps applied so far
  /// Set when the stabilization loop hit its iteration cap without reaching
  /// a fixed point; a diagnostic, not a hard error.
  bool stabilization_warning = false;
};

/// Shell schedule for the discretized refinement: radii rho_j = h * 2^(m-j),
/// j = 1..m (descending, clipped to the domain diameter, duplicates
/// dropped), with survival tolerance eps(rho) = shell_c * rho. The finest
/// shell never demands sub-mesh resolution.
struct RefinementConfig {
  double shell_c = 10.0;
  int shell_count = 5;
  /// Hard cap on stabilization iterations; 0 means the default 2s+1.
  int max_iterations = 0;
};

/// The concrete descending radii for a domain under this config.
std::vector<double> shell_radii(const SampledDomain& domain,
                                const RefinementConfig& cfg);

/// Generation-0 bundle: fiber at each sample x is the solution set of
/// A(x) lambda = gamma(x). Evaluation errors are rethrown with the
/// offending sample point attached.
Bundle initial_bundle(const Problem& problem,
                      std::shared_ptr<const SampledDomain> domain,
                      const Tolerances& tol);

/// One discretized refinement step. For each sample with a nonempty fiber,
/// the fiber is restricted against the fibers of the neighbors in each
/// shell ball with tolerance eps(rho); the shell whose result is kept is
/// chosen by the dimension-stabilization rule described in the
/// implementation. Empty fibers stay empty; new fibers are subsets of old
/// ones; the generation counter advances.
Bundle glaeser_refine_step(const Bundle& b, const RefinementConfig& cfg,
                           const Tolerances& tol);

/// Iterate refinement steps until one changes no fiber (tag, dimension,
/// base and directions within 1e-8) or the iteration cap is reached, in
/// which case the warning flag is set instead of failing.
Bundle glaeser_stable(const Bundle& b, const RefinementConfig& cfg,
                      const Tolerances& tol);

/// Sample indices whose fiber is empty. An empty result is the discrete
/// no-empty-fiber criterion.
std::vector<std::size_t> empty_fiber_scan(const Bundle& b);

/// One record per sample point (coordinates, tag, dimension, base,
/// direction basis) as JSON lines.
void dump_bundle(const Bundle& b, std::ostream& os);

}  // namespace linsel

#endif

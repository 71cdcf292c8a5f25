#ifndef LINSEL_CONFIG_HPP
#define LINSEL_CONFIG_HPP

namespace linsel {

/// Numeric tolerances shared across the solver stages. The three knobs are
/// deliberately separate: evaluation clamping, rank decisions and residual
/// (consistency) decisions are different failure axes.
struct Tolerances {
  /// Clamp width for sqrt arguments: values in [-tol_eval, 0] evaluate to 0,
  /// anything below -tol_eval is a domain violation.
  double tol_eval = 1e-12;
  /// Rank tolerance, relative to the matrix max-norm. Fiber dimensions are
  /// sensitive to this, so it is exposed as a config knob everywhere.
  double tol_rank = 1e-9;
  /// Consistency tolerance for linear systems, relative to 1 + |rhs|.
  double tol_res = 1e-8;
};

}  // namespace linsel

#endif

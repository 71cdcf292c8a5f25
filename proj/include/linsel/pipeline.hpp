#ifndef LINSEL_PIPELINE_HPP
#define LINSEL_PIPELINE_HPP

#include <map>
#include <optional>
#include <string>

#include "linsel/synth.hpp"

namespace linsel {

/// Everything the full diagnosis needs, with the defaults used throughout.
struct DiagnoseConfig {
  std::vector<int> resolution;  // per axis; empty means 101 everywhere
  Tolerances tol;
  RefinementConfig refine;
  CoverConfig cover;
};

enum class Verdict {
  /// A continuous solution exists and an explicit one was built and checked.
  Constructed,
  /// An empty stable fiber refutes existence of a continuous solution.
  NoContinuousSolution,
  /// No refutation, but continuity could not be certified at this mesh.
  NotCertifiedAtResolution,
};

std::string verdict_name(Verdict v);
/// Process exit code contract: 0 constructed, 1 refuted, 2 not certified.
int verdict_exit_code(Verdict v);

/// Tag/dimension census of a bundle: empty count plus nonempty count per
/// fiber dimension.
struct FiberHistogram {
  std::size_t empty = 0;
  std::map<int, std::size_t> by_dim;
};

FiberHistogram fiber_histogram(const Bundle& b);

struct DiagnosisReport {
  // Stage outcomes.
  std::size_t sample_count = 0;
  double mesh = 0.0;
  FiberHistogram initial_histogram;
  FiberHistogram stable_histogram;
  int stable_generation = 0;
  bool stabilization_warning = false;
  std::vector<std::vector<double>> empty_fiber_points;
  bool cover_attempted = false;
  bool cover_ok = false;
  std::size_t atom_count = 0;
  std::vector<std::vector<double>> uncovered_points;
  bool residual_suite_passed = false;
  double max_residual = 0.0;
  double max_weight_defect = 0.0;

  Verdict verdict = Verdict::NotCertifiedAtResolution;

  // Reproducibility: configuration echo and per-stage timings (ms).
  DiagnoseConfig config;
  std::map<std::string, double> timings_ms;

  /// Structured-text form. Timing fields vary run to run; everything else
  /// is a deterministic function of the input and config.
  std::string to_json(bool include_timings = true) const;
};

struct DiagnoseResult {
  DiagnosisReport report;
  std::optional<SolutionField> solution;
  std::shared_ptr<const SampledDomain> domain;
  std::optional<Bundle> initial;
  std::optional<Bundle> stable;
};

/// Full diagnosis: sample the domain, build the generation-0 bundle,
/// refine to stability, scan for empty fibers; refutation ends there,
/// otherwise cover selection and synthesis run and the residual suite is
/// executed over all samples. Stage errors are rethrown with stage labels.
DiagnoseResult diagnose(const Problem& problem, const DiagnoseConfig& cfg);

/// Cross-check of the equivalent solvability conditions on one instance:
/// the no-empty-fiber criterion against the synthesis outcome (decidable
/// when the cover succeeds), with the semialgebraicity legs holding by
/// construction for the supported input class.
struct EquivalenceRecord {
  bool no_empty_stable_fiber = false;  // condition (ii)
  bool synthesis_succeeded = false;    // condition (i), constructive leg
  bool cover_decidable = false;  // false when not-certified: (i) undecided
  bool agreement = false;        // legs agree wherever decidable
  std::string note;

  std::string to_json() const;
};

EquivalenceRecord check_equivalences(const Problem& problem,
                                     const DiagnoseConfig& cfg);

/// Per-sample solution export: point, phi(point), residual norm.
void solution_csv(const SolutionField& field, const SampledDomain& domain,
                  const Problem& problem, const Tolerances& tol,
                  std::ostream& os);

}  // namespace linsel

#endif

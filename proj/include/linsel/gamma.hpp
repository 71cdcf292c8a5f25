#ifndef LINSEL_GAMMA_HPP
#define LINSEL_GAMMA_HPP

#include <optional>
#include <string>
#include <vector>

#include "linsel/bundle.hpp"

namespace linsel {

/// Local projection field around a sample point: for each sample y in the
/// ball, the projection of the seed vector onto the generation-0 fiber at
/// y, or an undefined marker where that fiber is empty.
struct GammaField {
  std::size_t center = 0;  // sample index
  Eigen::VectorXd seed;
  double radius = 0.0;
  std::vector<std::size_t> ball;  // sample indices, increasing
  std::vector<std::optional<Eigen::VectorXd>> values;  // parallel to ball
};

/// Build the field for seed v around the sample `center` with the given
/// radius. Fibers are taken from the generation-0 bundle.
GammaField gamma_field(const Bundle& b0, const Eigen::VectorXd& v,
                       std::size_t center, double radius);

/// Scan outcome over one field.
struct DiscontinuityReport {
  enum class Class { None, IsolatedOnly, Clustered };

  struct Flag {
    std::size_t sample = 0;
    double jump = 0.0;
  };

  std::vector<Flag> flagged;
  Class classification = Class::None;
  double threshold = 0.0;  // theta * L actually used (slope units)
  double lipschitz = 0.0;  // median slope estimate L
  std::size_t undefined_count = 0;

  std::string to_json() const;
};

/// Jump detection against a robust local Lipschitz estimate: L is the
/// median slope over defined neighbor pairs (samples within 1.5 * mesh);
/// a pair whose jump exceeds theta * L * gap (and a small absolute noise
/// floor) is a discontinuity event, attributed to a single endpoint.
/// Classification is isolated-only iff flagged points are pairwise farther
/// apart than 2 * mesh. Requires at least two defined samples.
DiscontinuityReport discontinuity_scan(const GammaField& g,
                                       const SampledDomain& domain,
                                       double theta_factor);

/// Field for a new seed v2 computed from an existing field without
/// re-projecting onto fibers, through the identity
///   proj_{H_y} v2 = P1(y) gamma_v(y) + v2 - P1(y) v2,
/// with P1(y) read off the stored fiber directions. Agrees with the
/// directly built field.
GammaField witness_transfer(const GammaField& g, const Eigen::VectorXd& v2,
                            const Bundle& b0);

}  // namespace linsel

#endif

#include "linsel/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

namespace linsel {

GammaField gamma_field(const Bundle& b0, const Eigen::VectorXd& v,
                       std::size_t center, double radius) {
  if (radius <= 0.0) throw ContractError("gamma_field radius must be > 0");
  if (center >= b0.domain->size())
    throw ContractError("gamma_field center is not a sample index");

  GammaField g;
  g.center = center;
  g.seed = v;
  g.radius = radius;
  g.ball = b0.domain->range_query(b0.domain->point(center), radius);
  g.values.reserve(g.ball.size());
  for (std::size_t j : g.ball) {
    const AffineFiber& f = b0.fibers[j];
    if (f.is_empty())
      g.values.push_back(std::nullopt);
    else
      g.values.push_back(project_affine(f, v));
  }
  return g;
}

DiscontinuityReport discontinuity_scan(const GammaField& g,
                                       const SampledDomain& domain,
                                       double theta_factor) {
  std::size_t defined = 0;
  double value_scale = 0.0;
  for (const auto& val : g.values)
    if (val) {
      ++defined;
      value_scale = std::max(value_scale, val->cwiseAbs().maxCoeff());
    }
  if (defined == 0) throw Error("discontinuity_scan: all samples undefined");
  if (defined < 2)
    throw ContractError("discontinuity_scan needs >= 2 defined samples");

  DiscontinuityReport rep;
  rep.undefined_count = g.ball.size() - defined;

  const double pair_radius = 1.5 * domain.mesh();

  struct Pair {
    std::size_t a, b;  // positions within the ball
    double gap, jump;
  };
  std::vector<Pair> pairs;
  std::vector<double> slopes;
  for (std::size_t a = 0; a < g.ball.size(); ++a) {
    if (!g.values[a]) continue;
    const Eigen::VectorXd& xa = domain.point(g.ball[a]);
    for (std::size_t b = a + 1; b < g.ball.size(); ++b) {
      if (!g.values[b]) continue;
      const double gap = (domain.point(g.ball[b]) - xa).norm();
      if (gap > pair_radius || gap == 0.0) continue;
      const double jump = (*g.values[a] - *g.values[b]).norm();
      pairs.push_back({a, b, gap, jump});
      slopes.push_back(jump / gap);
    }
  }

  if (slopes.empty()) {
    rep.classification = DiscontinuityReport::Class::None;
    return rep;
  }

  std::sort(slopes.begin(), slopes.end());
  const double L = slopes.size() % 2 == 1
                       ? slopes[slopes.size() / 2]
                       : 0.5 * (slopes[slopes.size() / 2 - 1] +
                                slopes[slopes.size() / 2]);
  rep.lipschitz = L;
  rep.threshold = theta_factor * L;
  // Floor below which a jump is indistinguishable from projection noise.
  const double noise_floor = 1e-9 * (1.0 + value_scale);

  std::vector<const Pair*> events;
  std::map<std::size_t, int> event_count;   // ball position -> #events
  std::map<std::size_t, double> max_jump;   // ball position -> worst jump
  for (const Pair& p : pairs) {
    if (p.jump > theta_factor * L * p.gap && p.jump > noise_floor) {
      events.push_back(&p);
      for (std::size_t e : {p.a, p.b}) {
        event_count[e] += 1;
        max_jump[e] = std::max(max_jump[e], p.jump);
      }
    }
  }

  // Each event sits between two samples; attribute it to the endpoint more
  // implicated overall (event count, then worst jump, then index), so a
  // single jump site yields a single flagged point.
  std::map<std::size_t, double> flagged;  // ball position -> jump magnitude
  for (const Pair* p : events) {
    std::size_t pick = p->a;
    if (event_count[p->b] != event_count[p->a])
      pick = event_count[p->b] > event_count[p->a] ? p->b : p->a;
    else if (max_jump[p->b] != max_jump[p->a])
      pick = max_jump[p->b] > max_jump[p->a] ? p->b : p->a;
    double& slot = flagged[pick];
    slot = std::max(slot, p->jump);
  }

  for (const auto& [pos, jump] : flagged)
    rep.flagged.push_back({g.ball[pos], jump});

  if (rep.flagged.empty()) {
    rep.classification = DiscontinuityReport::Class::None;
  } else {
    bool isolated = true;
    for (std::size_t i = 0; i < rep.flagged.size() && isolated; ++i)
      for (std::size_t j = i + 1; j < rep.flagged.size() && isolated; ++j) {
        const double sep = (domain.point(rep.flagged[i].sample) -
                            domain.point(rep.flagged[j].sample))
                               .norm();
        if (sep <= 2.0 * domain.mesh()) isolated = false;
      }
    rep.classification = isolated ? DiscontinuityReport::Class::IsolatedOnly
                                  : DiscontinuityReport::Class::Clustered;
  }
  return rep;
}

std::string DiscontinuityReport::to_json() const {
  nlohmann::json doc;
  doc["classification"] = classification == Class::None ? "none"
                          : classification == Class::IsolatedOnly
                              ? "isolated-only"
                              : "clustered";
  doc["threshold"] = threshold;
  doc["lipschitz"] = lipschitz;
  doc["undefined_count"] = undefined_count;
  nlohmann::json flags = nlohmann::json::array();
  for (const Flag& f : flagged)
    flags.push_back({{"sample", f.sample}, {"jump", f.jump}});
  doc["flagged"] = flags;
  return doc.dump();
}

GammaField witness_transfer(const GammaField& g, const Eigen::VectorXd& v2,
                            const Bundle& b0) {
  GammaField out;
  out.center = g.center;
  out.seed = v2;
  out.radius = g.radius;
  out.ball = g.ball;
  out.values.reserve(g.values.size());
  for (std::size_t i = 0; i < g.ball.size(); ++i) {
    if (!g.values[i]) {
      out.values.push_back(std::nullopt);
      continue;
    }
    const AffineFiber& f = b0.fibers[g.ball[i]];
    // P1(y) w = w - D D^T w with D the stored fiber directions (the fiber
    // is parallel to Ker A(y)).
    const Eigen::MatrixXd& D = f.dir();
    auto p1 = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
      if (D.cols() == 0) return w;
      return w - D * (D.transpose() * w);
    };
    out.values.push_back(p1(*g.values[i]) + v2 - p1(v2));
  }
  return out;
}

}  // namespace linsel

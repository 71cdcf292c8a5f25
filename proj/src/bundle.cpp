#include "linsel/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace linsel {

namespace {
constexpr double kStableTol = 1e-8;
}

std::vector<double> shell_radii(const SampledDomain& domain,
                                const RefinementConfig& cfg) {
  if (cfg.shell_count < 1) throw ContractError("shell_count must be >= 1");
  if (cfg.shell_c <= 0.0) throw ContractError("shell_c must be > 0");
  const double h = domain.mesh();
  std::vector<double> radii;
  for (int j = 1; j <= cfg.shell_count; ++j) {
    double rho = h * std::pow(2.0, cfg.shell_count - j);
    rho = std::min(rho, domain.diameter());
    if (radii.empty() || rho < radii.back()) radii.push_back(rho);
  }
  return radii;  // descending, last entry >= h
}

Bundle initial_bundle(const Problem& problem,
                      std::shared_ptr<const SampledDomain> domain,
                      const Tolerances& tol) {
  Bundle b;
  b.domain = std::move(domain);
  b.generation = 0;
  b.fibers.reserve(b.domain->size());
  for (std::size_t i = 0; i < b.domain->size(); ++i) {
    const Eigen::VectorXd& x = b.domain->point(i);
    try {
      Eigen::MatrixXd A = eval_matrix(problem.A, x, tol.tol_eval);
      Eigen::VectorXd g = eval_vector(problem.gamma, x, tol.tol_eval);
      b.fibers.push_back(compute_fiber(A, g, tol.tol_rank, tol.tol_res));
    } catch (const Error& e) {
      std::string pt = "(";
      for (int d = 0; d < x.size(); ++d)
        pt += (d ? ", " : "") + std::to_string(x[d]);
      throw DomainError("initial bundle at sample " + pt + ": " + e.what());
    }
  }
  return b;
}

namespace {

/// Restriction of F against the nonempty neighbor fibers within one shell.
AffineFiber shell_restriction(const Bundle& b, std::size_t center,
                              double rho, double eps, double tol_rank) {
  const AffineFiber& F = b.fibers[center];
  std::vector<FiberConstraint> constraints;
  for (std::size_t j : b.domain->range_query(b.domain->point(center), rho)) {
    if (j == center || b.fibers[j].is_empty()) continue;
    constraints.push_back({&b.fibers[j], eps});
  }
  return restrict_fiber(F, constraints, tol_rank);
}

/// Pick the surviving fiber from the per-shell restrictions r[0] (coarsest)
/// .. r[m-1] (finest). The finest shells approximate the limit, so:
///   - an empty finest-shell result is decisive (the nearest neighbors
///     already exclude every candidate);
///   - otherwise walk toward coarser shells while they stay nonempty and
///     accept the finer member of the first pair agreeing in dimension
///     (the dimension has stabilized there);
///   - an empty coarser shell means far-field conflict; stop and keep the
///     finest result. Same if no pair ever agrees.
const AffineFiber& accept_shell(const std::vector<AffineFiber>& r) {
  const std::size_t m = r.size();
  if (r[m - 1].is_empty()) return r[m - 1];
  for (std::size_t j = m - 1; j >= 1; --j) {
    if (r[j - 1].is_empty()) break;
    if (r[j - 1].dim() == r[j].dim()) return r[j];
  }
  return r[m - 1];
}

}  // namespace

Bundle glaeser_refine_step(const Bundle& b, const RefinementConfig& cfg,
                           const Tolerances& tol) {
  const std::vector<double> radii = shell_radii(*b.domain, cfg);
  Bundle next;
  next.domain = b.domain;
  next.generation = b.generation + 1;
  next.stabilization_warning = b.stabilization_warning;
  next.fibers.reserve(b.fibers.size());

  // New fibers depend only on the previous generation, never on fibers of
  // the generation being written.
  for (std::size_t i = 0; i < b.fibers.size(); ++i) {
    if (b.fibers[i].is_empty()) {
      next.fibers.push_back(b.fibers[i]);  // empty never resurrects
      continue;
    }
    std::vector<AffineFiber> per_shell;
    per_shell.reserve(radii.size());
    for (double rho : radii)
      per_shell.push_back(
          shell_restriction(b, i, rho, cfg.shell_c * rho, tol.tol_rank));
    next.fibers.push_back(accept_shell(per_shell));
  }
  return next;
}

namespace {

bool bundles_equal(const Bundle& a, const Bundle& b) {
  for (std::size_t i = 0; i < a.fibers.size(); ++i)
    if (!fibers_close(a.fibers[i], b.fibers[i], kStableTol)) return false;
  return true;
}

}  // namespace

Bundle glaeser_stable(const Bundle& b, const RefinementConfig& cfg,
                      const Tolerances& tol) {
  int s = 0;
  for (const AffineFiber& f : b.fibers)
    s = std::max(s, f.ambient_dim());
  const int cap = cfg.max_iterations > 0 ? cfg.max_iterations : 2 * s + 1;

  Bundle cur = b;
  for (int step = 0; step < cap; ++step) {
    Bundle next = glaeser_refine_step(cur, cfg, tol);
    if (bundles_equal(cur, next)) return next;
    cur = std::move(next);
  }
  cur.stabilization_warning = true;
  return cur;
}

std::vector<std::size_t> empty_fiber_scan(const Bundle& b) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < b.fibers.size(); ++i)
    if (b.fibers[i].is_empty()) out.push_back(i);
  return out;
}

void dump_bundle(const Bundle& b, std::ostream& os) {
  using json = nlohmann::json;
  for (std::size_t i = 0; i < b.fibers.size(); ++i) {
    const Eigen::VectorXd& x = b.domain->point(i);
    json rec;
    rec["point"] = std::vector<double>(x.data(), x.data() + x.size());
    const AffineFiber& f = b.fibers[i];
    if (f.is_empty()) {
      rec["tag"] = "empty";
    } else {
      rec["tag"] = "nonempty";
      rec["dim"] = f.dim();
      rec["base"] = std::vector<double>(f.base().data(),
                                        f.base().data() + f.base().size());
      json dir = json::array();
      for (int c = 0; c < f.dir().cols(); ++c) {
        const auto col = f.dir().col(c);
        dir.push_back(std::vector<double>(col.data(), col.data() + col.size()));
      }
      rec["dir"] = dir;
    }
    os << rec.dump() << "\n";
  }
}

}  // namespace linsel

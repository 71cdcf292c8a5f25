#include "linsel/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace linsel {

namespace {

std::string key_of(const std::vector<long>& cell) {
  std::string key;
  key.reserve(cell.size() * sizeof(long));
  for (long c : cell)
    key.append(reinterpret_cast<const char*>(&c), sizeof(long));
  return key;
}

}  // namespace

SampledDomain::SampledDomain(std::vector<Eigen::VectorXd> points)
    : points_(std::move(points)) {
  if (points_.size() < 2)
    throw Error("sampled domain needs at least two points");
  dim_ = static_cast<int>(points_[0].size());
  for (const auto& p : points_)
    if (p.size() != dim_)
      throw Error("sampled domain points must share one dimension");

  Eigen::VectorXd lo = points_[0], hi = points_[0];
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;
  diameter_ = (hi - lo).norm();
  if (diameter_ == 0.0) throw Error("sampled domain is a single location");

  // Provisional cell size from the average spacing; rebuilt from the mesh
  // once it is known so that ring searches stay shallow.
  cell_size_ =
      std::max(diameter_ / std::pow(static_cast<double>(points_.size()),
                                    1.0 / dim_),
               1e-300);
  build_index();

  mesh_ = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    mesh_ = std::max(mesh_, nearest_gap(i));

  cell_size_ = mesh_;
  build_index();
}

void SampledDomain::build_index() {
  cells_.clear();
  for (std::size_t i = 0; i < points_.size(); ++i)
    cells_[key_of(cell_of(points_[i]))].push_back(i);
}

std::vector<long> SampledDomain::cell_of(const Eigen::VectorXd& x) const {
  std::vector<long> cell(dim_);
  for (int d = 0; d < dim_; ++d)
    cell[d] = static_cast<long>(std::floor((x[d] - origin_[d]) / cell_size_));
  return cell;
}

double SampledDomain::nearest_gap(std::size_t i) const {
  const Eigen::VectorXd& x = points_[i];
  double best = std::numeric_limits<double>::infinity();
  // Expand cubes of cells around x until the best distance is certain.
  for (long ring = 1;; ++ring) {
    std::vector<long> center = cell_of(x);
    std::vector<long> idx(dim_, -ring);
    for (;;) {
      bool on_surface = ring == 1;
      for (int d = 0; d < dim_ && !on_surface; ++d)
        if (std::labs(idx[d]) == ring) on_surface = true;
      if (on_surface || ring == 1) {
        std::vector<long> cell(dim_);
        for (int d = 0; d < dim_; ++d) cell[d] = center[d] + idx[d];
        auto it = cells_.find(key_of(cell));
        if (it != cells_.end())
          for (std::size_t j : it->second)
            if (j != i) best = std::min(best, (points_[j] - x).norm());
      }
      int d = 0;
      while (d < dim_ && ++idx[d] > ring) idx[d++] = -ring;
      if (d == dim_) break;
    }
    // Any point outside the searched cube is at least (ring-1)*cell away.
    if (best <= (ring - 1) * cell_size_) return best;
    if (ring * cell_size_ > diameter_ + cell_size_ &&
        best < std::numeric_limits<double>::infinity())
      return best;
    if (ring * cell_size_ > 2 * diameter_ + cell_size_) return best;
  }
}

std::vector<std::size_t> SampledDomain::range_query(const Eigen::VectorXd& x,
                                                    double radius) const {
  std::vector<std::size_t> out;
  if (radius < 0.0) return out;
  std::vector<long> lo = cell_of(x.array() - radius);
  std::vector<long> hi = cell_of(x.array() + radius);
  std::vector<long> cell = lo;
  for (;;) {
    auto it = cells_.find(key_of(cell));
    if (it != cells_.end())
      for (std::size_t j : it->second)
        if ((points_[j] - x).norm() <= radius) out.push_back(j);
    int d = 0;
    while (d < dim_ && ++cell[d] > hi[d]) cell[d++] = lo[d];
    if (d == dim_) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SampledDomain::nearest(const Eigen::VectorXd& x) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (double radius = cell_size_;; radius *= 2.0) {
    for (std::size_t j : range_query(x, radius)) {
      double d = (points_[j] - x).norm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (best <= radius) return arg;
    if (radius > 4 * diameter_ + cell_size_) {
      // x far outside the cloud: fall back to a full scan.
      for (std::size_t j = 0; j < points_.size(); ++j) {
        double d = (points_[j] - x).norm();
        if (d < best) {
          best = d;
          arg = j;
        }
      }
      return arg;
    }
  }
}

SampledDomain sample_domain(const Problem& problem,
                            const std::vector<int>& resolution,
                            double tol_eval) {
  const int n = problem.ambient_dim;
  if (static_cast<int>(resolution.size()) != n)
    throw Error("resolution must give one count per axis");
  for (int r : resolution)
    if (r < 2) throw Error("resolution must be >= 2 per axis");

  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(n, 0);
  Eigen::VectorXd x(n);
  for (;;) {
    for (int d = 0; d < n; ++d) {
      const double lo = problem.domain.lo[d], hi = problem.domain.hi[d];
      x[d] = lo + (hi - lo) * idx[d] / (resolution[d] - 1);
    }
    bool keep = true;
    if (problem.domain.constraint)
      keep = problem.domain.constraint->evaluate(x, tol_eval) >= -tol_eval;
    if (keep) pts.push_back(x);

    // Advance the last axis fastest so points come out in lexicographic
    // coordinate order.
    int d = n - 1;
    while (d >= 0 && ++idx[d] >= resolution[d]) idx[d--] = 0;
    if (d < 0) break;
  }

  if (pts.empty())
    throw Error("domain predicate excludes every grid point");
  if (pts.size() < 2)
    throw Error("domain predicate leaves fewer than two grid points");
  return SampledDomain(std::move(pts));
}

}  // namespace linsel

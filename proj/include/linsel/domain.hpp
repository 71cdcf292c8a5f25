#ifndef LINSEL_DOMAIN_HPP
#define LINSEL_DOMAIN_HPP

#include <Eigen/Core>
#include <unordered_map>
#include <vector>

#include "linsel/expr.hpp"

namespace linsel {

/// Finite point cloud approximating the compact domain, with a uniform-cell
/// index for euclidean range queries. Points are stored in lexicographic
/// coordinate order (first coordinate slowest), which downstream stages rely
/// on for determinism.
class SampledDomain {
public:
  SampledDomain() = default;
  /// Takes ownership of the points; computes the mesh (max nearest-neighbor
  /// gap) and builds the cell index. Requires at least two points.
  explicit SampledDomain(std::vector<Eigen::VectorXd> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const Eigen::VectorXd& point(std::size_t i) const { return points_[i]; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }

  /// Max over samples of the distance to the nearest other sample.
  double mesh() const { return mesh_; }
  /// Diagonal of the bounding box of the samples.
  double diameter() const { return diameter_; }

  /// Indices of all samples within euclidean distance `radius` of x
  /// (closed ball), in increasing index order.
  std::vector<std::size_t> range_query(const Eigen::VectorXd& x,
                                       double radius) const;

  /// Index of the sample nearest to x.
  std::size_t nearest(const Eigen::VectorXd& x) const;

private:
  void build_index();
  std::vector<long> cell_of(const Eigen::VectorXd& x) const;
  double nearest_gap(std::size_t i) const;

  int dim_ = 0;
  std::vector<Eigen::VectorXd> points_;
  double mesh_ = 0.0;
  double diameter_ = 0.0;

  double cell_size_ = 1.0;
  Eigen::VectorXd origin_;
  std::unordered_map<std::string, std::vector<std::size_t>> cells_;
};

/// Regular grid over the problem's domain box, `resolution[i]` points per
/// axis (>= 2), filtered by the membership predicate when present. Raises
/// Error if fewer than two grid points survive.
SampledDomain sample_domain(const Problem& problem,
                            const std::vector<int>& resolution,
                            double tol_eval = 1e-12);

}  // namespace linsel

#endif

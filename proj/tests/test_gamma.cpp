#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "linsel/gamma.hpp"

using namespace linsel;

namespace {

std::shared_ptr<const SampledDomain> make_domain(const Problem& p, int res) {
  return std::make_shared<SampledDomain>(
      sample_domain(p, std::vector<int>(p.ambient_dim, res)));
}

std::size_t index_of(const SampledDomain& d, double x) {
  for (std::size_t i = 0; i < d.size(); ++i)
    if (std::fabs(d.point(i)[0] - x) < 1e-12) return i;
  REQUIRE(false);
  return 0;
}

Eigen::VectorXd scalar(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}

}  // namespace

TEST_CASE("x^2 field with zero seed is the identity map") {
  Problem p = linsel_tests::x_squared_problem();
  auto dom = make_domain(p, 201);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  GammaField g = gamma_field(b0, scalar(0.0), index_of(*dom, 0.0), 1.0);
  for (std::size_t i = 0; i < g.ball.size(); ++i) {
    REQUIRE(g.values[i].has_value());
    CHECK((*g.values[i])[0] ==
          doctest::Approx(dom->point(g.ball[i])[0]).epsilon(1e-12));
  }
  DiscontinuityReport rep = discontinuity_scan(g, *dom, 20.0);
  CHECK(rep.classification == DiscontinuityReport::Class::None);
}

TEST_CASE("abs field with zero seed is the sign map, flagged at the origin") {
  Problem p = linsel_tests::abs_problem();
  auto dom = make_domain(p, 201);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  GammaField g = gamma_field(b0, scalar(0.0), index_of(*dom, 0.0), 1.0);
  std::size_t undefined = 0;
  for (std::size_t i = 0; i < g.ball.size(); ++i) {
    REQUIRE(g.values[i].has_value());
    const double y = dom->point(g.ball[i])[0];
    if (y != 0.0)
      CHECK((*g.values[i])[0] == doctest::Approx(y > 0 ? 1.0 : -1.0));
    undefined += !g.values[i].has_value();
  }
  CHECK(undefined == 0);

  DiscontinuityReport rep = discontinuity_scan(g, *dom, 20.0);
  CHECK(rep.classification == DiscontinuityReport::Class::IsolatedOnly);
  REQUIRE(rep.flagged.size() == 1);
  CHECK(std::fabs(dom->point(rep.flagged[0].sample)[0]) <=
        2.0 * dom->mesh());  // at or adjacent to the origin
}

TEST_CASE("full-space fibers return the seed everywhere") {
  Problem p = linsel_tests::full_space_problem(1, 3);
  auto dom = make_domain(p, 21);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  Eigen::VectorXd v(3);
  v << 1.0, -2.0, 0.5;
  GammaField g = gamma_field(b0, v, 10, 1.0);
  for (const auto& val : g.values) {
    REQUIRE(val.has_value());
    CHECK((*val - v).norm() == 0.0);
  }
  DiscontinuityReport rep = discontinuity_scan(g, *dom, 20.0);
  CHECK(rep.classification == DiscontinuityReport::Class::None);
  CHECK(rep.flagged.empty());
}

TEST_CASE("every defined sample lies in its fiber") {
  std::mt19937 rng(80);
  Problem p = linsel_tests::random_poly_problem(rng, 1, 2, 3);
  auto dom = make_domain(p, 41);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  Eigen::VectorXd v = linsel_tests::random_vector(rng, 3);
  GammaField g = gamma_field(b0, v, dom->size() / 2, 0.5);
  for (std::size_t i = 0; i < g.ball.size(); ++i) {
    if (!g.values[i]) continue;
    CHECK(dist_affine_point(b0.fibers[g.ball[i]], *g.values[i]) <= 1e-8);
  }
}

TEST_CASE("scan errors") {
  Problem p = linsel_tests::inconsistent_problem();
  auto dom = make_domain(p, 11);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  GammaField g = gamma_field(b0, scalar(0.0), 5, 1.0);
  CHECK_THROWS_AS(discontinuity_scan(g, *dom, 20.0), Error);
}

TEST_CASE("witness transfer reproduces the direct field") {
  SUBCASE("identity substitution returns the same field") {
    Problem p = linsel_tests::x_squared_problem();
    auto dom = make_domain(p, 101);
    Bundle b0 = initial_bundle(p, dom, Tolerances{});
    GammaField g = gamma_field(b0, scalar(0.0), index_of(*dom, 0.0), 0.5);
    GammaField t = witness_transfer(g, scalar(0.0), b0);
    for (std::size_t i = 0; i < g.ball.size(); ++i)
      CHECK((*t.values[i] - *g.values[i]).norm() <= 1e-15);
  }
  SUBCASE("x^2 instance: point fibers make the field seed-independent") {
    Problem p = linsel_tests::x_squared_problem();
    auto dom = make_domain(p, 101);
    Bundle b0 = initial_bundle(p, dom, Tolerances{});
    GammaField g = gamma_field(b0, scalar(0.0), index_of(*dom, 0.0), 0.5);
    GammaField t = witness_transfer(g, scalar(1.0), b0);
    GammaField direct = gamma_field(b0, scalar(1.0), index_of(*dom, 0.0), 0.5);
    for (std::size_t i = 0; i < g.ball.size(); ++i)
      CHECK((*t.values[i] - *direct.values[i]).norm() <= 1e-12);
  }
  SUBCASE("full-space fibers transfer to the new seed") {
    Problem p = linsel_tests::full_space_problem(1, 2);
    auto dom = make_domain(p, 21);
    Bundle b0 = initial_bundle(p, dom, Tolerances{});
    Eigen::VectorXd v(2), v2(2);
    v << 0.0, 0.0;
    v2 << 3.0, -1.0;
    GammaField g = gamma_field(b0, v, 10, 1.0);
    GammaField t = witness_transfer(g, v2, b0);
    for (const auto& val : t.values) CHECK((*val - v2).norm() <= 1e-15);
  }
}

TEST_CASE("transfer consistency on random seeds") {
  std::mt19937 rng(81);
  Problem p = linsel_tests::x_squared_problem();
  auto dom = make_domain(p, 101);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  const std::size_t center = index_of(*dom, 0.24);
  GammaField g = gamma_field(b0, scalar(0.24), center, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd v2 = linsel_tests::random_vector(rng, 1, 3.0);
    GammaField t = witness_transfer(g, v2, b0);
    GammaField direct = gamma_field(b0, v2, center, 0.5);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < g.ball.size(); ++i)
      max_diff = std::max(max_diff, (*t.values[i] - *direct.values[i]).norm());
    CHECK(max_diff <= 1e-7);
  }
}

TEST_CASE("P1 applied to gamma samples is seed-independent") {
  std::mt19937 rng(82);
  Problem p = linsel_tests::x_squared_problem();
  auto dom = make_domain(p, 101);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  const std::size_t center = index_of(*dom, 0.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd u = linsel_tests::random_vector(rng, 1, 3.0);
    Eigen::VectorXd w = linsel_tests::random_vector(rng, 1, 3.0);
    GammaField gu = gamma_field(b0, u, center, 0.5);
    GammaField gw = gamma_field(b0, w, center, 0.5);
    for (std::size_t i = 0; i < gu.ball.size(); ++i) {
      const AffineFiber& f = b0.fibers[gu.ball[i]];
      const Eigen::MatrixXd& D = f.dir();
      auto p1 = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return D.cols() ? Eigen::VectorXd(z - D * (D.transpose() * z)) : z;
      };
      CHECK((p1(*gu.values[i]) - p1(*gw.values[i])).norm() <= 1e-7);
    }
  }
}

TEST_CASE("continuity restatement: every x^2 sample has a clean shrunk ball") {
  Problem p = linsel_tests::x_squared_problem();
  auto dom = make_domain(p, 101);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  for (std::size_t i = 0; i < dom->size(); i += 10) {
    const AffineFiber& f = b0.fibers[i];
    Eigen::VectorXd seed = f.base();
    bool found = false;
    for (double r = 0.5; r >= 2.0 * dom->mesh(); r /= 2.0) {
      GammaField g = gamma_field(b0, seed, i, r);
      if (discontinuity_scan(g, *dom, 20.0).classification ==
          DiscontinuityReport::Class::None) {
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("classification separates isolated and clustered jump sites") {
  Problem p = linsel_tests::full_space_problem(1, 1);
  auto dom = make_domain(p, 41);  // mesh 0.05
  Bundle b0 = initial_bundle(p, dom, Tolerances{});

  auto spike_field = [&](std::initializer_list<double> spikes) {
    GammaField g = gamma_field(b0, scalar(0.0), dom->size() / 2,
                               2.0 * dom->diameter());
    for (std::size_t i = 0; i < g.ball.size(); ++i)
      for (double s : spikes)
        if (std::fabs(dom->point(g.ball[i])[0] - s) < 1e-12)
          g.values[i] = scalar(1.0);
    return g;
  };

  // Two spikes far apart: each flagged alone, pairwise separation large.
  DiscontinuityReport far_apart =
      discontinuity_scan(spike_field({-0.5, 0.5}), *dom, 20.0);
  CHECK(far_apart.classification == DiscontinuityReport::Class::IsolatedOnly);
  CHECK(far_apart.flagged.size() == 2);

  // Two spikes within the clustering radius.
  DiscontinuityReport adjacent =
      discontinuity_scan(spike_field({-0.5, -0.4}), *dom, 20.0);
  CHECK(adjacent.classification == DiscontinuityReport::Class::Clustered);
}

TEST_CASE("reports serialize to structured text") {
  Problem p = linsel_tests::abs_problem();
  auto dom = make_domain(p, 101);
  Bundle b0 = initial_bundle(p, dom, Tolerances{});
  GammaField g = gamma_field(b0, scalar(0.0), index_of(*dom, 0.0), 1.0);
  DiscontinuityReport rep = discontinuity_scan(g, *dom, 20.0);
  const std::string doc = rep.to_json();
  CHECK(doc.find("isolated-only") != std::string::npos);
  CHECK(doc.find("flagged") != std::string::npos);
}

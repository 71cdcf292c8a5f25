#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "linsel/expr.hpp"

using namespace linsel;

namespace {
Eigen::VectorXd pt(std::initializer_list<double> vals) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) x[i++] = v;
  return x;
}
}  // namespace

TEST_CASE("constant node evaluates to its value") {
  ScalarExpr e = ScalarExpr::constant(7.0);
  CHECK(e.evaluate(pt({0.0})) == 7.0);
  CHECK(e.evaluate(pt({123.0, -5.0})) == 7.0);
}

TEST_CASE("abs node") {
  ScalarExpr e = ScalarExpr::abs(ScalarExpr::coordinate(0));
  CHECK(e.evaluate(pt({-2.0})) == 2.0);
  CHECK(e.evaluate(pt({2.0})) == 2.0);
  CHECK(e.evaluate(pt({0.0})) == 0.0);
}

TEST_CASE("sqrt of x1^2 + x2^2 at (3,4) is 5") {
  ScalarExpr x1 = ScalarExpr::coordinate(0);
  ScalarExpr x2 = ScalarExpr::coordinate(1);
  ScalarExpr e = ScalarExpr::sqrt(x1 * x1 + x2 * x2);
  CHECK(e.evaluate(pt({3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("sqrt clamps tiny negatives and rejects real ones") {
  ScalarExpr e = ScalarExpr::sqrt(ScalarExpr::coordinate(0));
  CHECK(e.evaluate(pt({-1e-13})) == 0.0);
  CHECK_THROWS_AS(e.evaluate(pt({-1e-3})), DomainError);
}

TEST_CASE("max and min nodes") {
  ScalarExpr e =
      ScalarExpr::max(ScalarExpr::coordinate(0), ScalarExpr::constant(0.0));
  CHECK(e.evaluate(pt({-3.0})) == 0.0);
  CHECK(e.evaluate(pt({3.0})) == 3.0);
  ScalarExpr m =
      ScalarExpr::min(ScalarExpr::coordinate(0), ScalarExpr::constant(0.0));
  CHECK(m.evaluate(pt({-3.0})) == -3.0);
}

TEST_CASE("repeated evaluation is bit-identical") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ScalarExpr e = linsel_tests::random_poly(rng, 2);
    Eigen::VectorXd x = linsel_tests::random_vector(rng, 2);
    const double a = e.evaluate(x);
    for (int k = 0; k < 5; ++k) CHECK(e.evaluate(x) == a);
  }
}

TEST_CASE("supported nodes are continuous under h-halving") {
  std::mt19937 rng(11);
  using E = ScalarExpr;
  // Mix polynomials with abs/max/sqrt so every node kind is exercised.
  std::vector<E> exprs;
  for (int t = 0; t < 10; ++t) {
    E p = linsel_tests::random_poly(rng, 2);
    E q = linsel_tests::random_poly(rng, 2);
    exprs.push_back(E::abs(p) + E::max(p, q));
    exprs.push_back(E::sqrt(E::abs(p)) - E::min(p, q));
  }
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (const E& e : exprs) {
    // Estimate a modulus of continuity on the box: everything in the node
    // set is Hoelder-1/2 on compacts (sqrt) or better (the rest).
    double hoelder = 0.0;
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd a = pt({dist(rng), dist(rng)});
      Eigen::VectorXd b = a + 1e-3 * linsel_tests::random_vector(rng, 2);
      const double gap = (b - a).norm();
      if (gap > 0)
        hoelder = std::max(hoelder, std::fabs(e.evaluate(b) - e.evaluate(a)) /
                                        std::sqrt(gap));
    }
    Eigen::VectorXd x = pt({dist(rng), dist(rng)});
    Eigen::VectorXd dir = linsel_tests::random_vector(rng, 2);
    dir.normalize();
    const double fx = e.evaluate(x);
    double last = 0.0;
    for (int k = 3; k <= 20; ++k) {
      const double h = std::pow(0.5, k);
      last = std::fabs(e.evaluate(x + h * dir) - fx);
      CHECK(last <= 5.0 * (hoelder + 1.0) * std::sqrt(h));
    }
    CHECK(last <= 5.0 * (hoelder + 1.0) * 1e-3);
  }
}

TEST_CASE("expression grammar round trips the worked instance") {
  Problem p = parse_problem(R"json({
    "n": 1, "r": 1, "s": 1,
    "A": [["x1"]],
    "gamma": ["x1*x1"],
    "domain": {"lo": [-1], "hi": [1]}
  })json");
  CHECK(p.rows() == 1);
  CHECK(p.unknowns() == 1);
  CHECK(p.ambient_dim == 1);
  Eigen::MatrixXd A = eval_matrix(p.A, pt({0.5}));
  CHECK(A(0, 0) == 0.5);
  Eigen::VectorXd g = eval_vector(p.gamma, pt({0.5}));
  CHECK(g[0] == 0.25);
}

TEST_CASE("gamma dimension mismatch is rejected") {
  CHECK_THROWS_AS(parse_problem(R"json({
    "n": 1, "r": 2, "s": 2,
    "A": [["1","0"],["0","1"]],
    "gamma": ["1", "2", "3"],
    "domain": {"lo": [0], "hi": [1]}
  })json"),
                  ParseError);
}

TEST_CASE("abs is an accepted node in documents") {
  Problem p = parse_problem(R"json({
    "n": 1, "r": 1, "s": 1,
    "A": [["x1"]],
    "gamma": ["abs(x1)"],
    "domain": {"lo": [-1], "hi": [1]}
  })json");
  Eigen::VectorXd g = eval_vector(p.gamma, pt({-0.5}));
  CHECK(g[0] == 0.5);
}

TEST_CASE("unknown identifiers are rejected with location") {
  CHECK_THROWS_WITH_AS(parse_expression("sin(x1)", 1),
                       doctest::Contains("unknown identifier 'sin'"),
                       ParseError);
  CHECK_THROWS_AS(parse_expression("x3", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("x1 + y", 1), ParseError);
}

TEST_CASE("oversized literals and indices are parse errors, not crashes") {
  CHECK_THROWS_AS(parse_expression("x99999999999999999999", 2), ParseError);
  CHECK_THROWS_AS(parse_expression("99999999999999999999999", 1), ParseError);
  CHECK_THROWS_AS(parse_expression("1/99999999999999999999999", 1),
                  ParseError);
}

TEST_CASE("rational literals convert once at parse") {
  ScalarExpr e = parse_expression("3/4 + 1/4", 1);
  CHECK(e.evaluate(pt({0.0})) == 1.0);
  // '/' only forms literals; it is not an operator.
  CHECK_THROWS_AS(parse_expression("x1/2", 1), ParseError);
}

TEST_CASE("unary minus and precedence") {
  ScalarExpr e = parse_expression("-x1*x1 + 2", 1);
  CHECK(e.evaluate(pt({3.0})) == doctest::Approx(-7.0));
  ScalarExpr f = parse_expression("max(x1, min(x2, 1/2))", 2);
  CHECK(f.evaluate(pt({0.1, 0.9})) == 0.5);
}

TEST_CASE("matrix evaluation examples") {
  MatrixFunction S;
  S.rows = 1;
  S.cols = 1;
  S.entries = {ScalarExpr::coordinate(0)};
  CHECK(eval_matrix(S, pt({3.0}))(0, 0) == 3.0);

  MatrixFunction M;
  M.rows = 1;
  M.cols = 2;
  M.entries = {ScalarExpr::coordinate(0),
               ScalarExpr::coordinate(0) * ScalarExpr::coordinate(0)};
  Eigen::MatrixXd out = eval_matrix(M, pt({2.0}));
  CHECK(out(0, 0) == 2.0);
  CHECK(out(0, 1) == 4.0);

  MatrixFunction Z;
  Z.rows = 2;
  Z.cols = 2;
  for (int i = 0; i < 4; ++i) Z.entries.push_back(ScalarExpr::constant(0.0));
  CHECK(eval_matrix(Z, pt({1.0})).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("problem documents round-trip through serialization") {
  Problem p = parse_problem(R"json({
    "n": 2, "r": 1, "s": 2,
    "A": [["x1", "max(x2, 1/2)"]],
    "gamma": ["abs(x1 - x2)"],
    "domain": {"lo": [-1, -1], "hi": [1, 1], "constraint": "x1"}
  })json");
  Problem q = parse_problem(problem_to_json(p));
  CHECK(q.ambient_dim == p.ambient_dim);
  CHECK(q.rows() == p.rows());
  CHECK(q.unknowns() == p.unknowns());
  Eigen::VectorXd x(2);
  x << 0.3, 0.8;
  CHECK(eval_matrix(q.A, x) == eval_matrix(p.A, x));
  CHECK(eval_vector(q.gamma, x) == eval_vector(p.gamma, x));
  REQUIRE(q.domain.constraint.has_value());
  CHECK(q.domain.constraint->evaluate(x) == 0.3);

  // Bit-exact constants survive, including non-terminating decimals.
  ScalarExpr third = parse_expression("1/3", 1);
  ScalarExpr again = parse_expression(third.to_string(), 1);
  Eigen::VectorXd origin = pt({0.0});
  CHECK(again.evaluate(origin) == third.evaluate(origin));
}

TEST_CASE("evaluation errors carry the entry location") {
  MatrixFunction M;
  M.rows = 1;
  M.cols = 1;
  M.entries = {ScalarExpr::sqrt(ScalarExpr::coordinate(0))};
  CHECK_THROWS_WITH_AS(eval_matrix(M, pt({-1.0})),
                       doctest::Contains("A[1][1]"), DomainError);
}

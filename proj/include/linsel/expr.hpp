#ifndef LINSEL_EXPR_HPP
#define LINSEL_EXPR_HPP

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "linsel/config.hpp"
#include "linsel/errors.hpp"

namespace linsel {

/// Node kinds of the supported expression class: polynomials extended with
/// abs, max/min and sqrt of nonnegative arguments. The class is closed under
/// these operations and every member is continuous, which is what the rest
/// of the solver relies on.
enum class ExprKind {
  Constant,
  Coordinate,
  Add,
  Sub,
  Mul,
  Abs,
  Sqrt,
  Max,
  Min,
};

/// Immutable scalar expression tree, evaluable at points of R^n.
/// Trees are shared_ptr-backed; copies are cheap and evaluation is
/// read-only, so concurrent use is safe.
class ScalarExpr {
public:
  ScalarExpr() = default;

  static ScalarExpr constant(double value);
  /// Exact rational constant, converted to floating point once, here.
  static ScalarExpr rational(long long num, long long den);
  /// Coordinate selector x_{index+1}; `index` is 0-based internally.
  static ScalarExpr coordinate(int index);

  static ScalarExpr add(ScalarExpr a, ScalarExpr b);
  static ScalarExpr sub(ScalarExpr a, ScalarExpr b);
  static ScalarExpr mul(ScalarExpr a, ScalarExpr b);
  static ScalarExpr abs(ScalarExpr a);
  static ScalarExpr sqrt(ScalarExpr a);
  static ScalarExpr max(ScalarExpr a, ScalarExpr b);
  static ScalarExpr min(ScalarExpr a, ScalarExpr b);

  bool valid() const { return root_ != nullptr; }

  /// Largest 0-based coordinate index referenced, or -1 for constants.
  int max_coordinate() const;

  /// Evaluate at x. Deterministic: identical (expr, x) pairs give
  /// bit-identical results. Sqrt arguments in [-tol_eval, 0] clamp to 0;
  /// arguments below -tol_eval raise DomainError naming the node.
  double evaluate(const Eigen::VectorXd& x, double tol_eval = 1e-12) const;

  /// Infix rendering, used in error messages and dumps.
  std::string to_string() const;

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    return add(a, b);
  }
  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
    return sub(a, b);
  }
  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    return mul(a, b);
  }

private:
  struct Node {
    ExprKind kind;
    double value = 0.0;  // Constant
    int coord = -1;      // Coordinate
    std::shared_ptr<const Node> a, b;
  };

  explicit ScalarExpr(std::shared_ptr<const Node> root)
      : root_(std::move(root)) {}

  static double eval_node(const Node& n, const Eigen::VectorXd& x,
                          double tol_eval);
  static void print_node(const Node& n, std::string& out);
  static int max_coord_node(const Node& n);

  std::shared_ptr<const Node> root_;
};

/// Parse one expression in the problem-file mini-grammar over x1..xn:
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := '-' factor | atom
///   atom   := literal | coordinate | '(' expr ')'
///           | ('abs'|'sqrt') '(' expr ')'
///           | ('max'|'min') '(' expr ',' expr ')'
///   literal    := integer ['/' integer] | decimal
///   coordinate := 'x' integer       (1-based)
/// Unknown identifiers are rejected with their position.
ScalarExpr parse_expression(const std::string& text, int ambient_dim);

/// r x s grid of scalar expressions; houses A(x).
struct MatrixFunction {
  int rows = 0;
  int cols = 0;
  std::vector<ScalarExpr> entries;  // row-major

  const ScalarExpr& at(int i, int j) const { return entries[i * cols + j]; }
  ScalarExpr& at(int i, int j) { return entries[i * cols + j]; }
};

/// Length-r column of scalar expressions; houses gamma(x).
struct VectorFunction {
  int dim = 0;
  std::vector<ScalarExpr> entries;
};

/// Entrywise evaluation. Evaluation errors are rethrown with the (row, col)
/// location attached.
Eigen::MatrixXd eval_matrix(const MatrixFunction& M, const Eigen::VectorXd& x,
                            double tol_eval = 1e-12);
Eigen::VectorXd eval_vector(const VectorFunction& v, const Eigen::VectorXd& x,
                            double tol_eval = 1e-12);

/// Compact box [lo, hi] in R^n with an optional membership predicate
/// constraint(x) >= 0 carving a semialgebraic subset out of the box.
struct DomainSpec {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::optional<ScalarExpr> constraint;

  bool contains_box(const Eigen::VectorXd& x) const;
};

/// The parametric system A(x) phi(x) = gamma(x) over the domain.
struct Problem {
  int ambient_dim = 0;  // n
  MatrixFunction A;     // r x s
  VectorFunction gamma;  // r
  DomainSpec domain;

  int rows() const { return A.rows; }      // r
  int unknowns() const { return A.cols; }  // s
};

/// Parse a problem document (JSON text). Validates dimensions, coordinate
/// indices and the expression grammar; malformed input raises ParseError
/// with a location.
Problem parse_problem(const std::string& json_text);

/// Serialize back to the document format (used by tests and tooling).
std::string problem_to_json(const Problem& p);

}  // namespace linsel

#endif

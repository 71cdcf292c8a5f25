#include "linsel/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

namespace linsel {

using json = nlohmann::json;

ScalarExpr ScalarExpr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = value;
  return ScalarExpr(n);
}

ScalarExpr ScalarExpr::rational(long long num, long long den) {
  if (den == 0) throw ParseError("rational literal with zero denominator");
  return constant(static_cast<double>(num) / static_cast<double>(den));
}

ScalarExpr ScalarExpr::coordinate(int index) {
  if (index < 0) throw Error("coordinate index must be nonnegative");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Coordinate;
  n->coord = index;
  return ScalarExpr(n);
}

#define LINSEL_BINARY(NAME, KIND)                               \
  ScalarExpr ScalarExpr::NAME(ScalarExpr a, ScalarExpr b) {     \
    if (!a.valid() || !b.valid()) throw Error("empty operand"); \
    auto n = std::make_shared<Node>();                          \
    n->kind = ExprKind::KIND;                                   \
    n->a = a.root_;                                             \
    n->b = b.root_;                                             \
    return ScalarExpr(n);                                       \
  }

LINSEL_BINARY(add, Add)
LINSEL_BINARY(sub, Sub)
LINSEL_BINARY(mul, Mul)
LINSEL_BINARY(max, Max)
LINSEL_BINARY(min, Min)
#undef LINSEL_BINARY

ScalarExpr ScalarExpr::abs(ScalarExpr a) {
  if (!a.valid()) throw Error("empty operand");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Abs;
  n->a = a.root_;
  return ScalarExpr(n);
}

ScalarExpr ScalarExpr::sqrt(ScalarExpr a) {
  if (!a.valid()) throw Error("empty operand");
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Sqrt;
  n->a = a.root_;
  return ScalarExpr(n);
}

int ScalarExpr::max_coord_node(const Node& n) {
  switch (n.kind) {
    case ExprKind::Constant:
      return -1;
    case ExprKind::Coordinate:
      return n.coord;
    case ExprKind::Abs:
    case ExprKind::Sqrt:
      return max_coord_node(*n.a);
    default:
      return std::max(max_coord_node(*n.a), max_coord_node(*n.b));
  }
}

int ScalarExpr::max_coordinate() const {
  if (!root_) return -1;
  return max_coord_node(*root_);
}

double ScalarExpr::eval_node(const Node& n, const Eigen::VectorXd& x,
                             double tol_eval) {
  switch (n.kind) {
    case ExprKind::Constant:
      return n.value;
    case ExprKind::Coordinate:
      if (n.coord >= x.size())
        throw ContractError("coordinate x" + std::to_string(n.coord + 1) +
                            " out of range for point of dimension " +
                            std::to_string(x.size()));
      return x[n.coord];
    case ExprKind::Add:
      return eval_node(*n.a, x, tol_eval) + eval_node(*n.b, x, tol_eval);
    case ExprKind::Sub:
      return eval_node(*n.a, x, tol_eval) - eval_node(*n.b, x, tol_eval);
    case ExprKind::Mul:
      return eval_node(*n.a, x, tol_eval) * eval_node(*n.b, x, tol_eval);
    case ExprKind::Abs:
      return std::fabs(eval_node(*n.a, x, tol_eval));
    case ExprKind::Sqrt: {
      double arg = eval_node(*n.a, x, tol_eval);
      if (arg < -tol_eval) {
        std::string node;
        print_node(*n.a, node);
        throw DomainError("sqrt argument " + std::to_string(arg) +
                          " below -tol_eval in sqrt(" + node + ")");
      }
      return std::sqrt(arg < 0.0 ? 0.0 : arg);
    }
    case ExprKind::Max:
      return std::max(eval_node(*n.a, x, tol_eval),
                      eval_node(*n.b, x, tol_eval));
    case ExprKind::Min:
      return std::min(eval_node(*n.a, x, tol_eval),
                      eval_node(*n.b, x, tol_eval));
  }
  throw Error("unreachable expression kind");
}

double ScalarExpr::evaluate(const Eigen::VectorXd& x, double tol_eval) const {
  if (!root_) throw Error("evaluate called on an empty expression");
  return eval_node(*root_, x, tol_eval);
}

void ScalarExpr::print_node(const Node& n, std::string& out) {
  std::ostringstream os;
  switch (n.kind) {
    case ExprKind::Constant:
      // Full precision so serialized documents reparse to the same value.
      os.precision(17);
      os << n.value;
      out += os.str();
      return;
    case ExprKind::Coordinate:
      out += "x" + std::to_string(n.coord + 1);
      return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul: {
      const char* op = n.kind == ExprKind::Add   ? " + "
                       : n.kind == ExprKind::Sub ? " - "
                                                 : "*";
      out += "(";
      print_node(*n.a, out);
      out += op;
      print_node(*n.b, out);
      out += ")";
      return;
    }
    case ExprKind::Abs:
    case ExprKind::Sqrt:
      out += n.kind == ExprKind::Abs ? "abs(" : "sqrt(";
      print_node(*n.a, out);
      out += ")";
      return;
    case ExprKind::Max:
    case ExprKind::Min:
      out += n.kind == ExprKind::Max ? "max(" : "min(";
      print_node(*n.a, out);
      out += ", ";
      print_node(*n.b, out);
      out += ")";
      return;
  }
}

std::string ScalarExpr::to_string() const {
  if (!root_) return "<empty>";
  std::string out;
  print_node(*root_, out);
  return out;
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

namespace {

class ExprParser {
public:
  ExprParser(const std::string& text, int ambient_dim)
      : text_(text), dim_(ambient_dim) {}

  ScalarExpr parse() {
    ScalarExpr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("trailing characters after expression", pos_);
    return e;
  }

private:
  ScalarExpr parse_expr() {
    ScalarExpr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (accept('+'))
        lhs = ScalarExpr::add(lhs, parse_term());
      else if (accept('-'))
        lhs = ScalarExpr::sub(lhs, parse_term());
      else
        return lhs;
    }
  }

  ScalarExpr parse_term() {
    ScalarExpr lhs = parse_factor();
    for (;;) {
      skip_ws();
      if (accept('*'))
        lhs = ScalarExpr::mul(lhs, parse_factor());
      else
        return lhs;
    }
  }

  ScalarExpr parse_factor() {
    skip_ws();
    if (accept('-'))
      return ScalarExpr::sub(ScalarExpr::constant(0.0), parse_factor());
    return parse_atom();
  }

  ScalarExpr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_literal();
    if (accept('(')) {
      ScalarExpr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  ScalarExpr parse_identifier() {
    std::size_t start = pos_;
    std::string name;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      name += text_[pos_++];

    if (name.size() >= 2 && name[0] == 'x' &&
        std::isdigit(static_cast<unsigned char>(name[1]))) {
      for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
          throw ParseError("unknown identifier '" + name + "'", start);
      long idx = 0;
      try {
        idx = std::stol(name.substr(1));
      } catch (const std::exception&) {
        throw ParseError("coordinate index out of range in '" + name + "'",
                         start);
      }
      if (idx < 1 || idx > dim_)
        throw ParseError("coordinate " + name + " out of range 1.." +
                             std::to_string(dim_),
                         start);
      return ScalarExpr::coordinate(static_cast<int>(idx - 1));
    }

    if (name == "abs" || name == "sqrt") {
      expect('(');
      ScalarExpr a = parse_expr();
      expect(')');
      return name == "abs" ? ScalarExpr::abs(a) : ScalarExpr::sqrt(a);
    }
    if (name == "max" || name == "min") {
      expect('(');
      ScalarExpr a = parse_expr();
      expect(',');
      ScalarExpr b = parse_expr();
      expect(')');
      return name == "max" ? ScalarExpr::max(a, b) : ScalarExpr::min(a, b);
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  ScalarExpr parse_literal() {
    std::size_t start = pos_;
    std::string digits;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      digits += text_[pos_++];

    // Decimal literal: significand parsed once via strtod.
    if (pos_ < text_.size() && text_[pos_] == '.') {
      std::string dec = digits + '.';
      ++pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        dec += text_[pos_++];
      if (dec == ".") throw ParseError("malformed number", start);
      return ScalarExpr::constant(std::stod(dec));
    }

    if (digits.empty()) throw ParseError("malformed number", start);
    auto to_ll = [&](const std::string& text) -> long long {
      try {
        return std::stoll(text);
      } catch (const std::exception&) {
        throw ParseError("integer literal out of range", start);
      }
    };
    long long num = to_ll(digits);

    // Rational literal p/q. '/' appears only inside literals; there is no
    // division operator in the grammar.
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      std::string den;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_])))
        den += text_[pos_++];
      if (den.empty())
        throw ParseError("expected denominator after '/'", pos_);
      return ScalarExpr::rational(num, to_ll(den));
    }
    return ScalarExpr::constant(static_cast<double>(num));
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  const std::string& text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr parse_expression(const std::string& text, int ambient_dim) {
  return ExprParser(text, ambient_dim).parse();
}

// ---------------------------------------------------------------------------
// Matrix / vector evaluation
// ---------------------------------------------------------------------------

Eigen::MatrixXd eval_matrix(const MatrixFunction& M, const Eigen::VectorXd& x,
                            double tol_eval) {
  Eigen::MatrixXd out(M.rows, M.cols);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) {
      try {
        out(i, j) = M.at(i, j).evaluate(x, tol_eval);
      } catch (const Error& e) {
        throw DomainError("A[" + std::to_string(i + 1) + "][" +
                          std::to_string(j + 1) + "]: " + e.what());
      }
    }
  return out;
}

Eigen::VectorXd eval_vector(const VectorFunction& v, const Eigen::VectorXd& x,
                            double tol_eval) {
  Eigen::VectorXd out(v.dim);
  for (int i = 0; i < v.dim; ++i) {
    try {
      out[i] = v.entries[i].evaluate(x, tol_eval);
    } catch (const Error& e) {
      throw DomainError("gamma[" + std::to_string(i + 1) + "]: " + e.what());
    }
  }
  return out;
}

bool DomainSpec::contains_box(const Eigen::VectorXd& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Problem document parsing
// ---------------------------------------------------------------------------

Problem parse_problem(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }

  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key))
      throw ParseError(std::string("missing field '") + key + "'");
    return doc.at(key);
  };

  Problem p;
  p.ambient_dim = require("n").get<int>();
  int r = require("r").get<int>();
  int s = require("s").get<int>();
  if (p.ambient_dim < 1 || r < 1 || s < 1)
    throw ParseError("n, r, s must all be >= 1");

  const json& A = require("A");
  if (!A.is_array() || static_cast<int>(A.size()) != r)
    throw ParseError("A must be an array of r rows (dimension mismatch)");
  p.A.rows = r;
  p.A.cols = s;
  p.A.entries.resize(static_cast<std::size_t>(r) * s);
  for (int i = 0; i < r; ++i) {
    const json& row = A.at(i);
    if (!row.is_array() || static_cast<int>(row.size()) != s)
      throw ParseError("A row " + std::to_string(i + 1) +
                       " must have s entries (dimension mismatch)");
    for (int j = 0; j < s; ++j) {
      try {
        p.A.at(i, j) =
            parse_expression(row.at(j).get<std::string>(), p.ambient_dim);
      } catch (const ParseError& e) {
        throw ParseError("A[" + std::to_string(i + 1) + "][" +
                         std::to_string(j + 1) + "]: " + e.what());
      }
    }
  }

  const json& g = require("gamma");
  if (!g.is_array() || static_cast<int>(g.size()) != r)
    throw ParseError("gamma must have r entries (dimension mismatch)");
  p.gamma.dim = r;
  p.gamma.entries.resize(r);
  for (int i = 0; i < r; ++i) {
    try {
      p.gamma.entries[i] =
          parse_expression(g.at(i).get<std::string>(), p.ambient_dim);
    } catch (const ParseError& e) {
      throw ParseError("gamma[" + std::to_string(i + 1) + "]: " + e.what());
    }
  }

  const json& dom = require("domain");
  if (!dom.contains("lo") || !dom.contains("hi"))
    throw ParseError("domain must contain 'lo' and 'hi' arrays");
  auto lo = dom.at("lo").get<std::vector<double>>();
  auto hi = dom.at("hi").get<std::vector<double>>();
  if (static_cast<int>(lo.size()) != p.ambient_dim ||
      static_cast<int>(hi.size()) != p.ambient_dim)
    throw ParseError("domain lo/hi must have length n");
  p.domain.lo = Eigen::Map<Eigen::VectorXd>(lo.data(), lo.size());
  p.domain.hi = Eigen::Map<Eigen::VectorXd>(hi.data(), hi.size());
  for (int i = 0; i < p.ambient_dim; ++i)
    if (!(p.domain.lo[i] <= p.domain.hi[i]))
      throw ParseError("domain box must satisfy lo <= hi on axis " +
                       std::to_string(i + 1));
  if (dom.contains("constraint")) {
    try {
      p.domain.constraint = parse_expression(
          dom.at("constraint").get<std::string>(), p.ambient_dim);
    } catch (const ParseError& e) {
      throw ParseError(std::string("domain constraint: ") + e.what());
    }
  }
  return p;
}

std::string problem_to_json(const Problem& p) {
  json doc;
  doc["n"] = p.ambient_dim;
  doc["r"] = p.rows();
  doc["s"] = p.unknowns();
  json A = json::array();
  for (int i = 0; i < p.A.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < p.A.cols; ++j) row.push_back(p.A.at(i, j).to_string());
    A.push_back(row);
  }
  doc["A"] = A;
  json g = json::array();
  for (const auto& e : p.gamma.entries) g.push_back(e.to_string());
  doc["gamma"] = g;
  doc["domain"]["lo"] =
      std::vector<double>(p.domain.lo.data(), p.domain.lo.data() + p.domain.lo.size());
  doc["domain"]["hi"] =
      std::vector<double>(p.domain.hi.data(), p.domain.hi.data() + p.domain.hi.size());
  if (p.domain.constraint)
    doc["domain"]["constraint"] = p.domain.constraint->to_string();
  return doc.dump(2);
}

}  // namespace linsel

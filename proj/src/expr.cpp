#include "schurlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "schurlab/errors.hpp"

namespace schurlab {

namespace {

enum class Op { Constant, Variable, Negate, Add, Subtract, Multiply, Divide, Power, Call, Compare };

enum class Fn {
  Sin, Cos, Tan, Asin, Acos, Atan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs, Sgn,
  Atan2, Min, Max,
};

enum class Cmp { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

struct FnInfo {
  Fn fn;
  int args;
};

const std::unordered_map<std::string, FnInfo>& function_table() {
  static const std::unordered_map<std::string, FnInfo> table = {
      {"sin", {Fn::Sin, 1}},     {"cos", {Fn::Cos, 1}},     {"tan", {Fn::Tan, 1}},
      {"asin", {Fn::Asin, 1}},   {"acos", {Fn::Acos, 1}},   {"atan", {Fn::Atan, 1}},
      {"sinh", {Fn::Sinh, 1}},   {"cosh", {Fn::Cosh, 1}},   {"tanh", {Fn::Tanh, 1}},
      {"exp", {Fn::Exp, 1}},     {"log", {Fn::Log, 1}},     {"sqrt", {Fn::Sqrt, 1}},
      {"abs", {Fn::Abs, 1}},     {"sgn", {Fn::Sgn, 1}},     {"atan2", {Fn::Atan2, 2}},
      {"min", {Fn::Min, 2}},     {"max", {Fn::Max, 2}},     {"pow", {Fn::Atan2, 2}},
  };
  return table;
}

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Tan: return "tan";
    case Fn::Asin: return "asin";
    case Fn::Acos: return "acos";
    case Fn::Atan: return "atan";
    case Fn::Sinh: return "sinh";
    case Fn::Cosh: return "cosh";
    case Fn::Tanh: return "tanh";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    case Fn::Abs: return "abs";
    case Fn::Sgn: return "sgn";
    case Fn::Atan2: return "atan2";
    case Fn::Min: return "min";
    case Fn::Max: return "max";
  }
  return "?";
}

const char* cmp_name(Cmp c) {
  switch (c) {
    case Cmp::Less: return "<";
    case Cmp::LessEqual: return "<=";
    case Cmp::Greater: return ">";
    case Cmp::GreaterEqual: return ">=";
    case Cmp::Equal: return "==";
    case Cmp::NotEqual: return "!=";
  }
  return "?";
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

struct Expression::Node {
  Op op = Op::Constant;
  double value = 0.0;
  std::size_t index = 0;
  Fn fn = Fn::Sin;
  Cmp cmp = Cmp::Less;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr constant(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Constant;
  n->value = v;
  return n;
}

NodePtr variable(std::size_t i) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Variable;
  n->index = i;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::Constant; }

double eval(const Expression::Node& n, std::span<const double> in);

NodePtr make(Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

NodePtr call(Fn fn, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Call;
  n->fn = fn;
  n->args = std::move(args);
  bool all_const = true;
  for (const auto& a : n->args) all_const = all_const && is_const(a);
  if (all_const) return constant(eval(*n, {}));
  return n;
}

NodePtr compare(Cmp c, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Expression::Node>();
  n->op = Op::Compare;
  n->cmp = c;
  n->args = {std::move(a), std::move(b)};
  return n;
}

NodePtr neg(NodePtr a) {
  if (is_const(a)) return constant(-a->value);
  if (a->op == Op::Negate) return a->args[0];
  return make(Op::Negate, {std::move(a)});
}

NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) return constant(a->value + b->value);
  return make(Op::Add, {std::move(a), std::move(b)});
}

NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  if (is_const(a) && is_const(b)) return constant(a->value - b->value);
  return make(Op::Subtract, {std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return constant(a->value * b->value);
  return make(Op::Multiply, {std::move(a), std::move(b)});
}

NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return constant(a->value / b->value);
  return make(Op::Divide, {std::move(a), std::move(b)});
}

NodePtr power(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return constant(1.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) return constant(std::pow(a->value, b->value));
  return make(Op::Power, {std::move(a), std::move(b)});
}

double eval(const Expression::Node& n, std::span<const double> in) {
  switch (n.op) {
    case Op::Constant: return n.value;
    case Op::Variable: return in[n.index];
    case Op::Negate: return -eval(*n.args[0], in);
    case Op::Add: return eval(*n.args[0], in) + eval(*n.args[1], in);
    case Op::Subtract: return eval(*n.args[0], in) - eval(*n.args[1], in);
    case Op::Multiply: return eval(*n.args[0], in) * eval(*n.args[1], in);
    case Op::Divide: return eval(*n.args[0], in) / eval(*n.args[1], in);
    case Op::Power: return std::pow(eval(*n.args[0], in), eval(*n.args[1], in));
    case Op::Compare: {
      const double a = eval(*n.args[0], in);
      const double b = eval(*n.args[1], in);
      bool r = false;
      switch (n.cmp) {
        case Cmp::Less: r = a < b; break;
        case Cmp::LessEqual: r = a <= b; break;
        case Cmp::Greater: r = a > b; break;
        case Cmp::GreaterEqual: r = a >= b; break;
        case Cmp::Equal: r = a == b; break;
        case Cmp::NotEqual: r = a != b; break;
      }
      return r ? 1.0 : 0.0;
    }
    case Op::Call: {
      const double a = eval(*n.args[0], in);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Tan: return std::tan(a);
        case Fn::Asin: return std::asin(a);
        case Fn::Acos: return std::acos(a);
        case Fn::Atan: return std::atan(a);
        case Fn::Sinh: return std::sinh(a);
        case Fn::Cosh: return std::cosh(a);
        case Fn::Tanh: return std::tanh(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Log: return std::log(a);
        case Fn::Sqrt: return std::sqrt(a);
        case Fn::Abs: return std::abs(a);
        case Fn::Sgn: return sgn(a);
        case Fn::Atan2: return std::atan2(a, eval(*n.args[1], in));
        case Fn::Min: return std::min(a, eval(*n.args[1], in));
        case Fn::Max: return std::max(a, eval(*n.args[1], in));
      }
      break;
    }
  }
  return 0.0;
}

NodePtr differentiate(const NodePtr& n, std::size_t v) {
  const auto d = [v](const NodePtr& c) { return differentiate(c, v); };
  switch (n->op) {
    case Op::Constant: return constant(0.0);
    case Op::Variable: return constant(n->index == v ? 1.0 : 0.0);
    case Op::Negate: return neg(d(n->args[0]));
    case Op::Add: return add(d(n->args[0]), d(n->args[1]));
    case Op::Subtract: return sub(d(n->args[0]), d(n->args[1]));
    case Op::Multiply: {
      const auto& a = n->args[0];
      const auto& b = n->args[1];
      return add(mul(d(a), b), mul(a, d(b)));
    }
    case Op::Divide: {
      const auto& a = n->args[0];
      const auto& b = n->args[1];
      return div(sub(mul(d(a), b), mul(a, d(b))), mul(b, b));
    }
    case Op::Power: {
      const auto& a = n->args[0];
      const auto& b = n->args[1];
      const NodePtr db = d(b);
      if (is_const(db, 0.0)) {
        return mul(mul(b, power(a, sub(b, constant(1.0)))), d(a));
      }
      return mul(n, add(mul(db, call(Fn::Log, {a})), div(mul(b, d(a)), a)));
    }
    case Op::Compare: return constant(0.0);
    case Op::Call: {
      const auto& a = n->args[0];
      const NodePtr da = d(a);
      switch (n->fn) {
        case Fn::Sin: return mul(call(Fn::Cos, {a}), da);
        case Fn::Cos: return neg(mul(call(Fn::Sin, {a}), da));
        case Fn::Tan: {
          const NodePtr c = call(Fn::Cos, {a});
          return div(da, mul(c, c));
        }
        case Fn::Asin: return div(da, call(Fn::Sqrt, {sub(constant(1.0), mul(a, a))}));
        case Fn::Acos: return neg(div(da, call(Fn::Sqrt, {sub(constant(1.0), mul(a, a))})));
        case Fn::Atan: return div(da, add(constant(1.0), mul(a, a)));
        case Fn::Sinh: return mul(call(Fn::Cosh, {a}), da);
        case Fn::Cosh: return mul(call(Fn::Sinh, {a}), da);
        case Fn::Tanh: return mul(sub(constant(1.0), mul(n, n)), da);
        case Fn::Exp: return mul(n, da);
        case Fn::Log: return div(da, a);
        case Fn::Sqrt: return div(da, mul(constant(2.0), n));
        case Fn::Abs: return mul(call(Fn::Sgn, {a}), da);
        case Fn::Sgn: return constant(0.0);
        case Fn::Atan2: {
          const auto& x = n->args[1];
          const NodePtr dx = d(x);
          return div(sub(mul(x, da), mul(a, dx)), add(mul(x, x), mul(a, a)));
        }
        case Fn::Min: {
          const auto& b = n->args[1];
          return add(mul(compare(Cmp::LessEqual, a, b), da), mul(compare(Cmp::Greater, a, b), d(b)));
        }
        case Fn::Max: {
          const auto& b = n->args[1];
          return add(mul(compare(Cmp::GreaterEqual, a, b), da), mul(compare(Cmp::Less, a, b), d(b)));
        }
      }
      break;
    }
  }
  return constant(0.0);
}

void print(const NodePtr& n, const std::vector<std::string>* names, std::ostringstream& out) {
  switch (n->op) {
    case Op::Constant: {
      std::ostringstream num;
      num.precision(17);
      num << n->value;
      out << num.str();
      return;
    }
    case Op::Variable:
      if (names && n->index < names->size()) {
        out << (*names)[n->index];
      } else {
        out << "$" << n->index;
      }
      return;
    case Op::Negate:
      out << "(-";
      print(n->args[0], names, out);
      out << ")";
      return;
    case Op::Add:
    case Op::Subtract:
    case Op::Multiply:
    case Op::Divide:
    case Op::Power: {
      static const char* symbols[] = {"", "", "", "+", "-", "*", "/", "^"};
      out << "(";
      print(n->args[0], names, out);
      out << " " << symbols[static_cast<int>(n->op)] << " ";
      print(n->args[1], names, out);
      out << ")";
      return;
    }
    case Op::Compare:
      out << "(";
      print(n->args[0], names, out);
      out << " " << cmp_name(n->cmp) << " ";
      print(n->args[1], names, out);
      out << ")";
      return;
    case Op::Call:
      out << fn_name(n->fn) << "(";
      for (std::size_t i = 0; i < n->args.size(); ++i) {
        if (i) out << ", ";
        print(n->args[i], names, out);
      }
      out << ")";
      return;
  }
}

class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

  NodePtr parse() {
    NodePtr e = parse_compare();
    skip_space();
    if (pos_ != src_.size()) error("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::ParseError,
         what + " at offset " + std::to_string(pos_) + " in \"" + std::string(src_) + "\"");
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (src_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  NodePtr parse_compare() {
    NodePtr lhs = parse_sum();
    static const std::pair<std::string_view, Cmp> ops[] = {
        {"<=", Cmp::LessEqual}, {">=", Cmp::GreaterEqual}, {"==", Cmp::Equal},
        {"!=", Cmp::NotEqual},  {"<", Cmp::Less},          {">", Cmp::Greater},
    };
    for (const auto& [token, c] : ops) {
      if (accept(token)) return compare(c, lhs, parse_sum());
    }
    return lhs;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    while (true) {
      if (accept("+")) {
        lhs = make(Op::Add, {lhs, parse_product()});
      } else if (accept("-")) {
        lhs = make(Op::Subtract, {lhs, parse_product()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    while (true) {
      if (accept("*")) {
        lhs = make(Op::Multiply, {lhs, parse_unary()});
      } else if (accept("/")) {
        lhs = make(Op::Divide, {lhs, parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept("-")) return make(Op::Negate, {parse_unary()});
    if (accept("+")) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (accept("^")) return make(Op::Power, {base, parse_unary()});
    return base;
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= src_.size()) error("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_compare();
      if (!accept(")")) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    error("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const std::string rest(src_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      error("malformed number");
    }
    pos_ += used;
    return constant(v);
  }

  NodePtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(src_.substr(start, pos_ - start));
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      ++pos_;
      const auto& table = function_table();
      const auto it = table.find(name);
      if (it == table.end()) error("unknown function '" + name + "'");
      std::vector<NodePtr> args;
      args.push_back(parse_compare());
      while (accept(",")) args.push_back(parse_compare());
      if (!accept(")")) error("expected ')' after arguments of '" + name + "'");
      if (static_cast<int>(args.size()) != it->second.args) {
        error("function '" + name + "' takes " + std::to_string(it->second.args) + " argument(s)");
      }
      if (name == "pow") return make(Op::Power, {args[0], args[1]});
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Call;
      n->fn = it->second.fn;
      n->args = std::move(args);
      return n;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) return variable(i);
    }
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);
    error("unknown variable '" + name + "'");
  }

  std::string_view src_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view source, const std::vector<std::string>& variables) {
  Parser parser(source, variables);
  return Expression(parser.parse(), std::make_shared<const std::vector<std::string>>(variables));
}

double Expression::evaluate(std::span<const double> inputs) const {
  if (inputs.size() < arity()) {
    fail(ErrorKind::DimensionMismatch, "expression expects " + std::to_string(arity()) + " inputs");
  }
  return eval(*root_, inputs);
}

Expression Expression::derivative(std::size_t index) const {
  return Expression(differentiate(root_, index), names_);
}

std::string Expression::to_string() const {
  std::ostringstream out;
  print(root_, names_.get(), out);
  return out.str();
}

std::vector<std::string> product_chart_variables(int m_dim, int n_dim) {
  std::vector<std::string> names;
  for (int i = 1; i <= m_dim; ++i) names.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n_dim; ++i) names.push_back("y" + std::to_string(i));
  return names;
}

}  // namespace schurlab

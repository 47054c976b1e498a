#include "podsim/petri/expr.hpp"

#include <cmath>

#include "podsim/petri/errors.hpp"

namespace podsim::petri {

namespace {

bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_real(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

Value arith(Expr::Op op, const Value& a, const Value& b) {
  if (!is_numeric(a) || !is_numeric(b)) {
    throw EvalError("arithmetic over non-numeric operands: " + to_string(a) + ", " +
                    to_string(b));
  }
  const bool ints =
      std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b);
  if (ints) {
    const auto x = std::get<std::int64_t>(a);
    const auto y = std::get<std::int64_t>(b);
    switch (op) {
      case Expr::Op::Add:
        return Value{x + y};
      case Expr::Op::Sub:
        return Value{x - y};
      case Expr::Op::Mul:
        return Value{x * y};
      case Expr::Op::Div:
        if (y == 0) throw EvalError("integer division by zero");
        return Value{x / y};
      default:
        break;
    }
  }
  const double x = as_real(a);
  const double y = as_real(b);
  switch (op) {
    case Expr::Op::Add:
      return Value{x + y};
    case Expr::Op::Sub:
      return Value{x - y};
    case Expr::Op::Mul:
      return Value{x * y};
    case Expr::Op::Div:
      return Value{x / y};
    default:
      throw EvalError("bad arithmetic operator");
  }
}

Value compare(Expr::Op op, const Value& a, const Value& b) {
  const auto result = [](bool v) { return Value{static_cast<std::int64_t>(v ? 1 : 0)}; };
  if (is_numeric(a) && is_numeric(b)) {
    const double x = as_real(a);
    const double y = as_real(b);
    switch (op) {
      case Expr::Op::Eq:
        return result(x == y);
      case Expr::Op::Ne:
        return result(x != y);
      case Expr::Op::Lt:
        return result(x < y);
      case Expr::Op::Le:
        return result(x <= y);
      case Expr::Op::Gt:
        return result(x > y);
      case Expr::Op::Ge:
        return result(x >= y);
      default:
        break;
    }
  }
  if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
    const auto& x = std::get<std::string>(a);
    const auto& y = std::get<std::string>(b);
    switch (op) {
      case Expr::Op::Eq:
        return result(x == y);
      case Expr::Op::Ne:
        return result(x != y);
      case Expr::Op::Lt:
        return result(x < y);
      case Expr::Op::Le:
        return result(x <= y);
      case Expr::Op::Gt:
        return result(x > y);
      case Expr::Op::Ge:
        return result(x >= y);
      default:
        break;
    }
  }
  if (std::holds_alternative<NetRef>(a) && std::holds_alternative<NetRef>(b)) {
    if (op == Expr::Op::Eq) return result(std::get<NetRef>(a) == std::get<NetRef>(b));
    if (op == Expr::Op::Ne) return result(!(std::get<NetRef>(a) == std::get<NetRef>(b)));
  }
  throw EvalError("incomparable operands: " + to_string(a) + ", " + to_string(b));
}

std::int64_t as_flag(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EvalError("logical operand is not an int: " + to_string(v));
}

}  // namespace

Expr Expr::lit(Value v) {
  Expr e;
  e.op_ = Op::Lit;
  e.literal_ = std::move(v);
  return e;
}

Expr Expr::var(std::string name) {
  Expr e;
  e.op_ = Op::Var;
  e.name_ = std::move(name);
  return e;
}

Expr Expr::binary(Op op, Expr a, Expr b) {
  Expr e;
  e.op_ = op;
  e.args_.push_back(std::move(a));
  e.args_.push_back(std::move(b));
  return e;
}

Expr Expr::logical_not(Expr a) {
  Expr e;
  e.op_ = Op::Not;
  e.args_.push_back(std::move(a));
  return e;
}

Value Expr::eval(const Binding& binding) const {
  switch (op_) {
    case Op::Lit:
      return literal_;
    case Op::Var: {
      const auto it = binding.find(name_);
      if (it == binding.end()) throw EvalError("unbound variable: " + name_);
      return it->second;
    }
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
      return arith(op_, args_[0].eval(binding), args_[1].eval(binding));
    case Op::Eq:
    case Op::Ne:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      return compare(op_, args_[0].eval(binding), args_[1].eval(binding));
    case Op::And:
      return Value{static_cast<std::int64_t>(
          as_flag(args_[0].eval(binding)) != 0 && as_flag(args_[1].eval(binding)) != 0 ? 1 : 0)};
    case Op::Or:
      return Value{static_cast<std::int64_t>(
          as_flag(args_[0].eval(binding)) != 0 || as_flag(args_[1].eval(binding)) != 0 ? 1 : 0)};
    case Op::Not:
      return Value{static_cast<std::int64_t>(as_flag(args_[0].eval(binding)) == 0 ? 1 : 0)};
  }
  throw EvalError("bad expression node");
}

bool Expr::eval_bool(const Binding& binding) const { return as_flag(eval(binding)) != 0; }

void Expr::collect_vars(std::set<std::string>& out) const {
  if (op_ == Op::Var) {
    out.insert(name_);
    return;
  }
  for (const auto& a : args_) a.collect_vars(out);
}

}  // namespace podsim::petri

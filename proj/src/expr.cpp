#include "nhqm/expr.hpp"

#include <fmt/core.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

ScalarExpr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool is_one(const ScalarExpr& e) {
  return e && e->op == ExprNode::Op::Constant && e->value == std::complex<double>(1.0, 0.0);
}

}  // namespace

ScalarExpr constant(std::complex<double> v) {
  return make({.op = ExprNode::Op::Constant, .value = v});
}

ScalarExpr symbol(char s) { return make({.op = ExprNode::Op::Symbol, .symbol = s}); }

ScalarExpr add(ScalarExpr a, ScalarExpr b) {
  return make({.op = ExprNode::Op::Add, .a = std::move(a), .b = std::move(b)});
}

ScalarExpr sub(ScalarExpr a, ScalarExpr b) {
  return make({.op = ExprNode::Op::Sub, .a = std::move(a), .b = std::move(b)});
}

ScalarExpr mul(ScalarExpr a, ScalarExpr b) {
  return make({.op = ExprNode::Op::Mul, .a = std::move(a), .b = std::move(b)});
}

ScalarExpr div(ScalarExpr a, ScalarExpr b) {
  return make({.op = ExprNode::Op::Div, .a = std::move(a), .b = std::move(b)});
}

ScalarExpr neg(ScalarExpr a) {
  if (a->op == ExprNode::Op::Constant) return constant(-a->value);
  return make({.op = ExprNode::Op::Neg, .a = std::move(a)});
}

ScalarExpr pow_int(ScalarExpr a, long n) {
  return make({.op = ExprNode::Op::Pow, .ipower = n, .a = std::move(a)});
}

ScalarExpr abs_of(ScalarExpr a) { return make({.op = ExprNode::Op::Abs, .a = std::move(a)}); }

ScalarExpr exp_of(ScalarExpr a) { return make({.op = ExprNode::Op::Exp, .a = std::move(a)}); }

ScalarExpr ipow(ScalarExpr a, double nu) {
  return make({.op = ExprNode::Op::IPow, .nu = nu, .a = std::move(a)});
}

bool contains_symbol(const ScalarExpr& e, char s) {
  if (!e) return false;
  if (e->op == ExprNode::Op::Symbol) return e->symbol == s;
  return contains_symbol(e->a, s) || contains_symbol(e->b, s);
}

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case ExprNode::Op::Constant:
      return a->value == b->value;
    case ExprNode::Op::Symbol:
      return a->symbol == b->symbol;
    case ExprNode::Op::Pow:
      if (a->ipower != b->ipower) return false;
      break;
    case ExprNode::Op::IPow:
      if (a->nu != b->nu) return false;
      break;
    default:
      break;
  }
  return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b);
}

std::complex<double> eval(const ScalarExpr& e, double x) {
  using Op = ExprNode::Op;
  switch (e->op) {
    case Op::Constant:
      return e->value;
    case Op::Symbol:
      if (e->symbol != 'x') throw std::invalid_argument("momentum symbol in scalar context");
      return {x, 0.0};
    case Op::Add:
      return eval(e->a, x) + eval(e->b, x);
    case Op::Sub:
      return eval(e->a, x) - eval(e->b, x);
    case Op::Mul:
      return eval(e->a, x) * eval(e->b, x);
    case Op::Div:
      return eval(e->a, x) / eval(e->b, x);
    case Op::Neg:
      return -eval(e->a, x);
    case Op::Pow: {
      std::complex<double> base = eval(e->a, x);
      std::complex<double> r{1.0, 0.0};
      long n = std::labs(e->ipower);
      for (long k = 0; k < n; ++k) r *= base;
      return e->ipower >= 0 ? r : 1.0 / r;
    }
    case Op::Abs:
      return {std::abs(eval(e->a, x)), 0.0};
    case Op::Exp:
      return std::exp(eval(e->a, x));
    case Op::IPow: {
      double t = eval(e->a, x).real();
      if (t == 0.0) {
        if (e->nu == 0.0) return {1.0, 0.0};
        return {e->nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity(), 0.0};
      }
      double sgn = t > 0.0 ? 1.0 : -1.0;
      return std::pow(std::abs(t), e->nu) *
             std::exp(std::complex<double>(0.0, e->nu * M_PI * sgn / 2.0));
    }
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXcd eval_matrix(const ScalarExpr& e, const Eigen::MatrixXcd& x) {
  using Op = ExprNode::Op;
  const auto n = x.rows();
  auto ident = [&] { return Eigen::MatrixXcd::Identity(n, n); };
  switch (e->op) {
    case Op::Constant:
      return e->value * ident();
    case Op::Symbol:
      if (e->symbol != 'x') throw std::invalid_argument("momentum symbol in scalar context");
      return x;
    case Op::Add:
      return eval_matrix(e->a, x) + eval_matrix(e->b, x);
    case Op::Sub:
      return eval_matrix(e->a, x) - eval_matrix(e->b, x);
    case Op::Mul:
      return eval_matrix(e->a, x) * eval_matrix(e->b, x);
    case Op::Div:
      return eval_matrix(e->a, x) * eval_matrix(e->b, x).partialPivLu().inverse();
    case Op::Neg:
      return -eval_matrix(e->a, x);
    case Op::Pow: {
      Eigen::MatrixXcd base = eval_matrix(e->a, x);
      if (e->ipower < 0) base = base.partialPivLu().inverse();
      Eigen::MatrixXcd r = ident();
      for (long k = 0; k < std::labs(e->ipower); ++k) r = r * base;
      return r;
    }
    default:
      throw std::invalid_argument("expression not polynomial; matrix substitution unsupported");
  }
}

namespace {

std::string format_real(double v) { return fmt::format("{}", v); }

std::string format_constant(std::complex<double> c) {
  if (c.imag() == 0.0) {
    std::string s = format_real(c.real());
    return c.real() < 0.0 ? "(" + s + ")" : s;
  }
  if (c.real() == 0.0) {
    std::string s = format_real(c.imag()) + "i";
    return c.imag() < 0.0 ? "(" + s + ")" : s;
  }
  return "(" + format_real(c.real()) + " + " + format_real(c.imag()) + "i)";
}

}  // namespace

std::string to_string(const ScalarExpr& e) {
  using Op = ExprNode::Op;
  switch (e->op) {
    case Op::Constant:
      return format_constant(e->value);
    case Op::Symbol:
      return std::string(1, e->symbol);
    case Op::Add:
      return "(" + to_string(e->a) + " + " + to_string(e->b) + ")";
    case Op::Sub:
      return "(" + to_string(e->a) + " - " + to_string(e->b) + ")";
    case Op::Mul:
      return "(" + to_string(e->a) + "*" + to_string(e->b) + ")";
    case Op::Div:
      return "(" + to_string(e->a) + "/" + to_string(e->b) + ")";
    case Op::Neg:
      return "(-" + to_string(e->a) + ")";
    case Op::Pow:
      return "(" + to_string(e->a) + ")^" + std::to_string(e->ipower);
    case Op::Abs:
      return "abs(" + to_string(e->a) + ")";
    case Op::Exp:
      return "exp(" + to_string(e->a) + ")";
    case Op::IPow:
      return "ipow(" + to_string(e->a) + ", " + format_real(e->nu) + ")";
  }
  throw std::logic_error("unreachable");
}

std::complex<double> OperatorExpr::derivative_coefficient(int k, double x) const {
  static const std::complex<double> mi(0.0, -1.0);
  std::complex<double> phase{1.0, 0.0};
  for (int j = 0; j < k; ++j) phase *= mi;
  for (const auto& t : terms)
    if (t.p_power == k) return phase * eval(t.coeff, x);
  return {0.0, 0.0};
}

bool OperatorExpr::has_power(int k) const {
  for (const auto& t : terms)
    if (t.p_power == k) return true;
  return false;
}

std::string to_string(const OperatorExpr& e) {
  std::string out;
  for (const auto& t : e.terms) {
    if (!out.empty()) out += " + ";
    if (t.p_power == 0) {
      out += to_string(t.coeff);
    } else {
      std::string p = t.p_power == 1 ? "p" : "p^" + std::to_string(t.p_power);
      out += is_one(t.coeff) ? p : to_string(t.coeff) + "*" + p;
    }
  }
  return out.empty() ? "0" : out;
}

bool structurally_equal(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    if (a.terms[i].p_power != b.terms[i].p_power) return false;
    if (!structurally_equal(a.terms[i].coeff, b.terms[i].coeff)) return false;
  }
  return true;
}

namespace {

// Coefficients of p^0..p^2; null = absent.
using PPoly = std::array<ScalarExpr, 3>;

PPoly scalar_only(ScalarExpr e) { return {std::move(e), nullptr, nullptr}; }

bool is_scalar(const PPoly& p) { return !p[1] && !p[2]; }

ScalarExpr combine(const ScalarExpr& a, const ScalarExpr& b,
                   ScalarExpr (*op)(ScalarExpr, ScalarExpr)) {
  if (a && b) return op(a, b);
  return a ? a : b;
}

PPoly lower(const ScalarExpr& e) {
  using Op = ExprNode::Op;
  if (!contains_symbol(e, 'p')) return scalar_only(e);
  switch (e->op) {
    case Op::Symbol:
      return {nullptr, constant(1.0), nullptr};
    case Op::Add: {
      PPoly a = lower(e->a), b = lower(e->b), r{};
      for (int k = 0; k < 3; ++k) r[k] = combine(a[k], b[k], add);
      return r;
    }
    case Op::Sub: {
      PPoly a = lower(e->a), b = lower(e->b), r{};
      for (int k = 0; k < 3; ++k) {
        if (a[k] && b[k])
          r[k] = sub(a[k], b[k]);
        else if (a[k])
          r[k] = a[k];
        else if (b[k])
          r[k] = neg(b[k]);
      }
      return r;
    }
    case Op::Neg: {
      PPoly a = lower(e->a), r{};
      for (int k = 0; k < 3; ++k)
        if (a[k]) r[k] = neg(a[k]);
      return r;
    }
    case Op::Mul: {
      PPoly a = lower(e->a), b = lower(e->b);
      if (is_scalar(a)) {
        PPoly r = b;
        for (int k = 0; k < 3; ++k)
          if (r[k]) r[k] = is_one(r[k]) ? a[0] : mul(a[0], r[k]);
        return r;
      }
      if (is_scalar(b)) {
        if (contains_symbol(b[0], 'x'))
          throw std::invalid_argument("x-dependent factor right of p is not supported");
        PPoly r = a;
        for (int k = 0; k < 3; ++k)
          if (r[k]) r[k] = is_one(r[k]) ? b[0] : mul(r[k], b[0]);
        return r;
      }
      // Both factors carry p; the right one must be x-free.
      for (int k = 0; k < 3; ++k)
        if (b[k] && contains_symbol(b[k], 'x'))
          throw std::invalid_argument("x-dependent factor right of p is not supported");
      PPoly r{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (!a[i] || !b[j]) continue;
          if (i + j > 2) throw std::invalid_argument("p-degree exceeds 2");
          ScalarExpr c = is_one(a[i]) ? b[j] : (is_one(b[j]) ? a[i] : mul(a[i], b[j]));
          r[i + j] = combine(r[i + j], c, add);
        }
      return r;
    }
    case Op::Div: {
      PPoly a = lower(e->a);
      if (contains_symbol(e->b, 'p')) throw std::invalid_argument("division by p is not supported");
      if (contains_symbol(e->b, 'x'))
        throw std::invalid_argument("x-dependent factor right of p is not supported");
      PPoly r{};
      for (int k = 0; k < 3; ++k)
        if (a[k]) r[k] = div(a[k], e->b);
      return r;
    }
    case Op::Pow: {
      if (!(e->a->op == Op::Symbol && e->a->symbol == 'p'))
        throw std::invalid_argument("only the bare symbol p may be raised to an operator power");
      if (e->ipower < 0 || e->ipower > 2) throw std::invalid_argument("p-degree exceeds 2");
      PPoly r{};
      r[static_cast<int>(e->ipower)] = constant(1.0);
      return r;
    }
    case Op::Abs:
    case Op::Exp:
    case Op::IPow:
      throw std::invalid_argument("p inside function argument");
    default:
      throw std::invalid_argument("unsupported use of p");
  }
}

}  // namespace

OperatorExpr lower_to_operator(const ScalarExpr& e) {
  PPoly p = lower(e);
  OperatorExpr out;
  for (int k = 0; k < 3; ++k)
    if (p[k]) out.terms.push_back({p[k], k});
  return out;
}

}  // namespace nhqm

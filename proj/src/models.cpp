#include "nhqm/models.hpp"

#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "nhqm/errors.hpp"

namespace nhqm {

namespace {

using cd = std::complex<double>;

bool is_const(const ScalarExpr& e) { return e->op == ExprNode::Op::Constant; }

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool eat(char c) {
    if (peek() != c) return false;
    ++pos;
    return true;
  }

  void expect(char c) {
    if (!eat(c)) fail(fmt::format("expected '{}'", c));
  }

  ScalarExpr parse_expr() {
    ScalarExpr e = parse_term();
    while (true) {
      if (eat('+')) {
        ScalarExpr r = parse_term();
        e = (is_const(e) && is_const(r)) ? constant(e->value + r->value) : add(e, r);
      } else if (eat('-')) {
        ScalarExpr r = parse_term();
        e = (is_const(e) && is_const(r)) ? constant(e->value - r->value) : sub(e, r);
      } else {
        return e;
      }
    }
  }

  ScalarExpr parse_term() {
    ScalarExpr e = parse_unary();
    while (true) {
      if (eat('*')) {
        ScalarExpr r = parse_unary();
        e = (is_const(e) && is_const(r)) ? constant(e->value * r->value) : mul(e, r);
      } else if (eat('/')) {
        ScalarExpr r = parse_unary();
        e = (is_const(e) && is_const(r)) ? constant(e->value / r->value) : div(e, r);
      } else {
        return e;
      }
    }
  }

  ScalarExpr parse_unary() {
    if (eat('-')) return neg(parse_unary());
    if (eat('+')) return parse_unary();
    return parse_power();
  }

  ScalarExpr parse_power() {
    ScalarExpr base = parse_atom();
    if (eat('^')) {
      long n = parse_int();
      if (is_const(base)) {
        cd r{1.0, 0.0};
        for (long k = 0; k < std::labs(n); ++k) r *= base->value;
        return constant(n >= 0 ? r : 1.0 / r);
      }
      return pow_int(base, n);
    }
    return base;
  }

  long parse_int() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) fail("expected integer exponent");
    return std::stol(text.substr(start, pos - start));
  }

  double parse_signed_real() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    bool imag_suffix;
    double v = scan_number(imag_suffix);
    if (imag_suffix) fail("expected a real number");
    return text[start] == '-' ? -v : v;
  }

  // Scans digits [. digits] [exponent] [i]; pos must sit on a digit or '.'.
  double scan_number(bool& imag_suffix) {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos == start || (pos == start + 1 && text[start] == '.')) fail("expected a number");
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      std::size_t mark = pos++;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      std::size_t digits = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == digits) pos = mark;  // not an exponent after all
    }
    double v = std::stod(text.substr(start, pos - start));
    imag_suffix = false;
    if (pos < text.size() && text[pos] == 'i') {
      ++pos;
      imag_suffix = true;
      if (pos < text.size() && std::isalnum(static_cast<unsigned char>(text[pos])))
        fail("unexpected characters after imaginary literal");
    }
    return v;
  }

  ScalarExpr parse_atom() {
    char c = peek();
    if (c == '(') {
      ++pos;
      ScalarExpr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      bool imag;
      double v = scan_number(imag);
      return constant(imag ? cd(0.0, v) : cd(v, 0.0));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < text.size() && std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
      std::string name = text.substr(start, pos - start);
      if (name == "x" || name == "p") return symbol(name[0]);
      if (name == "i") return constant(cd(0.0, 1.0));
      if (name == "abs" || name == "exp") {
        expect('(');
        ScalarExpr arg = parse_expr();
        expect(')');
        return name == "abs" ? abs_of(arg) : exp_of(arg);
      }
      if (name == "ipow") {
        expect('(');
        ScalarExpr arg = parse_expr();
        expect(',');
        double nu = parse_signed_real();
        expect(')');
        return ipow(arg, nu);
      }
      pos = start;
      fail(fmt::format("unknown identifier '{}'", name));
    }
    fail(c == '\0' ? "unexpected end of input" : fmt::format("unexpected character '{}'", c));
  }
};

ScalarExpr parse_tree(const std::string& text) {
  Parser p{text};
  ScalarExpr e = p.parse_expr();
  if (p.peek() != '\0') p.fail("trailing characters after expression");
  return e;
}

}  // namespace

OperatorExpr parse_expression(const std::string& text) {
  ScalarExpr tree = parse_tree(text);
  try {
    return lower_to_operator(tree);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), text.size());
  }
}

ScalarExpr parse_scalar_expression(const std::string& text) {
  ScalarExpr tree = parse_tree(text);
  if (contains_symbol(tree, 'p'))
    throw ParseError("momentum symbol not allowed in a scalar expression", text.size());
  return tree;
}

ModelSpec paper_example(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  ModelSpec m;
  m.name = "paper-example";
  m.parameters["omega"] = omega;
  m.expr = omega == 1.0
               ? parse_expression("p^2 + (2i/x)*p - 2/x^2 + x^2")
               : parse_expression(fmt::format("p^2 + (2i/x)*p - 2/x^2 + {}*x^2", omega * omega));
  m.recommended_rep = make_grid(10.0, 400);
  m.transform_text = "1/x";
  m.weight_text = "1/x^2";
  m.oscillator_spectrum = true;
  m.omega = omega;
  m.eigenfunctions_x_times_ho = true;
  return m;
}

ModelSpec harmonic_oscillator(double omega) {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  ModelSpec m;
  m.name = "harmonic";
  m.parameters["omega"] = omega;
  m.expr = omega == 1.0 ? parse_expression("p^2 + x^2")
                        : parse_expression(fmt::format("p^2 + {}*x^2", omega * omega));
  m.recommended_rep = BasisSpec{100, omega};
  m.transform_text = "1";
  m.oscillator_spectrum = true;
  m.omega = omega;
  return m;
}

ModelSpec bender_family(double nu) {
  if (!(nu > -2.0)) throw std::invalid_argument("nu must exceed -2");
  ModelSpec m;
  m.name = "bender";
  m.parameters["nu"] = nu;
  m.expr = parse_expression(fmt::format("p^2 + ipow(x, {})*x^2", nu));
  m.recommended_rep = BasisSpec{200, 1.0};
  m.oscillator_spectrum = nu == 0.0;
  m.omega = 1.0;
  return m;
}

}  // namespace nhqm

#include "sntk/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "sntk/error.hpp"

namespace sntk {

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

enum class Tok { number, name, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::size_t pos;
  double number = 0.0;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string buf;
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) buf += s[i++];
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          buf.append(s.substr(i, j - i));
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) buf += s[i++];
        }
      }
      char* end = nullptr;
      const double v = std::strtod(buf.c_str(), &end);
      if (end != buf.c_str() + buf.size() || buf == ".") {
        throw ParseError("malformed number '" + buf + "'", start);
      }
      out.push_back({Tok::number, start, v, buf});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string buf;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) buf += s[i++];
      out.push_back({Tok::name, start, 0.0, buf});
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      case '^': k = Tok::caret; break;
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, start, 0.0, std::string(1, c)});
    ++i;
  }
  out.push_back({Tok::end, s.size(), 0.0, ""});
  return out;
}

bool lookup_function(const std::string& name, Expr::Function& f) {
  static const std::pair<const char*, Expr::Function> table[] = {
      {"exp", Expr::Function::exp},   {"log", Expr::Function::log},
      {"sqrt", Expr::Function::sqrt}, {"sin", Expr::Function::sin},
      {"cos", Expr::Function::cos},   {"tanh", Expr::Function::tanh},
      {"abs", Expr::Function::abs},
  };
  for (const auto& [n, fn] : table) {
    if (name == n) {
      f = fn;
      return true;
    }
  }
  return false;
}

bool has_identifier(const Node& n) {
  if (n.kind == Expr::Kind::identifier) return true;
  return (n.lhs && has_identifier(*n.lhs)) || (n.rhs && has_identifier(*n.rhs));
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const std::vector<std::string>& declared)
      : toks_(std::move(toks)), declared_(declared) {}

  NodePtr parse() {
    if (peek().kind == Tok::end) throw ParseError("empty expression", 0);
    NodePtr e = expr();
    if (peek().kind != Tok::end) {
      throw ParseError("unexpected token '" + peek().text + "'", peek().pos);
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  static NodePtr binary(Expr::Kind k, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      const Expr::Kind k = take().kind == Tok::plus ? Expr::Kind::add : Expr::Kind::sub;
      lhs = binary(k, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      const Expr::Kind k = take().kind == Tok::star ? Expr::Kind::mul : Expr::Kind::div;
      lhs = binary(k, lhs, unary());
    }
    return lhs;
  }

  NodePtr unary() {
    if (peek().kind == Tok::minus) {
      take();
      auto n = std::make_shared<Node>();
      n->kind = Expr::Kind::negate;
      n->lhs = unary();
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    while (peek().kind == Tok::caret) {
      take();
      const std::size_t at = peek().pos;
      NodePtr exponent;
      if (peek().kind == Tok::minus) {
        take();
        auto n = std::make_shared<Node>();
        n->kind = Expr::Kind::negate;
        n->lhs = primary();
        exponent = n;
      } else {
        exponent = primary();
      }
      if (has_identifier(*exponent)) throw ParseError("exponent must be a constant", at);
      base = binary(Expr::Kind::pow, base, exponent);
    }
    return base;
  }

  NodePtr primary() {
    const Token& t = take();
    switch (t.kind) {
      case Tok::number: {
        auto n = std::make_shared<Node>();
        n->kind = Expr::Kind::number;
        n->number = t.number;
        return n;
      }
      case Tok::lparen: {
        NodePtr e = expr();
        if (peek().kind != Tok::rparen) throw ParseError("expected ')'", peek().pos);
        take();
        return e;
      }
      case Tok::name: {
        if (peek().kind == Tok::lparen) {
          Expr::Function f;
          if (!lookup_function(t.text, f)) throw ParseError("unknown function '" + t.text + "'", t.pos);
          take();
          auto n = std::make_shared<Node>();
          n->kind = Expr::Kind::call;
          n->function = f;
          n->name = t.text;
          n->lhs = expr();
          if (peek().kind != Tok::rparen) throw ParseError("expected ')'", peek().pos);
          take();
          return n;
        }
        for (std::size_t s = 0; s < declared_.size(); ++s) {
          if (declared_[s] == t.text) {
            auto n = std::make_shared<Node>();
            n->kind = Expr::Kind::identifier;
            n->slot = s;
            n->name = t.text;
            return n;
          }
        }
        throw UndeclaredIdentifierError(t.text, t.pos);
      }
      case Tok::end: throw ParseError("unexpected end of expression", t.pos);
      default: throw ParseError("unexpected token '" + t.text + "'", t.pos);
    }
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& declared_;
  std::size_t pos_ = 0;
};

// Scalar and jet evaluation share one tree walk.

double apply(Expr::Function f, double x) {
  switch (f) {
    case Expr::Function::exp: return std::exp(x);
    case Expr::Function::log: return std::log(x);
    case Expr::Function::sqrt: return std::sqrt(x);
    case Expr::Function::sin: return std::sin(x);
    case Expr::Function::cos: return std::cos(x);
    case Expr::Function::tanh: return std::tanh(x);
    case Expr::Function::abs: return std::abs(x);
  }
  return std::nan("");
}

Jet2 apply(Expr::Function f, const Jet2& x) {
  switch (f) {
    case Expr::Function::exp: return exp(x);
    case Expr::Function::log: return log(x);
    case Expr::Function::sqrt: return sqrt(x);
    case Expr::Function::sin: return sin(x);
    case Expr::Function::cos: return cos(x);
    case Expr::Function::tanh: return tanh(x);
    case Expr::Function::abs: return abs(x);
  }
  throw std::logic_error("unknown function");
}

double eval_constant(const Node& n);

double raise(double base, const Node& exponent) { return std::pow(base, eval_constant(exponent)); }

Jet2 raise(const Jet2& base, const Node& exponent) { return pow(base, eval_constant(exponent)); }

template <class T>
T make_constant(double v, std::span<const T> slots);

template <>
double make_constant<double>(double v, std::span<const double>) {
  return v;
}

template <>
Jet2 make_constant<Jet2>(double v, std::span<const Jet2> slots) {
  return Jet2::constant(slots.empty() ? Jet2::kDefaultOrder : slots.front().order(), v);
}

template <class T>
T eval(const Node& n, std::span<const T> slots) {
  switch (n.kind) {
    case Expr::Kind::number: return make_constant<T>(n.number, slots);
    case Expr::Kind::identifier: return slots[n.slot];
    case Expr::Kind::negate: return -eval(*n.lhs, slots);
    case Expr::Kind::add: return eval(*n.lhs, slots) + eval(*n.rhs, slots);
    case Expr::Kind::sub: return eval(*n.lhs, slots) - eval(*n.rhs, slots);
    case Expr::Kind::mul: return eval(*n.lhs, slots) * eval(*n.rhs, slots);
    case Expr::Kind::div: return eval(*n.lhs, slots) / eval(*n.rhs, slots);
    case Expr::Kind::pow: return raise(eval(*n.lhs, slots), *n.rhs);
    case Expr::Kind::call: return apply(n.function, eval(*n.lhs, slots));
  }
  throw std::logic_error("unknown expression node");
}

double eval_constant(const Node& n) { return eval<double>(n, {}); }

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case Expr::Kind::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Expr::Kind::identifier: out += n.name; return;
    case Expr::Kind::negate:
      out += "(-";
      print(*n.lhs, out);
      out += ")";
      return;
    case Expr::Kind::call:
      out += n.name;
      out += "(";
      print(*n.lhs, out);
      out += ")";
      return;
    default: break;
  }
  const char* op = n.kind == Expr::Kind::add   ? " + "
                   : n.kind == Expr::Kind::sub ? " - "
                   : n.kind == Expr::Kind::mul ? " * "
                   : n.kind == Expr::Kind::div ? " / "
                                               : " ^ ";
  out += "(";
  print(*n.lhs, out);
  out += op;
  print(*n.rhs, out);
  out += ")";
}

bool equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::number: return a.number == b.number;
    case Expr::Kind::identifier: return a.name == b.name;
    case Expr::Kind::call:
      return a.function == b.function && equal(*a.lhs, *b.lhs);
    case Expr::Kind::negate: return equal(*a.lhs, *b.lhs);
    default: return equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
  }
}

}  // namespace

Expr Expr::parse(std::string_view text, std::vector<std::string> declared) {
  auto names = std::make_shared<const std::vector<std::string>>(std::move(declared));
  Parser p(tokenize(text), *names);
  NodePtr root = p.parse();
  return Expr(std::move(root), std::move(names));
}

double Expr::evaluate(std::span<const double> slots) const {
  if (slots.size() < declared_->size()) throw std::invalid_argument("too few slot values");
  return eval<double>(*root_, slots);
}

Jet2 Expr::evaluate(std::span<const Jet2> slots) const {
  if (slots.size() < declared_->size()) throw std::invalid_argument("too few slot values");
  for (const Jet2& j : slots) {
    if (j.order() != slots.front().order()) throw std::invalid_argument("bound jets differ in order");
  }
  return eval<Jet2>(*root_, slots);
}

double Expr::evaluate(const std::map<std::string, double>& bindings) const {
  std::vector<double> slots;
  slots.reserve(declared_->size());
  for (const std::string& name : *declared_) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw std::invalid_argument("unbound identifier '" + name + "'");
    slots.push_back(it->second);
  }
  return evaluate(std::span<const double>(slots));
}

Jet2 Expr::evaluate(const std::map<std::string, Jet2>& bindings) const {
  std::vector<Jet2> slots;
  slots.reserve(declared_->size());
  for (const std::string& name : *declared_) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw std::invalid_argument("unbound identifier '" + name + "'");
    slots.push_back(it->second);
  }
  return evaluate(std::span<const Jet2>(slots));
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) { return equal(*a.root_, *b.root_); }

}  // namespace sntk

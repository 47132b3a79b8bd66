#include "sntk/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "sntk/error.hpp"

namespace sntk {

namespace {

std::vector<std::string> slot_names(std::initializer_list<std::string> leading,
                                    const ConstantTable& constants) {
  std::vector<std::string> names(leading);
  for (const auto& [n, v] : constants) names.push_back(n);
  return names;
}

void check_unique(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw InputError("duplicate name '" + n + "' in model");
  }
}

void check_constants(const ConstantTable& constants) {
  for (const auto& [n, v] : constants) {
    if (!std::isfinite(v)) throw InputError("constant '" + n + "' is not finite");
  }
}

double lookup(const ConstantTable& constants, std::string_view name) {
  for (const auto& [n, v] : constants) {
    if (n == name) return v;
  }
  throw InputError("unknown constant '" + std::string(name) + "'");
}

ConstantTable replaced(ConstantTable constants, std::string_view name, double value) {
  for (auto& [n, v] : constants) {
    if (n == name) {
      v = value;
      return constants;
    }
  }
  throw InputError("unknown constant '" + std::string(name) + "'");
}

// Small fixed buffer so that hot scalar evaluation does not allocate.
template <class T, std::size_t N = 16>
class SlotBuffer {
 public:
  explicit SlotBuffer(std::size_t n) : n_(n) {
    if (n > N) heap_.resize(n);
  }
  T* data() { return n_ > N ? heap_.data() : stack_.data(); }
  std::span<const T> span() { return {data(), n_}; }

 private:
  std::size_t n_;
  std::array<T, N> stack_{};
  std::vector<T> heap_;
};

}  // namespace

DerivativeBundle DerivativeBundle::from_jet(const Jet2& jet) {
  if (jet.order() < 4) throw std::invalid_argument("derivative bundle needs a jet of order >= 4");
  DerivativeBundle b;
  b.f = jet.partial(0, 0);
  b.f_x = jet.partial(1, 0);
  b.f_mu = jet.partial(0, 1);
  b.f_xx = jet.partial(2, 0);
  b.f_xmu = jet.partial(1, 1);
  b.f_mumu = jet.partial(0, 2);
  b.f_xxx = jet.partial(3, 0);
  b.f_xxxx = jet.partial(4, 0);
  return b;
}

// ---------------------------------------------------------------------------

ScalarModel1P::ScalarModel1P(std::string name, std::string state, std::string param,
                             ConstantTable constants, std::string_view rhs)
    : name_(std::move(name)),
      state_(std::move(state)),
      param_(std::move(param)),
      constants_(std::move(constants)),
      rhs_([&] {
        auto names = slot_names({state_, param_}, constants_);
        check_unique(names);
        check_constants(constants_);
        return Expr::parse(rhs, std::move(names));
      }()) {}

double ScalarModel1P::constant(std::string_view name) const { return lookup(constants_, name); }

ScalarModel1P ScalarModel1P::with_constant(std::string_view name, double value) const {
  ScalarModel1P copy = *this;
  copy.constants_ = replaced(constants_, name, value);
  check_constants(copy.constants_);
  return copy;
}

double ScalarModel1P::operator()(double x, double mu) const {
  SlotBuffer<double> slots(2 + constants_.size());
  double* s = slots.data();
  s[0] = x;
  s[1] = mu;
  for (std::size_t i = 0; i < constants_.size(); ++i) s[2 + i] = constants_[i].second;
  return rhs_.evaluate(slots.span());
}

Jet2 ScalarModel1P::jet(double x, double mu, int order) const {
  std::vector<Jet2> slots;
  slots.reserve(2 + constants_.size());
  slots.push_back(Jet2::variable0(order, x));
  slots.push_back(Jet2::variable1(order, mu));
  for (const auto& [n, v] : constants_) slots.push_back(Jet2::constant(order, v));
  return rhs_.evaluate(std::span<const Jet2>(slots));
}

DerivativeBundle ScalarModel1P::derivative_bundle(double x, double mu) const {
  return DerivativeBundle::from_jet(jet(x, mu, 4));
}

// ---------------------------------------------------------------------------

double PlanarPoint::get(PlanarVar v) const noexcept {
  switch (v) {
    case PlanarVar::x: return x;
    case PlanarVar::y: return y;
    case PlanarVar::p: return p;
    case PlanarVar::m: return m;
  }
  return 0.0;
}

void PlanarPoint::set(PlanarVar v, double value) noexcept {
  switch (v) {
    case PlanarVar::x: x = value; break;
    case PlanarVar::y: y = value; break;
    case PlanarVar::p: p = value; break;
    case PlanarVar::m: m = value; break;
  }
}

PlanarModel2P::PlanarModel2P(std::string name, std::array<std::string, 2> states,
                             std::array<std::string, 2> params, ConstantTable constants,
                             std::string_view rhs_f, std::string_view rhs_g,
                             double secondary_default)
    : name_(std::move(name)),
      states_(std::move(states)),
      params_(std::move(params)),
      constants_(std::move(constants)),
      f_([&] {
        auto names = slot_names({states_[0], states_[1], params_[0], params_[1]}, constants_);
        check_unique(names);
        check_constants(constants_);
        return Expr::parse(rhs_f, std::move(names));
      }()),
      g_(Expr::parse(rhs_g, slot_names({states_[0], states_[1], params_[0], params_[1]}, constants_))),
      secondary_default_(secondary_default) {}

double PlanarModel2P::constant(std::string_view name) const { return lookup(constants_, name); }

PlanarModel2P PlanarModel2P::with_constant(std::string_view name, double value) const {
  PlanarModel2P copy = *this;
  copy.constants_ = replaced(constants_, name, value);
  check_constants(copy.constants_);
  return copy;
}

PlanarModel2P PlanarModel2P::with_secondary_default(double value) const {
  PlanarModel2P copy = *this;
  copy.secondary_default_ = value;
  return copy;
}

std::array<double, 2> PlanarModel2P::operator()(const PlanarPoint& at) const {
  SlotBuffer<double> slots(4 + constants_.size());
  double* s = slots.data();
  s[0] = at.x;
  s[1] = at.y;
  s[2] = at.p;
  s[3] = at.m;
  for (std::size_t i = 0; i < constants_.size(); ++i) s[4 + i] = constants_[i].second;
  return {f_.evaluate(slots.span()), g_.evaluate(slots.span())};
}

std::array<Jet2, 2> PlanarModel2P::jet(const PlanarPoint& at, PlanarVar first, PlanarVar second,
                                       int order) const {
  if (first == second) throw std::invalid_argument("jet variables must differ");
  std::vector<Jet2> slots;
  slots.reserve(4 + constants_.size());
  for (PlanarVar v : {PlanarVar::x, PlanarVar::y, PlanarVar::p, PlanarVar::m}) {
    if (v == first) {
      slots.push_back(Jet2::variable0(order, at.get(v)));
    } else if (v == second) {
      slots.push_back(Jet2::variable1(order, at.get(v)));
    } else {
      slots.push_back(Jet2::constant(order, at.get(v)));
    }
  }
  for (const auto& [n, v] : constants_) slots.push_back(Jet2::constant(order, v));
  return {f_.evaluate(std::span<const Jet2>(slots)), g_.evaluate(std::span<const Jet2>(slots))};
}

std::array<Jet2, 2> PlanarModel2P::compose(const std::array<Jet2, 4>& xypm) const {
  const int order = xypm[0].order();
  std::vector<Jet2> slots(xypm.begin(), xypm.end());
  for (const auto& [n, v] : constants_) slots.push_back(Jet2::constant(order, v));
  return {f_.evaluate(std::span<const Jet2>(slots)), g_.evaluate(std::span<const Jet2>(slots))};
}

std::array<double, 4> PlanarModel2P::jacobian(const PlanarPoint& at) const {
  const auto j = jet(at, PlanarVar::x, PlanarVar::y, 1);
  return {j[0].coeff(1, 0), j[0].coeff(0, 1), j[1].coeff(1, 0), j[1].coeff(0, 1)};
}

// ---------------------------------------------------------------------------
// Built-in models

FraedrichConstants fraedrich_constants(double I0, double sigma, double c, double e_sa, double a2,
                                       double b2) {
  const double radiative = e_sa * sigma;
  return {radiative / c, b2 * I0 / (4.0 * radiative), (a2 - 1.0) * I0 / (4.0 * radiative)};
}

namespace {

double take(std::map<std::string, double>& overrides, const std::string& key, double fallback) {
  auto it = overrides.find(key);
  if (it == overrides.end()) return fallback;
  const double v = it->second;
  overrides.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, double>& overrides, std::string_view model) {
  if (!overrides.empty()) {
    throw InputError("model '" + std::string(model) + "' has no constant '" +
                     overrides.begin()->first + "'");
  }
}

ScalarModel1P make_fraedrich(std::map<std::string, double> o) {
  // SI values; the ODE is used exactly as printed, without an extra 1/c factor.
  const double I0 = take(o, "I0", 1366.0);
  const double sigma = take(o, "sigma", 5.6704e-8);
  const double c = take(o, "c", 108.0);
  const double e_sa = take(o, "e_sa", 0.62);
  const double a2 = take(o, "a2", 1.6927);
  const double b2 = take(o, "b2", 1.690e-5);
  const FraedrichConstants k = fraedrich_constants(I0, sigma, c, e_sa, a2, b2);
  const double a = take(o, "a", k.a);
  const double b = take(o, "b", k.b);
  const double d = take(o, "d", k.d);
  reject_leftovers(o, "fraedrich");
  ScalarModel1P model("fraedrich", "T", "mu",
                      {{"I0", I0}, {"sigma", sigma}, {"c", c}, {"e_sa", e_sa}, {"a2", a2},
                       {"b2", b2}, {"a", a}, {"b", b}, {"d", d}},
                      "a*(-T^4 + b*mu*T^2 - d*mu)");
  if (b > 0.0 && d > 0.0) model.fold_guess = std::pair{1.01 * std::sqrt(2.0 * d / b), 1.0};
  return model;
}

ScalarModel1P make_stommel1d(std::map<std::string, double> o) {
  const double m = take(o, "m", 7.5);
  reject_leftovers(o, "stommel1d");
  ScalarModel1P model("stommel1d", "y", "p", {{"m", m}}, "p - y*(1+m*(1-y)^2)");
  if (m > 3.0) {
    // Upper fold of the leading-order locus.
    const double s = std::sqrt(1.0 - 3.0 / m);
    const double y = (2.0 + s) / 3.0;
    model.fold_guess = std::pair{y + 0.01, y * (1.0 + m * (1.0 - y) * (1.0 - y)) + 0.01};
  }
  return model;
}

ScalarModel1P make_normalform(std::map<std::string, double> o) {
  const double a = take(o, "a", 0.0);
  reject_leftovers(o, "normalform");
  ScalarModel1P model("normalform", "y", "nu", {{"a", a}}, "nu - y^2 + a*y^3");
  model.fold_guess = std::pair{0.05, 0.01};
  return model;
}

PlanarModel2P make_stommel2d(std::map<std::string, double> o) {
  const double alpha = take(o, "alpha", 3600.0);
  const double m = take(o, "m", 7.5);
  reject_leftovers(o, "stommel2d");
  PlanarModel2P model("stommel2d", {"x", "y"}, {"p", "m"}, {{"alpha", alpha}},
                      "-alpha*(x-1) - x*(1+m*(x-y)^2)", "p - y*(1+m*(x-y)^2)", m);
  if (m > 3.0) {
    const double s = std::sqrt(1.0 - 3.0 / m);
    const double y = (2.0 + s) / 3.0;
    model.fold_guess = PlanarPoint{1.0, y, y * (1.0 + m * (1.0 - y) * (1.0 - y)), m};
  }
  return model;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"fraedrich", "stommel1d", "stommel2d",
                                                 "normalform"};
  return names;
}

Model builtin(std::string_view name, const std::map<std::string, double>& overrides) {
  if (name == "fraedrich") return make_fraedrich(overrides);
  if (name == "stommel1d") return make_stommel1d(overrides);
  if (name == "stommel2d") return make_stommel2d(overrides);
  if (name == "normalform") return make_normalform(overrides);
  throw InputError("unknown built-in model '" + std::string(name) + "'");
}

ScalarModel1P builtin_scalar(std::string_view name, const std::map<std::string, double>& overrides) {
  Model m = builtin(name, overrides);
  if (auto* s = std::get_if<ScalarModel1P>(&m)) return *s;
  throw InputError("built-in model '" + std::string(name) + "' is not scalar");
}

PlanarModel2P builtin_planar(std::string_view name, const std::map<std::string, double>& overrides) {
  Model m = builtin(name, overrides);
  if (auto* p = std::get_if<PlanarModel2P>(&m)) return *p;
  throw InputError("built-in model '" + std::string(name) + "' is not planar");
}

// ---------------------------------------------------------------------------
// Model files

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<std::string> split_items(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "name=value" items; spaces around '=' are allowed.
std::vector<std::pair<std::string, std::optional<double>>> parse_assignments(const std::string& s,
                                                                            std::size_t line) {
  std::string compact;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      // Drop whitespace adjacent to '='.
      std::size_t j = i;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      const bool next_eq = j < s.size() && s[j] == '=';
      const bool prev_eq = !compact.empty() && compact.back() == '=';
      if (next_eq || prev_eq) {
        i = j - 1;
        continue;
      }
    }
    compact += s[i];
  }
  std::vector<std::pair<std::string, std::optional<double>>> out;
  for (const std::string& item : split_items(compact)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!is_identifier(item)) throw ModelError("invalid name '" + item + "'", line);
      out.emplace_back(item, std::nullopt);
      continue;
    }
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (!is_identifier(key)) throw ModelError("invalid name '" + key + "'", line);
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (val.empty() || end != val.c_str() + val.size() || !std::isfinite(v)) {
      throw ModelError("invalid numeric value '" + val + "' for '" + key + "'", line);
    }
    out.emplace_back(key, v);
  }
  return out;
}

struct Equation {
  std::string text;
  std::size_t line;
};

}  // namespace

Model load_model(std::string_view text) {
  std::string name = "model";
  std::vector<std::string> states;
  std::size_t states_line = 0;
  std::vector<std::pair<std::string, std::optional<double>>> params;
  std::size_t params_line = 0;
  ConstantTable constants;
  std::map<std::string, Equation> equations;
  std::map<std::string, double> guess;
  std::size_t guess_line = 0;
  std::set<std::string> declared;

  auto declare = [&](const std::string& n, std::size_t line) {
    if (!declared.insert(n).second) throw ModelError("duplicate name '" + n + "'", line);
  };

  bool in_consts = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    auto keyword = [&](std::string_view kw) -> std::optional<std::string> {
      if (line.size() > kw.size() && line.compare(0, kw.size(), kw) == 0 && line[kw.size()] == ':') {
        return trim(std::string_view(line).substr(kw.size() + 1));
      }
      return std::nullopt;
    };

    if (line.rfind("eq ", 0) == 0 || line.rfind("eq\t", 0) == 0) {
      in_consts = false;
      const std::string rest = trim(std::string_view(line).substr(3));
      const auto eq = rest.find('=');
      if (eq == std::string::npos) throw ModelError("equation needs '<state> = <expression>'", line_no);
      const std::string lhs = trim(std::string_view(rest).substr(0, eq));
      const std::string rhs = trim(std::string_view(rest).substr(eq + 1));
      if (!is_identifier(lhs)) throw ModelError("invalid equation target '" + lhs + "'", line_no);
      if (rhs.empty()) throw ModelError("empty right-hand side for '" + lhs + "'", line_no);
      if (equations.count(lhs)) throw ModelError("second equation for '" + lhs + "'", line_no);
      equations[lhs] = {rhs, line_no};
    } else if (auto v = keyword("name")) {
      in_consts = false;
      if (v->empty()) throw ModelError("empty model name", line_no);
      name = *v;
    } else if (auto v = keyword("states")) {
      in_consts = false;
      if (!states.empty()) throw ModelError("states declared twice", line_no);
      states = split_items(*v);
      states_line = line_no;
      if (states.empty()) throw ModelError("empty states declaration", line_no);
      for (const auto& s : states) {
        if (!is_identifier(s)) throw ModelError("invalid state name '" + s + "'", line_no);
        declare(s, line_no);
      }
    } else if (auto v = keyword("params")) {
      in_consts = false;
      if (!params.empty()) throw ModelError("params declared twice", line_no);
      params = parse_assignments(*v, line_no);
      params_line = line_no;
      for (const auto& [p, d] : params) declare(p, line_no);
    } else if (auto v = keyword("consts")) {
      in_consts = true;
      for (const auto& [c, val] : parse_assignments(*v, line_no)) {
        if (!val) throw ModelError("constant '" + c + "' needs a value", line_no);
        declare(c, line_no);
        constants.emplace_back(c, *val);
      }
    } else if (auto v = keyword("guess")) {
      in_consts = false;
      guess_line = line_no;
      for (const auto& [g, val] : parse_assignments(*v, line_no)) {
        if (!val) throw ModelError("guess for '" + g + "' needs a value", line_no);
        guess[g] = *val;
      }
    } else if (in_consts && line.find('=') != std::string::npos) {
      for (const auto& [c, val] : parse_assignments(line, line_no)) {
        if (!val) throw ModelError("constant '" + c + "' needs a value", line_no);
        declare(c, line_no);
        constants.emplace_back(c, *val);
      }
    } else {
      throw ModelError("unrecognised line '" + line + "'", line_no);
    }
  }

  if (states.empty()) throw ModelError("missing states declaration", 0);
  if (states.size() > 2) throw ModelError("at most two states are supported", states_line);
  if (params.size() != states.size()) {
    throw ModelError(std::to_string(states.size()) + " state(s) need exactly " +
                         std::to_string(states.size()) + " parameter(s)",
                     params_line ? params_line : states_line);
  }
  for (const auto& [lhs, eq] : equations) {
    if (std::find(states.begin(), states.end(), lhs) == states.end()) {
      throw ModelError("equation for undeclared state '" + lhs + "'", eq.line);
    }
  }
  for (const auto& s : states) {
    if (!equations.count(s)) throw ModelError("missing equation for state '" + s + "'", states_line);
  }
  for (const auto& [g, v] : guess) {
    if (!declared.count(g) || std::any_of(constants.begin(), constants.end(),
                                          [&](const auto& c) { return c.first == g; })) {
      throw ModelError("guess names unknown state or parameter '" + g + "'", guess_line);
    }
  }

  auto rethrow_at = [](const Equation& eq, auto&& build) {
    try {
      return build();
    } catch (const ParseError& e) {
      throw ModelError(e.what(), eq.line);
    }
  };

  if (states.size() == 1) {
    const Equation& eq = equations.at(states[0]);
    if (params[0].second) throw ModelError("scalar model parameters take no default", params_line);
    ScalarModel1P model = rethrow_at(eq, [&] {
      return ScalarModel1P(name, states[0], params[0].first, constants, eq.text);
    });
    if (guess.count(states[0]) && guess.count(params[0].first)) {
      model.fold_guess = std::pair{guess[states[0]], guess[params[0].first]};
    }
    return model;
  }

  const Equation& ef = equations.at(states[0]);
  const Equation& eg = equations.at(states[1]);
  const double secondary = params[1].second.value_or(0.0);
  auto build = [&] {
    return PlanarModel2P(name, {states[0], states[1]}, {params[0].first, params[1].first},
                         constants, ef.text, eg.text, secondary);
  };
  // Parse each equation on its own first to attribute errors to the right line.
  {
    std::vector<std::string> names = {states[0], states[1], params[0].first, params[1].first};
    for (const auto& [c, v] : constants) names.push_back(c);
    rethrow_at(ef, [&] { return Expr::parse(ef.text, names); });
    rethrow_at(eg, [&] { return Expr::parse(eg.text, names); });
  }
  PlanarModel2P model = build();
  if (guess.count(states[0]) && guess.count(states[1]) && guess.count(params[0].first)) {
    model.fold_guess = PlanarPoint{guess[states[0]], guess[states[1]], guess[params[0].first],
                                   secondary};
  }
  return model;
}

}  // namespace sntk

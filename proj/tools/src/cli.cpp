#include "sntk_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "emit.hpp"
#include "sntk/centre_manifold.hpp"
#include "sntk/conjugacy.hpp"
#include "sntk/continuation.hpp"
#include "sntk/error.hpp"
#include "sntk/formal_nf.hpp"
#include "sntk/nf_match.hpp"
#include "sntk/saddle_node.hpp"

namespace sntk::cli {

namespace {

using nlohmann::ordered_json;

// Raised for bad flag values found after CLI11 has parsed the line.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
  if (used != s.size()) throw UsageError("bad number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (const std::string& p : split(s, ',')) v.push_back(parse_number(p, what));
  if (v.empty()) throw UsageError(what + " is empty");
  return v;
}

struct RangeSpec {
  double a = 0.0;
  double b = 0.0;
  int n = 0;  // 0 when only a:b was given
};

RangeSpec parse_range(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() != 2 && parts.size() != 3) throw UsageError(what + " must be a:b or a:b:n");
  RangeSpec r{parse_number(parts[0], what), parse_number(parts[1], what), 0};
  if (parts.size() == 3) {
    const double n = parse_number(parts[2], what);
    if (n < 1 || n != std::floor(n) || n > 1e6) throw UsageError(what + ": n must be a positive integer");
    r.n = static_cast<int>(n);
  }
  return r;
}

std::vector<double> sample(const RangeSpec& r, bool geometric) {
  std::vector<double> v;
  const int n = std::max(1, r.n);
  if (geometric && (r.a <= 0.0 || r.b <= 0.0)) throw UsageError("--log needs a positive range");
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    v.push_back(geometric ? r.a * std::pow(r.b / r.a, t) : r.a + t * (r.b - r.a));
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read model file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Common {
  std::string model;
  std::vector<std::string> consts;
  std::string out;
  std::string format;
  double tol = 0.0;
  int jobs = 1;
};

Model resolve_model(const Common& c) {
  if (c.model.empty()) throw UsageError("--model is required");
  std::vector<std::pair<std::string, double>> kv;
  for (const std::string& s : c.consts) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--const expects name=value, got '" + s + "'");
    kv.emplace_back(s.substr(0, eq), parse_number(s.substr(eq + 1), "--const " + s.substr(0, eq)));
  }
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), c.model) != names.end()) {
    std::map<std::string, double> overrides(kv.begin(), kv.end());
    return builtin(c.model, overrides);
  }
  if (c.model.find_first_of("/\\.") == std::string::npos && !std::ifstream(c.model)) {
    std::string list;
    for (const std::string& n : names) list += (list.empty() ? "" : ", ") + n;
    throw InputError("unknown model '" + c.model + "' (built-ins: " + list + "; or give a file path)");
  }
  Model m = load_model(read_file(c.model));
  for (const auto& [k, v] : kv) {
    if (auto* s = std::get_if<ScalarModel1P>(&m)) {
      *s = s->with_constant(k, v);
    } else {
      auto& p = std::get<PlanarModel2P>(m);
      p = k == p.param_names()[1] ? p.with_secondary_default(v) : p.with_constant(k, v);
    }
  }
  return m;
}

ScalarModel1P scalar_of(const Model& m, const char* command) {
  if (const auto* s = std::get_if<ScalarModel1P>(&m)) return *s;
  throw UsageError(std::string(command) + " needs a scalar model; use cm or continue for planar models");
}

PlanarModel2P planar_of(const Model& m, const char* command) {
  if (const auto* p = std::get_if<PlanarModel2P>(&m)) return *p;
  throw UsageError(std::string(command) + " needs a planar model");
}

void check_format(const Common& c, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (c.format == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
  throw UsageError("--format " + c.format + " not supported here (" + list + ")");
}

// Writes to --out when given, else to the stream passed to run().
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round9(v);
}

ordered_json nums(const double* v, std::size_t n) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back(num(v[i]));
  return a;
}

void emit_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct FoldGuess {
  std::optional<double> x0;
  std::optional<double> mu0;
};

SaddleNodePoint locate(const ScalarModel1P& s, const FoldGuess& g) {
  double x = 0.0, mu = 0.0;
  if (s.fold_guess) std::tie(x, mu) = *s.fold_guess;
  if (!s.fold_guess && !(g.x0 && g.mu0)) {
    throw UsageError("model '" + s.name() + "' has no fold guess; pass --x0 and --mu0");
  }
  if (g.x0) x = *g.x0;
  if (g.mu0) mu = *g.mu0;
  return locate_saddle_node(s, x, mu);
}

ordered_json constants_json(const ConstantTable& t) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : t) j[k] = num(v);
  return j;
}

int cmd_analyze(const Common& c, const FoldGuess& g, std::ostream& out) {
  check_format(c, {"json"});
  const ScalarModel1P s = scalar_of(resolve_model(c), "analyze");
  const SaddleNodePoint sn = locate(s, g);
  const DerivativeBundle& b = sn.bundle;
  ordered_json j;
  j["model"] = s.name();
  j["state"] = s.state_name();
  j["parameter"] = s.param_name();
  j["constants"] = constants_json(s.constants());
  j["x"] = num(sn.x);
  j["mu"] = num(sn.mu);
  j["generic"] = sn.generic;
  j["cusp_suspect"] = sn.cusp_suspect;
  j["p0sq"] = num(sn.p0sq);
  j["p0"] = num(std::sqrt(sn.p0sq));
  j["a0"] = num(sn.a0);
  j["sign_fmu"] = sn.sign_fmu;
  j["sign_fxx"] = sn.sign_fxx;
  j["iterations"] = sn.iterations;
  j["derivatives"] = {{"f", num(b.f)},         {"f_x", num(b.f_x)},       {"f_mu", num(b.f_mu)},
                      {"f_xx", num(b.f_xx)},   {"f_xmu", num(b.f_xmu)},   {"f_mumu", num(b.f_mumu)},
                      {"f_xxx", num(b.f_xxx)}, {"f_xxxx", num(b.f_xxxx)}};
  Sink sink(c.out, out);
  emit_json(*sink, j);
  return kOk;
}

int cmd_reduce(const Common& c, const std::string& coeffs, std::optional<int> order, const FoldGuess& g,
               std::ostream& out) {
  check_format(c, {"json"});
  std::vector<double> input;
  std::string source;
  if (!coeffs.empty()) {
    if (!c.model.empty()) throw UsageError("give either --coeffs or --model, not both");
    input = parse_list(coeffs, "--coeffs");
    source = "coefficients";
  } else {
    const ScalarModel1P s = scalar_of(resolve_model(c), "reduce");
    const SaddleNodePoint sn = locate(s, g);
    input = PolySeries::at_fold(s, sn.x, sn.mu, order.value_or(8)).coefficients();
    source = s.name();
  }
  const int given = static_cast<int>(input.size()) + 1;
  const int K = order.value_or(std::max(given, 3));
  if (K < 3) throw UsageError("--order must be at least 3");
  if (K < given) throw UsageError("--order is below the highest given coefficient order");
  if (K > kMaxReductionOrder) throw UsageError("--order exceeds " + std::to_string(kMaxReductionOrder));
  input.resize(static_cast<std::size_t>(K - 1), 0.0);
  const auto [red, log] = reduce_to_takens(PolySeries(input));
  ordered_json j;
  j["source"] = source;
  j["order"] = K;
  j["input"] = nums(input.data(), input.size());
  j["alpha"] = num(log.alpha);
  j["a"] = num(log.a);
  const std::vector<double> rc = red.coefficients();
  j["coefficients"] = nums(rc.data(), rc.size());
  ordered_json steps = ordered_json::array();
  for (const NormalFormStep& s : log.removals) {
    steps.push_back({{"power", s.power}, {"beta", num(s.coefficient)}});
  }
  j["removals"] = steps;
  Sink sink(c.out, out);
  emit_json(*sink, j);
  return kOk;
}

int cmd_match(const Common& c, const std::string& range, bool geometric, const FoldGuess& g,
              std::ostream& out, std::ostream& err) {
  check_format(c, {"csv"});
  const ScalarModel1P s = scalar_of(resolve_model(c), "match");
  const RangeSpec r = parse_range(range, "--range");
  const std::vector<double> mus = sample(r, geometric);
  for (double mu : mus) {
    if (!(mu > 0.0)) throw UsageError("--range must lie on the two-equilibria side (mu > 0)");
  }
  const SaddleNodePoint sn = locate(s, g);
  const NormalFormCurve curve = match_curve(s, sn, mus, c.jobs);
  Sink sink(c.out, out);
  csv_row(*sink, std::vector<std::string>{"mu", "nu", "a", "nu_over_mu", "residual1", "residual2",
                                          "iterations"});
  int bad = 0;
  for (const MatchedParams& m : curve.samples) {
    csv_row(*sink, std::vector<double>{m.mu, m.nu, m.a, m.nu / m.mu, m.residual1, m.residual2,
                                       static_cast<double>(m.iterations)});
    if (!(std::abs(m.residual1) < c.tol && std::abs(m.residual2) < c.tol)) ++bad;
  }
  err << "fold at " << s.state_name() << " = " << fmt(sn.x) << ", " << s.param_name() << " = "
      << fmt(sn.mu) << "; p0sq = " << fmt(curve.p0sq) << ", a0 = " << fmt(curve.a0) << '\n';
  if (bad > 0) {
    err << bad << " matched point(s) with residuals above " << fmt(c.tol) << '\n';
    return kNumerical;
  }
  return kOk;
}

int cmd_conjugacy(const Common& c, double mu, ConjugacyOptions opts, const FoldGuess& g,
                  std::ostream& out) {
  check_format(c, {"json", "csv"});
  const ScalarModel1P s = scalar_of(resolve_model(c), "conjugacy");
  const SaddleNodePoint sn = locate(s, g);
  opts.jobs = c.jobs;
  const NormalFormConjugacy nc = conjugate_to_normal_form(s, sn, mu, opts);
  Sink sink(c.out, out);
  if (c.format == "csv") {
    csv_row(*sink, std::vector<std::string>{"piece", "x", "h", "dh", "defect"});
    for (std::size_t k = 0; k < nc.samples.size(); ++k) {
      const ConjugacySample& smp = nc.samples[k];
      for (std::size_t i = 0; i < smp.x.size(); ++i) {
        csv_row(*sink, std::vector<double>{static_cast<double>(k), smp.x[i], smp.h[i], smp.dh[i], smp.defect[i]});
      }
    }
    return kOk;
  }
  ordered_json j;
  j["model"] = s.name();
  j["mu"] = num(mu);
  j["parameter_value"] = num(nc.pair.mu);
  j["nu"] = num(nc.pair.nu);
  j["a"] = num(nc.pair.g.constant("a"));
  j["regime"] = mu > 0.0 ? "basins" : "flow-box";
  j["tol"] = num(c.tol);
  bool pass = true;
  ordered_json pieces = ordered_json::array();
  for (const ConjugacySample& smp : nc.samples) {
    pass = pass && smp.stats.q90 < c.tol;
    pieces.push_back({{"interval", {num(smp.interval.first), num(smp.interval.second)}},
                      {"anchor", {num(smp.anchor.first), num(smp.anchor.second)}},
                      {"points", smp.x.size()},
                      {"max", num(smp.stats.max)},
                      {"rms", num(smp.stats.rms)},
                      {"q90", num(smp.stats.q90)},
                      {"flow_commutation", num(smp.stats.flow_commutation)},
                      {"probe_time", num(smp.stats.probe_time)}});
  }
  j["pass"] = pass;
  j["pieces"] = pieces;
  emit_json(*sink, j);
  return kOk;
}

PlanarPoint planar_start(const PlanarModel2P& p, double m, const std::string& branch,
                         const std::string& guess) {
  if (!guess.empty()) {
    const auto v = parse_list(guess, "--guess");
    if (v.size() != 3) throw UsageError("--guess expects x,y,p");
    return polish_fold_point(p, {v[0], v[1], v[2], m});
  }
  if (!branch.empty()) {
    const BranchPoint bp = seed_stommel_fold(p, m, branch == "minus" ? FoldBranch::minus : FoldBranch::plus);
    return {bp.x, bp.y, bp.p, bp.m};
  }
  if (!p.fold_guess) throw UsageError("model '" + p.name() + "' has no fold guess; pass --guess x,y,p");
  PlanarPoint at = *p.fold_guess;
  at.m = m;
  return polish_fold_point(p, at);
}

int cmd_cm(const Common& c, std::optional<double> m_opt, const std::string& branch, const std::string& guess,
           std::ostream& out) {
  check_format(c, {"json"});
  const PlanarModel2P p = planar_of(resolve_model(c), "cm");
  const double m = m_opt.value_or(p.secondary_default());
  const PlanarPoint at = planar_start(p, m, branch, guess);
  const JordanizedSystem J = jordanize(p, at);
  const CmReduction r = cm_reduce(J);
  ordered_json j;
  j["model"] = p.name();
  j["base"] = {{p.state_names()[0], num(at.x)},
               {p.state_names()[1], num(at.y)},
               {p.param_names()[0], num(at.p)},
               {p.param_names()[1], num(at.m)}};
  j["lambda"] = num(J.lambda);
  j["small_eigenvalue"] = num(J.small_eigenvalue);
  j["basis"] = nums(J.basis.data(), 4);
  j["inverse"] = nums(J.inverse.data(), 4);
  j["b"] = nums(J.b.data(), 8);
  j["c"] = nums(J.c.data() + 1, 7);
  j["d1"] = num(r.d1);
  j["reduced"] = {{"b0", num(r.b0)}, {"b1", num(r.b1)}, {"b4", num(r.b4)}, {"b6", num(r.b6)},
                  {"cubic", num(r.cubic)}};
  j["p0sq"] = num(r.p0sq);
  j["a0"] = num(r.a0);
  Sink sink(c.out, out);
  emit_json(*sink, j);
  return kOk;
}

struct ContinueArgs {
  std::string range;
  std::string branch = "both";
  std::string guess;
  std::string vary;
  FoldGuess fold;
  ContinuationOptions opts;
};

int cmd_continue(const Common& c, ContinueArgs a, std::ostream& out, std::ostream& err) {
  check_format(c, {"csv", "svg"});
  const Model model = resolve_model(c);
  std::vector<std::pair<std::string, Branch>> branches;

  if (const auto* s = std::get_if<ScalarModel1P>(&model)) {
    if (a.vary.empty()) throw UsageError("continue on a scalar model needs --vary <constant>");
    if (a.range.empty()) throw UsageError("continue on a scalar model needs --range a:b:n");
    const RangeSpec r = parse_range(a.range, "--range");
    if (r.n < 2) throw UsageError("--range needs n >= 2 for a scalar branch");
    const ScalarModel1P start = s->with_constant(a.vary, r.a);
    const SaddleNodePoint sn = locate(start, a.fold);
    branches.emplace_back(s->name(), scalar_fold_branch(*s, a.vary, sample(r, false), sn.x, sn.mu));
  } else {
    const PlanarModel2P& p = std::get<PlanarModel2P>(model);
    if (!a.range.empty()) {
      const RangeSpec r = parse_range(a.range, "--range");
      a.opts.m_min = std::min(r.a, r.b);
      a.opts.m_max = std::max(r.a, r.b);
    }
    if (!(a.opts.m_min < a.opts.m_max)) throw UsageError("empty continuation range");
    std::vector<std::string> which;
    if (!a.guess.empty()) {
      which = {"guess"};
    } else if (a.branch == "both") {
      which = {"plus", "minus"};
    } else {
      which = {a.branch};
    }
    // Seeds at m_min; when no fold exists there (past the cusp), seeds at m_max and runs downwards.
    auto one = [&](const std::string& w) {
      const std::string seed = w == "guess" ? "" : w;
      try {
        const PlanarPoint at = planar_start(p, a.opts.m_min, seed, a.guess);
        return continue_branch(p, make_branch_point(p, at), a.opts);
      } catch (const NumericalError&) {
        if (!a.guess.empty()) throw;
      }
      ContinuationOptions down = a.opts;
      down.direction = -1;
      const PlanarPoint at = planar_start(p, a.opts.m_max, seed, "");
      return continue_branch(p, make_branch_point(p, at), down);
    };
    if (c.jobs > 1 && which.size() > 1) {
      std::vector<std::future<Branch>> fut;
      for (const std::string& w : which) fut.push_back(std::async(std::launch::async, one, w));
      for (std::size_t i = 0; i < which.size(); ++i) branches.emplace_back(which[i], fut[i].get());
    } else {
      for (const std::string& w : which) branches.emplace_back(w, one(w));
    }
  }

  Sink sink(c.out, out);
  bool failed = false;
  for (const auto& [name, b] : branches) {
    err << "branch " << name << ": " << to_string(b.termination) << ", " << b.points.size() << " points";
    if (!b.message.empty()) err << " (" << b.message << ")";
    err << '\n';
    failed = failed || b.termination == Termination::step_failure;
  }
  if (c.format == "csv") {
    csv_row(*sink, std::vector<std::string>{"branch", "m", "p", "x", "y", "lambda", "p0sq", "a0", "inv_a0"});
    for (const auto& [name, b] : branches) {
      for (const BranchPoint& pt : b.points) {
        csv_row(*sink, std::vector<std::string>{name, fmt(pt.m), fmt(pt.p), fmt(pt.x), fmt(pt.y), fmt(pt.lambda),
                                                fmt(pt.p0sq), fmt(pt.a0), fmt(1.0 / pt.a0)});
      }
    }
  } else {
    static const char* colours[] = {"#1f4e9c", "#c0392b", "#27823b"};
    std::vector<Panel> panels = {{"fold parameter", "m", "p", {}},
                                 {"p0^2", "m", "p0^2", {}},
                                 {"1/a0", "m", "1/a0", {}}};
    for (std::size_t k = 0; k < branches.size(); ++k) {
      const auto& [name, b] = branches[k];
      Series sp{name, {}, {}, colours[k % 3], false}, sq = sp, sa = sp;
      for (const BranchPoint& pt : b.points) {
        sp.x.push_back(pt.m);
        sp.y.push_back(pt.p);
        sq.x.push_back(pt.m);
        sq.y.push_back(pt.p0sq);
        sa.x.push_back(pt.m);
        sa.y.push_back(1.0 / pt.a0);
      }
      panels[0].series.push_back(sp);
      panels[1].series.push_back(sq);
      panels[2].series.push_back(sa);
    }
    write_svg(*sink, panels);
  }
  return failed ? kNumerical : kOk;
}

int cmd_bifdiag(const Common& c, const std::string& range, const std::string& xrange, int samples,
                std::ostream& out) {
  check_format(c, {"csv", "svg"});
  const ScalarModel1P s = scalar_of(resolve_model(c), "bifdiag");
  const RangeSpec r = parse_range(range, "--range");
  const RangeSpec xr = parse_range(xrange, "--xrange");
  if (!(xr.a < xr.b)) throw UsageError("--xrange must be increasing");
  struct Row {
    double mu, x, multiplier;
  };
  std::vector<Row> rows;
  for (double mu : sample({r.a, r.b, r.n == 0 ? 201 : r.n}, false)) {
    for (const StationaryPoint& e : find_all_stationary(s, mu, xr.a, xr.b, samples)) {
      rows.push_back({mu, e.x, e.multiplier});
    }
  }
  Sink sink(c.out, out);
  if (c.format == "csv") {
    csv_row(*sink, std::vector<std::string>{"mu", "x", "multiplier", "stable"});
    for (const Row& row : rows) {
      csv_row(*sink, std::vector<std::string>{fmt(row.mu), fmt(row.x), fmt(row.multiplier),
                                              row.multiplier < 0.0 ? "1" : "0"});
    }
    return kOk;
  }
  Series stable{"stable", {}, {}, "#1f4e9c", true}, unstable{"unstable", {}, {}, "#c0392b", true};
  for (const Row& row : rows) {
    Series& t = row.multiplier < 0.0 ? stable : unstable;
    t.x.push_back(row.mu);
    t.y.push_back(row.x);
  }
  write_svg(*sink, {{"equilibria of " + s.name(), s.param_name(), s.state_name(), {stable, unstable}}});
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool model_required, const std::string& format, double tol) {
  c.format = format;
  c.tol = tol;
  auto* m = sub->add_option("--model", c.model, "built-in name or model file");
  if (model_required) m->required();
  sub->add_option("--const", c.consts, "override a constant, name=value (repeatable)");
  sub->add_option("--out", c.out, "write the result here instead of stdout");
  sub->add_option("--format", c.format, "csv, json or svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}))
      ->capture_default_str();
  sub->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
}

void add_guess(CLI::App* sub, FoldGuess& g) {
  sub->add_option("--x0", g.x0, "starting state for the fold search");
  sub->add_option("--mu0", g.mu0, "starting parameter for the fold search");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sntk: saddle-node bifurcation toolkit", "sntk"};
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  Common c_an, c_red, c_match, c_conj, c_cm, c_cont, c_bif;
  FoldGuess g_an, g_red, g_match, g_conj;

  auto* analyze = app.add_subcommand("analyze", "locate a saddle-node and print its numbers (JSON)");
  add_common(analyze, c_an, true, "json", 1e-10);
  add_guess(analyze, g_an);

  auto* reduce = app.add_subcommand("reduce", "reduce a series -y^2 + ... to Takens form (JSON)");
  std::string coeffs;
  std::optional<int> order;
  add_common(reduce, c_red, false, "json", 1e-10);
  add_guess(reduce, g_red);
  reduce->add_option("--coeffs", coeffs, "c2,c3,...,cK");
  reduce->add_option("--order", order, "truncation order K");

  auto* match = app.add_subcommand("match", "multiplier matching nu(mu), a(mu) (CSV)");
  std::string match_range = "1e-4:1e-2:9";
  bool geometric = false;
  add_common(match, c_match, true, "csv", kMatchTol);
  add_guess(match, g_match);
  match->add_option("--range", match_range, "fold-local mu values a:b:n")->capture_default_str();
  match->add_flag("--log", geometric, "geometric spacing");

  auto* conj = app.add_subcommand("conjugacy", "conjugacy to the matched normal form (defect report)");
  double conj_mu = 0.01;
  ConjugacyOptions copts;
  add_common(conj, c_conj, true, "json", 1e-6);
  add_guess(conj, g_conj);
  conj->add_option("--mu", conj_mu, "fold-local parameter")->capture_default_str();
  conj->add_option("--points", copts.points, "grid points per piece")->check(CLI::Range(3, 100000))->capture_default_str();
  conj->add_option("--order", copts.order, "Taylor order of the local patch")->check(CLI::Range(1, 8))->capture_default_str();
  conj->add_option("--collar", copts.collar, "excluded margin at basin ends")->check(CLI::NonNegativeNumber)->capture_default_str();

  auto* cm = app.add_subcommand("cm", "centre-manifold reduction of a planar fold (JSON)");
  std::optional<double> cm_m;
  std::string cm_branch, cm_guess;
  add_common(cm, c_cm, true, "json", 1e-10);
  cm->add_option("--m", cm_m, "secondary parameter value");
  cm->add_option("--branch", cm_branch, "seed from the large-alpha fold: plus or minus")
      ->check(CLI::IsMember({"plus", "minus"}));
  cm->add_option("--guess", cm_guess, "starting point x,y,p");

  auto* cont = app.add_subcommand("continue", "fold branch continuation (CSV or SVG)");
  ContinueArgs ca;
  add_common(cont, c_cont, true, "csv", 1e-10);
  cont->add_option("--range", ca.range, "m_min:m_max (planar) or a:b:n (scalar, with --vary)");
  cont->add_option("--branch", ca.branch, "plus, minus or both")
      ->check(CLI::IsMember({"plus", "minus", "both"}))
      ->capture_default_str();
  cont->add_option("--guess", ca.guess, "planar starting point x,y,p at m_min");
  cont->add_option("--vary", ca.vary, "constant varied along a scalar branch");
  cont->add_option("--step-max", ca.opts.step_max, "largest arclength step")->check(CLI::PositiveNumber)->capture_default_str();
  cont->add_option("--max-points", ca.opts.max_points, "point budget")->check(CLI::Range(2, 10000000))->capture_default_str();
  add_guess(cont, ca.fold);

  auto* bif = app.add_subcommand("bifdiag", "equilibrium branches with stability (CSV or SVG)");
  std::string bif_range, bif_xrange = "-2:2";
  int bif_samples = 400;
  add_common(bif, c_bif, true, "csv", 1e-10);
  bif->add_option("--range", bif_range, "parameter values a:b:n")->required();
  bif->add_option("--xrange", bif_xrange, "state search interval lo:hi")->capture_default_str();
  bif->add_option("--samples", bif_samples, "sign-change samples per parameter value")
      ->check(CLI::Range(10, 1000000))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze(c_an, g_an, out);
    if (*reduce) return cmd_reduce(c_red, coeffs, order, g_red, out);
    if (*match) return cmd_match(c_match, match_range, geometric, g_match, out, err);
    if (*conj) return cmd_conjugacy(c_conj, conj_mu, copts, g_conj, out);
    if (*cm) return cmd_cm(c_cm, cm_m, cm_branch, cm_guess, out);
    if (*cont) return cmd_continue(c_cont, ca, out, err);
    if (*bif) return cmd_bifdiag(c_bif, bif_range, bif_xrange, bif_samples, out);
  } catch (const UsageError& e) {
    err << "sntk: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    err << "sntk: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "sntk: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "sntk: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "sntk: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "sntk: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}

}  // namespace sntk::cli

#pragma once

// Config-driven experiment runner.
//
// A config is one JSON object (see configs/ and README for the schema). Every
// grid cell g and trial t gets the seed derive_seed(master_seed, g, t); cells
// are enumerated in the documented key order with the last key varying
// fastest. Trials run on a bounded pool and are written in (g, t) order, so
// the CSV and summary bytes depend only on the config (wall times appear in
// the summary only when output.timing is set).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "decomposition.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "regular_graph.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "variational.hpp"
#include "weights.hpp"

namespace wrg {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class ExperimentKind { lln, transition, localization, shattering, census, tailbound, variational };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::lln: return "lln";
    case ExperimentKind::transition: return "transition";
    case ExperimentKind::localization: return "localization";
    case ExperimentKind::shattering: return "shattering";
    case ExperimentKind::census: return "census";
    case ExperimentKind::tailbound: return "tailbound";
    case ExperimentKind::variational: return "variational";
  }
  return "?";
}

inline std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::lln, ExperimentKind::transition, ExperimentKind::localization,
                 ExperimentKind::shattering, ExperimentKind::census, ExperimentKind::tailbound,
                 ExperimentKind::variational})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::transition;
  std::vector<std::int64_t> n, d, L, m;
  std::vector<double> alpha, b, b_scale, gamma, eps, L_offset;
  std::int64_t trials = 1;
  std::int64_t samples = 1000000;  // tailbound: Monte Carlo draws per trial
  std::uint64_t master_seed = 0;
  double kappa = 0.05;             // localization: b_n schedule when b is absent
  double C = 1.0;                  // tailbound constant
  std::optional<std::int64_t> radius;     // census; default floor(0.2 log_{d-1} n)
  std::optional<double> heavy_threshold;  // localization; default (1 - sqrt(eps)) (log n)^(1/alpha)
  bool consistency_checks = true;         // localization: Weyl and light-part bounds
  std::string csv_path, summary_path;
  bool timing = false;  // wall times in the summary; never in the CSV
  LanczosOptions lanczos;
  SolveOptions solver;
  json source;  // the document as read, echoed into the summary
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline Error config_error(const std::string& key, const std::string& what) {
  return Error(Errc::parse_error, "config key '" + key + "': " + what);
}

inline double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw config_error(key, "expected a number");
  return v.get<double>();
}

inline std::int64_t as_int(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
  }
  throw config_error(key, "expected an integer");
}

template <class T, class Get>
std::vector<T> as_list(const json& v, const std::string& key, Get get) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(get(x, key));
  } else {
    out.push_back(get(v, key));
  }
  return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw Error(Errc::parse_error, "config must be a JSON object");
  ExperimentConfig c;
  c.source = doc;
  if (!doc.contains("kind")) throw config_error("kind", "missing");
  if (!doc["kind"].is_string()) throw config_error("kind", "expected a string");
  const auto kind = parse_kind(doc["kind"].get<std::string>());
  if (!kind) throw config_error("kind", "unknown experiment kind '" + doc["kind"].get<std::string>() + "'");
  c.kind = *kind;

  for (const auto& [key, v] : doc.items()) {
    if (key == "kind") continue;
    else if (key == "n") c.n = as_list<std::int64_t>(v, key, as_int);
    else if (key == "d") c.d = as_list<std::int64_t>(v, key, as_int);
    else if (key == "L") c.L = as_list<std::int64_t>(v, key, as_int);
    else if (key == "m") c.m = as_list<std::int64_t>(v, key, as_int);
    else if (key == "alpha") c.alpha = as_list<double>(v, key, as_real);
    else if (key == "b") c.b = as_list<double>(v, key, as_real);
    else if (key == "b_scale") c.b_scale = as_list<double>(v, key, as_real);
    else if (key == "gamma") c.gamma = as_list<double>(v, key, as_real);
    else if (key == "eps") c.eps = as_list<double>(v, key, as_real);
    else if (key == "L_offset") c.L_offset = as_list<double>(v, key, as_real);
    else if (key == "trials") c.trials = as_int(v, key);
    else if (key == "samples") c.samples = as_int(v, key);
    else if (key == "master_seed") {
      if (!v.is_number_unsigned()) throw config_error(key, "expected a non-negative integer");
      c.master_seed = v.get<std::uint64_t>();
    } else if (key == "kappa") c.kappa = as_real(v, key);
    else if (key == "C") c.C = as_real(v, key);
    else if (key == "radius") c.radius = as_int(v, key);
    else if (key == "heavy_threshold") c.heavy_threshold = as_real(v, key);
    else if (key == "consistency_checks") {
      if (!v.is_boolean()) throw config_error(key, "expected true or false");
      c.consistency_checks = v.get<bool>();
    } else if (key == "output") {
      if (!v.is_object()) throw config_error(key, "expected an object with csv and summary paths");
      for (const auto& [k2, p] : v.items()) {
        if (k2 == "timing") {
          if (!p.is_boolean()) throw config_error("output.timing", "expected true or false");
          c.timing = p.get<bool>();
          continue;
        }
        if (!p.is_string()) throw config_error("output." + k2, "expected a path string");
        if (k2 == "csv") c.csv_path = p.get<std::string>();
        else if (k2 == "summary") c.summary_path = p.get<std::string>();
        else throw config_error("output." + k2, "unknown key");
      }
    } else if (key == "solver") {
      if (!v.is_object()) throw config_error(key, "expected an object");
      for (const auto& [k2, s] : v.items()) {
        const std::string full = "solver." + k2;
        if (k2 == "tol") c.lanczos.tol = as_real(s, full);
        else if (k2 == "max_iter") c.lanczos.max_iter = static_cast<std::size_t>(std::max<std::int64_t>(0, as_int(s, full)));
        else if (k2 == "basis") c.lanczos.basis = static_cast<std::size_t>(std::max<std::int64_t>(0, as_int(s, full)));
        else if (k2 == "restarts") c.solver.restarts = static_cast<std::size_t>(std::max<std::int64_t>(0, as_int(s, full)));
        else if (k2 == "tolerance") c.solver.tolerance = as_real(s, full);
        else if (k2 == "ascent_max_iter") c.solver.max_iter = static_cast<std::size_t>(std::max<std::int64_t>(0, as_int(s, full)));
        else if (k2 == "mode") {
          if (!s.is_string()) throw config_error(full, "expected full, level-reduced or automatic");
          const auto m = s.get<std::string>();
          if (m == "full") c.solver.mode = SolveMode::full;
          else if (m == "level-reduced") c.solver.mode = SolveMode::level_reduced;
          else if (m == "automatic") c.solver.mode = SolveMode::automatic;
          else throw config_error(full, "expected full, level-reduced or automatic");
        } else throw config_error(full, "unknown key");
      }
    } else {
      throw config_error(key, "unknown key");
    }
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  auto need = [&](bool empty, const char* key) {
    if (empty) v.push_back(std::string("grid '") + key + "' is empty");
  };
  const auto k = c.kind;
  const bool graphs = k != ExperimentKind::tailbound && k != ExperimentKind::variational;
  if (c.trials < 1) v.push_back("trials must be at least 1");
  if (graphs) {
    need(c.n.empty(), "n");
    need(c.d.empty(), "d");
    for (auto d : c.d)
      if (d < 1) v.push_back("d = " + std::to_string(d) + ": degree must be at least 1");
    for (auto n : c.n) {
      if (n < 1) v.push_back("n = " + std::to_string(n) + ": vertex count must be positive");
      for (auto d : c.d) {
        if (n >= 1 && d >= 1 && (n * d) % 2 != 0)
          v.push_back("n = " + std::to_string(n) + ", d = " + std::to_string(d) + ": n*d must be even");
        if (n >= 1 && d >= n)
          v.push_back("n = " + std::to_string(n) + ", d = " + std::to_string(d) + ": d must be less than n");
      }
    }
  }
  auto check_alpha = [&](double lower, const char* why) {
    need(c.alpha.empty(), "alpha");
    for (double a : c.alpha)
      if (!(std::isfinite(a) && a > lower)) v.push_back("alpha = " + fmt_double(a) + ": " + why);
  };
  switch (k) {
    case ExperimentKind::lln:
    case ExperimentKind::transition:
      check_alpha(0.0, "Weibull shape must be positive");
      break;
    case ExperimentKind::localization:
      check_alpha(0.0, "Weibull shape must be positive");
      need(c.eps.empty(), "eps");
      for (double e : c.eps)
        if (!(e > 0 && e < 1)) v.push_back("eps = " + fmt_double(e) + ": eps must lie in (0,1)");
      for (double b : c.b)
        if (!(b > 0)) v.push_back("b = " + fmt_double(b) + ": truncation level must be positive");
      if (!(c.kappa > 0)) v.push_back("kappa must be positive");
      for (auto n : c.n)
        if (n < 3 && c.b.empty()) v.push_back("n = " + std::to_string(n) + ": the b_n schedule needs n >= 3");
      break;
    case ExperimentKind::shattering:
      if (c.b.empty() == c.b_scale.empty()) v.push_back("give exactly one of the grids 'b' or 'b_scale'");
      for (double b : c.b)
        if (!(b > 0)) v.push_back("b = " + fmt_double(b) + ": retention level must be positive");
      for (double s : c.b_scale)
        if (!(s > 0)) v.push_back("b_scale = " + fmt_double(s) + ": must be positive");
      for (auto n : c.n)
        if (n < 2 && !c.b_scale.empty()) v.push_back("n = " + std::to_string(n) + ": b_scale needs n >= 2");
      break;
    case ExperimentKind::census:
      for (auto d : c.d)
        if (d < 3) v.push_back("d = " + std::to_string(d) + ": census needs d >= 3");
      if (c.radius && *c.radius < 1) v.push_back("radius must be at least 1");
      break;
    case ExperimentKind::tailbound:
      check_alpha(0.0, "Weibull shape must be positive");
      need(c.m.empty(), "m");
      need(c.b.empty(), "b");
      if (c.L.empty() && c.L_offset.empty()) v.push_back("grid 'L' or 'L_offset' is empty");
      if (!c.L.empty() && !c.L_offset.empty()) v.push_back("give only one of the grids 'L' or 'L_offset'");
      for (auto m : c.m)
        if (m < 1) v.push_back("m = " + std::to_string(m) + ": number of summands must be positive");
      for (double b : c.b)
        if (!(b > 1)) v.push_back("b = " + fmt_double(b) + ": conditioning level must exceed 1");
      for (auto m : c.m)
        for (double b : c.b) {
          for (auto L : c.L)
            if (!(static_cast<double>(L) > static_cast<double>(m)))
              v.push_back("L = " + std::to_string(L) + ", m = " + std::to_string(m) + ": threshold L must exceed m");
          for (double off : c.L_offset)
            if (!(static_cast<double>(m) * b + off > static_cast<double>(m)))
              v.push_back("L_offset = " + fmt_double(off) + ": threshold L must exceed m");
        }
      if (!(c.C >= 1)) v.push_back("C must be at least 1");
      if (c.samples < 10000) v.push_back("samples must be at least 10000");
      break;
    case ExperimentKind::variational:
      need(c.d.empty(), "d");
      need(c.L.empty(), "L");
      for (auto d : c.d)
        if (d < 3) v.push_back("d = " + std::to_string(d) + ": tree degree must be at least 3");
      for (auto L : c.L)
        if (L < 1) v.push_back("L = " + std::to_string(L) + ": depth must be at least 1");
      if (c.gamma.empty() == c.alpha.empty()) v.push_back("give exactly one of the grids 'gamma' or 'alpha'");
      for (double g : c.gamma)
        if (!(g >= 0.5)) v.push_back("gamma = " + fmt_double(g) + ": gamma must exceed 1/2 (K_d is finite only for gamma >= 1/2)");
      for (double a : c.alpha)
        if (!(a > 1)) v.push_back("alpha = " + fmt_double(a) + ": need alpha > 1 so that gamma = beta/2 is defined");
      if (c.solver.restarts < 1) v.push_back("solver.restarts must be at least 1");
      break;
  }
  if (!(c.lanczos.tol > 0)) v.push_back("solver.tol must be positive");
  if (c.lanczos.basis < 2) v.push_back("solver.basis must be at least 2");
  if (c.lanczos.max_iter < 1) v.push_back("solver.max_iter must be at least 1");
  return v;
}

// ---------------------------------------------------------------------------
// Records

using Value = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, double, std::string>;
using Fields = std::vector<std::pair<std::string, Value>>;

struct TrialRecord {
  ExperimentKind kind{};
  std::size_t grid = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;  // derive_seed(master_seed, grid, trial)
  Fields params;
  Fields measures;
  double seconds = 0.0;  // wall time; varies run to run, so kept out of the CSV
};

inline std::string csv_cell(const Value& v) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(std::uint64_t x) const { return std::to_string(x); }
    std::string operator()(double x) const { return fmt_double(x); }
    std::string operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, v);
}

inline json json_value(const Value& v) {
  struct {
    json operator()(std::monostate) const { return nullptr; }
    json operator()(bool b) const { return b; }
    json operator()(std::int64_t x) const { return x; }
    json operator()(std::uint64_t x) const { return x; }
    json operator()(double x) const { return std::isfinite(x) ? json(x) : json(nullptr); }
    json operator()(const std::string& s) const { return s; }
  } visit;
  return std::visit(visit, v);
}

inline void write_csv(std::ostream& os, const std::vector<TrialRecord>& rows) {
  os << "schema_version,kind,grid,trial,seed";
  if (!rows.empty()) {
    for (const auto& [k, _] : rows.front().params) os << ',' << k;
    for (const auto& [k, _] : rows.front().measures) os << ',' << k;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << kSchemaVersion << ',' << to_string(r.kind) << ',' << r.grid << ',' << r.trial << ',' << r.seed;
    for (const auto& [_, v] : r.params) os << ',' << csv_cell(v);
    for (const auto& [_, v] : r.measures) os << ',' << csv_cell(v);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Grid cells and trials

struct Cell {
  std::size_t n = 0, d = 0, m = 0, L = 0;
  double alpha = 0, b = 0, gamma = 0, eps = 0, threshold_L = 0;
  std::optional<double> b_scale;
  Fields params;
};

namespace detail {

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

inline std::vector<Cell> build_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  auto sz = [](std::int64_t x) { return static_cast<std::size_t>(x); };
  switch (c.kind) {
    case ExperimentKind::lln:
    case ExperimentKind::transition:
      for (auto d : c.d)
        for (auto n : c.n)
          for (double a : c.alpha) {
            Cell x;
            x.d = sz(d), x.n = sz(n), x.alpha = a;
            x.params = {{"d", d}, {"n", n}, {"alpha", a}};
            cells.push_back(x);
          }
      break;
    case ExperimentKind::localization: {
      const std::vector<double> bs = c.b.empty() ? std::vector<double>{nan()} : c.b;
      for (auto d : c.d)
        for (auto n : c.n)
          for (double a : c.alpha)
            for (double b : bs)
              for (double e : c.eps) {
                Cell x;
                x.d = sz(d), x.n = sz(n), x.alpha = a, x.eps = e;
                x.b = std::isnan(b) ? truncation_schedule_b(x.n, a) : b;
                x.params = {{"d", d}, {"n", n}, {"alpha", a}, {"b", x.b}, {"eps", e}};
                cells.push_back(x);
              }
      break;
    }
    case ExperimentKind::shattering: {
      const bool scaled = !c.b_scale.empty();
      const auto& levels = scaled ? c.b_scale : c.b;
      for (auto d : c.d)
        for (auto n : c.n)
          for (double b : levels) {
            Cell x;
            x.d = sz(d), x.n = sz(n);
            if (scaled) x.b_scale = b;
            x.b = scaled ? b * std::log(static_cast<double>(n)) : b;
            x.params = {{"d", d}, {"n", n}, {"b", x.b}};
            cells.push_back(x);
          }
      break;
    }
    case ExperimentKind::census:
      for (auto d : c.d)
        for (auto n : c.n) {
          Cell x;
          x.d = sz(d), x.n = sz(n);
          x.L = c.radius ? sz(*c.radius) : default_census_radius(x.n, x.d);
          x.params = {{"d", d}, {"n", n}, {"radius", static_cast<std::int64_t>(x.L)}};
          cells.push_back(x);
        }
      break;
    case ExperimentKind::tailbound:
      for (double a : c.alpha)
        for (auto m : c.m)
          for (double b : c.b) {
            std::vector<double> Ls;
            for (auto L : c.L) Ls.push_back(static_cast<double>(L));
            for (double off : c.L_offset) Ls.push_back(static_cast<double>(m) * b + off);
            for (double L : Ls) {
              Cell x;
              x.alpha = a, x.m = sz(m), x.b = b, x.threshold_L = L;
              x.params = {{"alpha", a}, {"m", m}, {"b", b}, {"L", L}, {"C", c.C}};
              cells.push_back(x);
            }
          }
      break;
    case ExperimentKind::variational: {
      const bool by_alpha = !c.alpha.empty();
      const auto& gs = by_alpha ? c.alpha : c.gamma;
      for (auto d : c.d)
        for (double g : gs)
          for (auto L : c.L) {
            Cell x;
            x.d = sz(d), x.L = sz(L);
            x.alpha = by_alpha ? g : nan();
            x.gamma = by_alpha ? conjugate(g) / 2.0 : g;
            x.params = {{"d", d}, {"L", L}, {"gamma", x.gamma}, {"alpha", by_alpha ? Value(g) : Value()}};
            cells.push_back(x);
          }
      break;
    }
  }
  return cells;
}

inline Fields run_eigen_trial(const Cell& x, std::uint64_t seed, const ExperimentConfig& c) {
  const auto r = transition_trial(x.n, x.d, x.alpha, seed, c.lanczos);
  return {{"lambda1", r.lambda1},
          {"residual", r.residual},
          {"converged", r.converged},
          {"max_abs_weight", r.max_abs_weight},
          {"ratio", r.ratio},
          {"max_entry_ok", r.max_entry_ok}};
}

inline Fields run_localization_trial(const Cell& x, std::uint64_t seed, const ExperimentConfig& c) {
  auto graph = generate_regular(x.n, x.d, derive_seed(seed, stream::graph));
  const auto net = weigh(graph, WeibullParams(x.alpha), derive_seed(seed, stream::weights));
  LanczosOptions opt = c.lanczos;
  opt.seed = derive_seed(seed, stream::solver);
  const auto eig = lambda_max(SparseSym::from_network(net), opt);

  auto p = DecompositionParams::fixed(x.alpha, x.b);
  p.kappa = c.kappa;
  const auto dec = decompose(net, p);
  const auto cs = component_stats(net, dec, eig.f);
  const double ln = std::log(static_cast<double>(x.n));
  const double heavy = c.heavy_threshold ? *c.heavy_threshold : (1.0 - std::sqrt(x.eps)) * std::pow(ln, 1.0 / x.alpha);
  const auto lr = localization_report(net, eig.f, x.eps, &cs, heavy);

  const auto control = unit_weights(std::move(graph), WeibullParams(x.alpha));
  const auto eig_unit = lambda_max(SparseSym::from_network(control), opt);
  const std::size_t support_unit = min_support_size(eig_unit.f, x.eps);

  Value top_S, top_x, dominates = false;
  if (!cs.components.empty()) {
    double best_x = 0.0;
    for (const auto& k : cs.components) best_x = std::max(best_x, k.x);
    top_S = cs.components.front().S;
    top_x = cs.components.front().x;
    dominates = cs.components.front().x >= best_x;
  }
  const double max_w = net.max_abs_weight();
  Fields f{{"lambda1", eig.lambda},
           {"residual", eig.residual},
           {"converged", eig.converged},
           {"max_abs_weight", max_w},
           {"max_entry_ok", eig.lambda >= max_w - eig.residual},
           {"min_support", static_cast<std::int64_t>(lr.min_support_size)},
           {"min_support_unit", static_cast<std::int64_t>(support_unit)},
           {"unit_support_fraction", static_cast<double>(support_unit) / static_cast<double>(x.n)},
           {"top_edge_mass", lr.top_edge_mass},
           {"disjoint_edges", x.alpha < 2.0 ? Value(static_cast<std::int64_t>(lr.disjoint_edges.size())) : Value()},
           {"components", static_cast<std::int64_t>(cs.components.size())},
           {"heavy_threshold", heavy},
           {"heavy_components", static_cast<std::int64_t>(*lr.heavy_component_count)},
           {"top_S", top_S},
           {"top_x", top_x},
           {"top_dominates", dominates},
           {"isolated_mass", cs.isolated_mass}};
  if (c.consistency_checks) {
    // lambda1(X) <= lambda1(X11) + ||X12|| + ||X2|| and lambda1(X2) <= d b^(1/alpha).
    const auto top11 = lambda_max(SparseSym::from_network(net, dec.tree), opt);
    const auto M12 = SparseSym::from_network(net, dec.excess);
    const auto M2 = SparseSym::from_network(net, dec.small);
    const auto up12 = lambda_max(M12, opt), lo12 = lambda_max(M12.negated(), opt);
    const auto up2 = lambda_max(M2, opt), lo2 = lambda_max(M2.negated(), opt);
    const double norm12 = std::max(up12.lambda, lo12.lambda);
    const double norm2 = std::max(up2.lambda, lo2.lambda);
    const double slack = eig.residual + top11.residual + std::max(up12.residual, lo12.residual) +
                         std::max(up2.residual, lo2.residual);
    f.emplace_back("lambda1_x11", top11.lambda);
    f.emplace_back("norm_x12", norm12);
    f.emplace_back("norm_x2", norm2);
    f.emplace_back("lambda1_x2", up2.lambda);
    f.emplace_back("weyl_ok", eig.lambda <= top11.lambda + norm12 + norm2 + slack);
    f.emplace_back("light_bound_ok", up2.lambda <= static_cast<double>(x.d) * p.threshold() + up2.residual);
  }
  return f;
}

inline Fields run_shattering_trial(const Cell& x, std::uint64_t seed) {
  const auto t = shattering_trial(x.n, x.d, x.b, seed);
  const auto bound = shattering_bound(x.n, x.b);
  return {{"bound", static_cast<std::int64_t>(bound)},
          {"max_component_edges", static_cast<std::int64_t>(t.max_component_edges)},
          {"kept_edges", static_cast<std::int64_t>(t.kept_edges)},
          {"exceeds", t.max_component_edges > bound}};
}

inline double census_bound(const Cell& x) {
  return std::pow(static_cast<double>(x.d - 1), 4.0 * static_cast<double>(x.L));
}

inline Fields run_census_trial(const Cell& x, std::uint64_t seed) {
  const auto g = generate_regular(x.n, x.d, derive_seed(seed, stream::graph));
  const auto c = census(g, x.L);
  const double bound = census_bound(x);
  return {{"max_excess", static_cast<std::int64_t>(c.max_excess)},
          {"cyclic_vertex_count", static_cast<std::int64_t>(c.cyclic_vertex_count)},
          {"cyclic_bound", bound},
          {"within_bound", static_cast<double>(c.cyclic_vertex_count) <= bound}};
}

inline Fields run_tail_trial(const Cell& x, std::uint64_t seed, const ExperimentConfig& c) {
  const auto est = mc_sum_tail(x.alpha, x.m, x.threshold_L, x.b, static_cast<std::size_t>(c.samples), seed);
  const double bound = weibull_sum_bound({x.m, x.threshold_L, x.b, c.C});
  Value exact, inside;
  if (x.m == 1) {
    const double e = x.threshold_L <= x.b ? 1.0 : std::exp(-(x.threshold_L - x.b));
    exact = e;
    inside = est.ci_low <= e && e <= est.ci_high;
  }
  return {{"samples", static_cast<std::int64_t>(est.trials)},
          {"hits", static_cast<std::int64_t>(est.hits)},
          {"estimate", est.estimate},
          {"ci_low", est.ci_low},
          {"ci_high", est.ci_high},
          {"bound", bound},
          {"below_bound", est.ci_high <= bound},
          {"exact", exact},
          {"exact_in_ci", inside}};
}

inline Fields run_variational_trial(const Cell& x, std::uint64_t seed, const ExperimentConfig& c) {
  SolveOptions so = c.solver;
  so.seed = seed;
  so.threads = 1;  // trials already run in parallel
  const auto s = solve_kdl(x.d, x.L, x.gamma, so);
  return {{"value", s.value},
          {"converged", s.converged},
          {"restarts", static_cast<std::int64_t>(s.restarts_used)},
          {"mode", std::string(to_string(s.mode))},
          {"gradient_norm", s.gradient_norm},
          {"iterations", static_cast<std::int64_t>(s.iterations)}};
}

inline Fields run_trial(const ExperimentConfig& c, const Cell& x, std::uint64_t seed) {
  switch (c.kind) {
    case ExperimentKind::lln:
    case ExperimentKind::transition: return run_eigen_trial(x, seed, c);
    case ExperimentKind::localization: return run_localization_trial(x, seed, c);
    case ExperimentKind::shattering: return run_shattering_trial(x, seed);
    case ExperimentKind::census: return run_census_trial(x, seed);
    case ExperimentKind::tailbound: return run_tail_trial(x, seed, c);
    case ExperimentKind::variational: return run_variational_trial(x, seed, c);
  }
  return {};
}

inline std::optional<double> numeric(const Value& v) {
  if (auto p = std::get_if<double>(&v)) return *p;
  if (auto p = std::get_if<std::int64_t>(&v)) return static_cast<double>(*p);
  if (auto p = std::get_if<std::uint64_t>(&v)) return static_cast<double>(*p);
  return std::nullopt;
}

inline const Value* find(const Fields& f, const std::string& key) {
  for (const auto& [k, v] : f)
    if (k == key) return &v;
  return nullptr;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Summary

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<TrialRecord> records;
  std::vector<Check> checks;
  json summary;
  bool all_checks_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline json summarize_group(const std::vector<const TrialRecord*>& rows) {
  json metrics = json::object();
  if (rows.empty()) return metrics;
  for (std::size_t i = 0; i < rows.front()->measures.size(); ++i) {
    const auto& key = rows.front()->measures[i].first;
    std::vector<double> xs;
    std::size_t trues = 0, bools = 0;
    for (const auto* r : rows) {
      const auto& v = r->measures[i].second;
      if (auto b = std::get_if<bool>(&v)) {
        ++bools;
        trues += *b;
      } else if (auto x = numeric(v); x && std::isfinite(*x)) {
        xs.push_back(*x);
      }
    }
    if (bools) {
      metrics[key] = {{"true", trues}, {"count", bools}, {"rate", static_cast<double>(trues) / static_cast<double>(bools)}};
    } else if (!xs.empty()) {
      const auto s = stats::summarize(xs);
      metrics[key] = {{"count", s.count},   {"median", s.median}, {"q1", s.q1},   {"q3", s.q3},
                      {"mean", s.mean},     {"ci_half_width", s.ci_half_width},
                      {"min", s.min},       {"max", s.max}};
    }
  }
  return metrics;
}

inline double group_rate(const std::vector<const TrialRecord*>& rows, const std::string& key) {
  std::size_t t = 0, k = 0;
  for (const auto* r : rows)
    if (auto v = find(r->measures, key))
      if (auto b = std::get_if<bool>(v)) {
        ++k;
        t += *b;
      }
  return k ? static_cast<double>(t) / static_cast<double>(k) : 0.0;
}

inline std::size_t count_false(const std::vector<TrialRecord>& rows, const std::string& key) {
  std::size_t bad = 0;
  for (const auto& r : rows)
    if (auto v = find(r.measures, key))
      if (auto b = std::get_if<bool>(v); b && !*b) ++bad;
  return bad;
}

inline std::string cell_label(const Cell& x) {
  std::string s;
  for (const auto& [k, v] : x.params) {
    if (std::holds_alternative<std::monostate>(v)) continue;
    s += (s.empty() ? "" : " ") + k + "=" + csv_cell(v);
  }
  return s;
}

inline std::vector<Check> embedded_checks(const ExperimentConfig& c, const std::vector<Cell>& cells,
                                          const std::vector<std::vector<const TrialRecord*>>& groups,
                                          const std::vector<TrialRecord>& rows) {
  std::vector<Check> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };
  auto median_of = [&](std::size_t g, const std::string& key) {
    std::vector<double> xs;
    for (const auto* r : groups[g])
      if (auto v = find(r->measures, key))
        if (auto x = numeric(*v)) xs.push_back(*x);
    return xs.empty() ? std::numeric_limits<double>::quiet_NaN() : stats::median(xs);
  };
  switch (c.kind) {
    case ExperimentKind::lln:
    case ExperimentKind::transition:
    case ExperimentKind::localization: {
      const auto bad = count_false(rows, "max_entry_ok");
      add("lambda1_at_least_max_weight", bad == 0, std::to_string(bad) + " violations of lambda1 >= max|W| - residual");
      if (c.kind == ExperimentKind::localization && c.consistency_checks) {
        const auto weyl = count_false(rows, "weyl_ok"), light = count_false(rows, "light_bound_ok");
        add("weyl_decomposition", weyl == 0, std::to_string(weyl) + " violations");
        add("light_part_bound", light == 0, std::to_string(light) + " violations of lambda1(X2) <= d b^(1/alpha)");
      }
      if (c.kind == ExperimentKind::localization) {
        for (std::size_t g = 0; g < cells.size(); ++g) {
          if (cells[g].alpha > 1.0) continue;
          const double rate = group_rate(groups[g], "top_dominates");
          add("heavy_component_dominance[" + cell_label(cells[g]) + "]", rate >= 0.7,
              "largest-S component carries the largest mass in " + fmt_double(rate) + " of trials");
        }
      }
      if (c.kind == ExperimentKind::lln) {
        // Medians of the ratio must not increase with n, per (d, alpha).
        std::map<std::pair<std::size_t, double>, std::vector<std::pair<std::size_t, double>>> lines;
        for (std::size_t g = 0; g < cells.size(); ++g)
          lines[{cells[g].d, cells[g].alpha}].emplace_back(cells[g].n, median_of(g, "ratio"));
        for (auto& [key, pts] : lines) {
          std::sort(pts.begin(), pts.end());
          bool ok = true;
          std::string trace;
          for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i && pts[i].second > pts[i - 1].second) ok = false;
            trace += (i ? ", " : "") + std::to_string(pts[i].first) + ":" + fmt_double(pts[i].second);
          }
          add("median_ratio_nonincreasing_in_n[d=" + std::to_string(key.first) + " alpha=" + fmt_double(key.second) + "]",
              ok, trace);
        }
      }
      break;
    }
    case ExperimentKind::shattering:
      for (std::size_t g = 0; g < cells.size(); ++g) {
        const double rate = group_rate(groups[g], "exceeds");
        add("shattering[" + cell_label(cells[g]) + "]", rate <= 0.05,
            "bound " + std::to_string(shattering_bound(cells[g].n, cells[g].b)) + " exceeded in " + fmt_double(rate) +
                " of trials");
      }
      break;
    case ExperimentKind::census:
      for (std::size_t g = 0; g < cells.size(); ++g) {
        const double rate = group_rate(groups[g], "within_bound");
        add("census[" + cell_label(cells[g]) + "]", rate >= 0.95,
            "cyclic vertices <= (d-1)^(4R) in " + fmt_double(rate) + " of trials");
      }
      break;
    case ExperimentKind::tailbound: {
      const auto above = count_false(rows, "below_bound");
      const auto outside = count_false(rows, "exact_in_ci");
      add("mc_upper_ci_below_bound", above == 0, std::to_string(above) + " grid points with upper CI above the bound");
      add("exact_tail_in_ci", outside == 0, std::to_string(outside) + " m=1 points with the exact tail outside the CI");
      break;
    }
    case ExperimentKind::variational: {
      std::map<std::pair<std::size_t, double>, std::vector<std::pair<std::size_t, double>>> lines;
      std::size_t closed_bad = 0, closed_n = 0;
      for (std::size_t g = 0; g < cells.size(); ++g) {
        const double v = median_of(g, "value");
        lines[{cells[g].d, cells[g].gamma}].emplace_back(cells[g].L, v);
        if (cells[g].gamma >= 1.0) {
          ++closed_n;
          if (!(std::abs(v - kd_closed_form(cells[g].gamma)) <= 1e-6)) ++closed_bad;
        }
      }
      std::size_t drops = 0;
      for (auto& [key, pts] : lines) {
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 1; i < pts.size(); ++i)
          if (pts[i].second < pts[i - 1].second - 1e-9 * std::abs(pts[i - 1].second)) ++drops;
      }
      add("nondecreasing_in_L", drops == 0, std::to_string(drops) + " decreases between consecutive depths");
      if (closed_n)
        add("closed_form_gamma_at_least_1", closed_bad == 0,
            std::to_string(closed_bad) + " of " + std::to_string(closed_n) + " cells off 2^(1/(2 gamma) - 1) by more than 1e-6");
      break;
    }
  }
  return out;
}

}  // namespace detail

/// Runs a validated config. Output is identical for any `threads`.
inline RunResult run(const ExperimentConfig& c, std::size_t threads = 0) {
  const auto violations = validate(c);
  if (!violations.empty()) throw Error(Errc::invalid_parameters, "config is invalid: " + violations.front());
  const auto cells = detail::build_cells(c);
  const bool deterministic_cells = c.kind == ExperimentKind::variational;
  const std::size_t trials = deterministic_cells ? 1 : static_cast<std::size_t>(c.trials);

  RunResult out;
  out.records = parallel_map(cells.size() * trials, threads, [&](std::size_t k) {
    const std::size_t g = k / trials, t = k % trials;
    TrialRecord r;
    r.kind = c.kind;
    r.grid = g;
    r.trial = t;
    r.seed = derive_seed(c.master_seed, g, t);
    r.params = cells[g].params;
    const auto start = std::chrono::steady_clock::now();
    try {
      r.measures = detail::run_trial(c, cells[g], r.seed);
    } catch (const Error& e) {
      throw Error(e.code(), "grid " + std::to_string(g) + " (" + detail::cell_label(cells[g]) + ") trial " +
                                std::to_string(t) + ": " + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  });

  std::vector<std::vector<const TrialRecord*>> groups(cells.size());
  for (const auto& r : out.records) groups[r.grid].push_back(&r);
  out.checks = detail::embedded_checks(c, cells, groups, out.records);

  json& s = out.summary;
  s["schema_version"] = kSchemaVersion;
  s["kind"] = to_string(c.kind);
  s["config"] = c.source;
  s["rows"] = out.records.size();
  json gs = json::array();
  for (std::size_t g = 0; g < cells.size(); ++g) {
    json params = json::object();
    for (const auto& [k, v] : cells[g].params) params[k] = json_value(v);
    json entry = {{"grid", g}, {"params", params}, {"trials", groups[g].size()},
                  {"metrics", detail::summarize_group(groups[g])}};
    if (c.timing) {
      double total = 0.0;
      for (const auto* r : groups[g]) total += r->seconds;
      entry["wall_seconds"] = total;
    }
    gs.push_back(entry);
  }
  s["groups"] = gs;
  json cs = json::array();
  for (const auto& ch : out.checks) cs.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  s["checks"] = cs;
  s["all_checks_passed"] = out.all_checks_passed();
  return out;
}

/// Writes the CSV and summary to the paths named in the config (if any).
inline void write_outputs(const ExperimentConfig& c, const RunResult& r) {
  if (!c.csv_path.empty()) {
    auto os = open_output(c.csv_path);
    write_csv(os, r.records);
  }
  if (!c.summary_path.empty()) {
    auto os = open_output(c.summary_path);
    os << r.summary.dump(2) << '\n';
  }
}

}  // namespace wrg

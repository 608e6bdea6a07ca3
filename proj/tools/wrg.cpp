// wrg: command-line front end.
//
// Exit codes: 0 success, 2 bad arguments or config, 3 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wrg/wrg.hpp"

namespace {

using namespace wrg;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
  std::size_t threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output path, - for stdout");
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", c.threads, "worker threads, 0 for all cores");
}

// Writes to a file or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") file_ = std::make_unique<std::ofstream>(open_output(path));
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_json_file(const std::string& path, const json& j) {
  Sink s(path);
  s.os() << j.dump(2) << '\n';
}

struct NetworkSource {
  std::string in;
  std::size_t n = 1000;
  std::size_t d = 3;
  double alpha = 1.0;
};

void add_network_source(CLI::App* app, NetworkSource& s) {
  app->add_option("--in", s.in, "network file (otherwise a network is generated)");
  app->add_option("--n", s.n, "vertex count");
  app->add_option("--d", s.d, "degree");
  app->add_option("--alpha", s.alpha, "Weibull shape");
}

WeightedNetwork load_network(const NetworkSource& s, std::uint64_t seed) {
  if (!s.in.empty()) {
    auto in = open_input(s.in);
    return read_network(in);
  }
  return weigh(generate_regular(s.n, s.d, derive_seed(seed, stream::graph)), WeibullParams(s.alpha),
               derive_seed(seed, stream::weights));
}

// ---------------------------------------------------------------------------

int cmd_gen(const Common& c, std::size_t n, std::size_t d, std::optional<double> alpha) {
  auto g = generate_regular(n, d, derive_seed(c.seed, stream::graph));
  Sink out(c.out);
  if (c.format == "json") {
    json j{{"n", n}, {"d", d}, {"master_seed", c.seed}, {"seed", g.seed()}};
    json edges = json::array();
    if (alpha) {
      const auto net = weigh(std::move(g), WeibullParams(*alpha), derive_seed(c.seed, stream::weights));
      j["alpha"] = *alpha;
      j["weights_seed"] = net.seed();
      for (EdgeId e = 0; e < net.graph().edge_count(); ++e)
        edges.push_back({net.graph().edge(e).u, net.graph().edge(e).v, net.weight(e)});
    } else {
      for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
    }
    j["edges"] = edges;
    out.os() << j.dump() << '\n';
  } else if (alpha) {
    write_network(out.os(), weigh(std::move(g), WeibullParams(*alpha), derive_seed(c.seed, stream::weights)));
  } else {
    write_graph(out.os(), g);
  }
  return 0;
}

int cmd_eigen(const Common& c, const NetworkSource& src, const LanczosOptions& base, bool with_vector) {
  const auto net = load_network(src, c.seed);
  LanczosOptions opt = base;
  opt.seed = derive_seed(c.seed, stream::solver);
  const auto eig = lambda_max(SparseSym::from_network(net), opt);
  const double max_w = net.max_abs_weight();
  const bool ok = eig.lambda >= max_w - eig.residual;
  Sink out(c.out);
  if (c.format == "json") {
    json j{{"n", net.graph().n()},      {"d", net.graph().d()},         {"alpha", net.params().alpha},
           {"lambda1", eig.lambda},     {"residual", eig.residual},     {"iterations", eig.iterations},
           {"converged", eig.converged}, {"max_abs_weight", max_w},     {"max_entry_ok", ok}};
    if (with_vector) j["vector"] = eig.f;
    out.os() << j.dump(2) << '\n';
  } else {
    out.os() << "n,d,alpha,lambda1,residual,iterations,converged,max_abs_weight,max_entry_ok\n"
             << net.graph().n() << ',' << net.graph().d() << ',' << fmt_double(net.params().alpha) << ','
             << fmt_double(eig.lambda) << ',' << fmt_double(eig.residual) << ',' << eig.iterations << ','
             << (eig.converged ? "true" : "false") << ',' << fmt_double(max_w) << ',' << (ok ? "true" : "false")
             << '\n';
    if (with_vector) {
      out.os() << "vertex,f\n";
      for (std::size_t i = 0; i < eig.f.size(); ++i) out.os() << i << ',' << fmt_double(eig.f[i]) << '\n';
    }
  }
  return 0;
}

struct VariationalArgs {
  std::size_t d = 3;
  std::size_t max_depth = 6;
  std::optional<double> gamma, alpha;
  std::string mode = "automatic";
  std::string summary;
};

int cmd_variational(const Common& c, const VariationalArgs& a, SolveOptions so) {
  if (a.gamma.has_value() == a.alpha.has_value())
    throw Error(Errc::invalid_parameters, "give exactly one of --gamma or --alpha");
  so.seed = c.seed;
  so.threads = c.threads;
  so.mode = a.mode == "full" ? SolveMode::full : a.mode == "level-reduced" ? SolveMode::level_reduced : SolveMode::automatic;
  const double gamma = a.gamma ? *a.gamma : conjugate(*a.alpha) / 2.0;
  check_gamma(gamma);

  struct Row {
    std::size_t L;
    double value;
    bool converged;
    std::size_t restarts;
    SolveMode mode;
  };
  std::vector<Row> rows;
  json summary{{"d", a.d}, {"gamma", gamma}, {"alpha", a.alpha ? json(*a.alpha) : json(nullptr)}};
  if (a.alpha) {
    HdOptions ho;
    ho.max_depth = a.max_depth;
    ho.solver = so;
    const auto h = h_d(a.d, *a.alpha, ho);
    for (const auto& r : h.table) rows.push_back({r.depth, r.kd, r.converged, so.restarts, r.mode});
    summary["h_d"] = h.value;
    summary["h_d_exact"] = h.exact;
    if (*a.alpha > 2.0) summary["star_bound"] = star_bound(a.d, *a.alpha);
  } else {
    for (std::size_t L = 1; L <= a.max_depth; ++L) {
      const auto s = solve_kdl(a.d, L, gamma, so);
      rows.push_back({L, s.value, s.converged, s.restarts_used, s.mode});
    }
  }
  json seq = json::array();
  double best = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    best = std::max(best, rows[i].value);
    json row{{"L", rows[i].L},
             {"value", rows[i].value},
             {"increment", i ? rows[i].value - rows[i - 1].value : rows[i].value},
             {"mode", to_string(rows[i].mode)},
             {"converged", rows[i].converged}};
    if (a.alpha && *a.alpha > 2.0) row["h"] = std::pow(2.0, 1.0 / *a.alpha) * rows[i].value;
    seq.push_back(row);
  }
  summary["best_value"] = best;
  if (gamma >= 1.0) summary["closed_form"] = kd_closed_form(gamma);
  summary["sequence"] = seq;

  if (c.format == "json") {
    write_json_file(c.out, summary);
  } else {
    Sink out(c.out);
    out.os() << "d,L,gamma,alpha,value,converged,restarts\n";
    for (const auto& r : rows)
      out.os() << a.d << ',' << r.L << ',' << fmt_double(gamma) << ',' << (a.alpha ? fmt_double(*a.alpha) : "")
               << ',' << fmt_double(r.value) << ',' << (r.converged ? "true" : "false") << ',' << r.restarts << '\n';
  }
  if (!a.summary.empty()) write_json_file(a.summary, summary);
  return 0;
}

struct DecomposeArgs {
  std::optional<double> b;
  bool schedule = false;
  double kappa = 0.05;
  double eps = 0.1;
  std::string summary;
};

int cmd_decompose(const Common& c, const NetworkSource& src, const DecomposeArgs& a, const LanczosOptions& base) {
  if (a.b.has_value() == a.schedule) throw Error(Errc::invalid_parameters, "give exactly one of --b or --schedule");
  const auto net = load_network(src, c.seed);
  const double alpha = net.params().alpha;
  const auto p = a.schedule ? DecompositionParams::schedule(net.graph().n(), alpha, a.kappa)
                            : DecompositionParams::fixed(alpha, *a.b);
  const auto dec = decompose(net, p);
  LanczosOptions opt = base;
  opt.seed = derive_seed(c.seed, stream::solver);
  const auto eig = lambda_max(SparseSym::from_network(net), opt);
  const auto cs = component_stats(net, dec, eig.f);
  const auto lr = localization_report(net, eig.f, a.eps);

  auto count = [](const EdgeMask& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)); };
  bool partition = true, acyclic = true;
  for (EdgeId e = 0; e < dec.kept.size(); ++e)
    partition = partition && (dec.tree[e] + dec.excess[e] + dec.small[e] == 1);
  for (std::size_t k = 0; k < dec.parts.count(); ++k)
    if (!dec.parts.edges[k].empty()) acyclic = acyclic && dec.tree_edges[k].size() + 1 == dec.parts.vertices[k].size();

  json summary{{"n", net.graph().n()},
               {"d", net.graph().d()},
               {"alpha", alpha},
               {"b", p.b},
               {"threshold", p.threshold()},
               {"schedule", a.schedule},
               {"kappa", a.schedule ? json(p.kappa) : json(nullptr)},
               {"a_n", a.schedule ? json(p.a) : json(nullptr)},
               {"a_tilde", p.a_tilde ? json(*p.a_tilde) : json(nullptr)},
               {"kept_edges", count(dec.kept)},
               {"small_edges", count(dec.small)},
               {"tree_edges", count(dec.tree)},
               {"excess_edges", count(dec.excess)},
               {"components", cs.components.size()},
               {"max_component_edges", max_component_edges(dec.parts)},
               {"lambda1", eig.lambda},
               {"residual", eig.residual},
               {"isolated_mass", cs.isolated_mass},
               {"eps", a.eps},
               {"min_support", lr.min_support_size},
               {"top_edge_mass", lr.top_edge_mass},
               {"masks_partition_edges", partition},
               {"tree_part_acyclic", acyclic},
               {"F_convention", "directed edges"}};

  if (c.format == "json") {
    write_json_file(c.out, summary);
  } else {
    Sink out(c.out);
    // F sums over directed edges, i.e. twice each undirected tree edge.
    out.os() << "component,vertices,edges,excess,S,x,F,M\n";
    for (const auto& k : cs.components)
      out.os() << k.component << ',' << k.vertex_count << ',' << k.edge_count << ',' << k.excess_count << ','
               << fmt_double(k.S) << ',' << fmt_double(k.x) << ',' << (k.F ? fmt_double(*k.F) : "") << ','
               << fmt_double(k.M) << '\n';
  }
  if (!a.summary.empty()) write_json_file(a.summary, summary);
  return 0;
}

struct TailArgs {
  std::size_t m = 1;
  double L = 5.0;
  double b = 2.0;
  double C = 1.0;
  std::optional<double> alpha;
  std::size_t samples = 1000000;
};

int cmd_tailbound(const Common& c, const TailArgs& a) {
  const double bound = weibull_sum_bound({a.m, a.L, a.b, a.C});
  std::optional<TailEstimate> est;
  if (a.alpha) est = mc_sum_tail(*a.alpha, a.m, a.L, a.b, a.samples, c.seed);
  Sink out(c.out);
  if (c.format == "json") {
    json j{{"m", a.m}, {"L", a.L}, {"b", a.b}, {"C", a.C}, {"bound", bound}};
    if (est)
      j["monte_carlo"] = {{"alpha", *a.alpha},        {"samples", est->trials}, {"hits", est->hits},
                          {"estimate", est->estimate}, {"ci_low", est->ci_low},  {"ci_high", est->ci_high},
                          {"below_bound", est->ci_high <= bound}};
    out.os() << j.dump(2) << '\n';
  } else {
    out.os() << "m,L,b,C,bound,alpha,samples,estimate,ci_low,ci_high\n"
             << a.m << ',' << fmt_double(a.L) << ',' << fmt_double(a.b) << ',' << fmt_double(a.C) << ','
             << fmt_double(bound);
    if (est)
      out.os() << ',' << fmt_double(*a.alpha) << ',' << est->trials << ',' << fmt_double(est->estimate) << ','
               << fmt_double(est->ci_low) << ',' << fmt_double(est->ci_high);
    else
      out.os() << ",,,,,";
    out.os() << '\n';
  }
  return 0;
}

int cmd_experiment(const Common& c, const std::string& path, bool out_set, const std::string& summary) {
  std::string text;
  {
    auto in = open_input(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto cfg = parse_config_text(text);
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "config: " << v << '\n';
    return kExitConfig;
  }
  if (out_set) cfg.csv_path = c.out;
  if (!summary.empty()) cfg.summary_path = summary;
  const auto r = run(cfg, c.threads);
  write_outputs(cfg, r);
  if (cfg.csv_path.empty() || cfg.csv_path == "-") write_csv(std::cout, r.records);
  for (const auto& ch : r.checks)
    std::cerr << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << '\n';
  return 0;
}

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::invalid_parameters:
    case Errc::parse_error:
    case Errc::domain_error:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted random regular graphs: generation, spectra, tree variational problem, decomposition"};
  app.require_subcommand(1);

  Common common;
  LanczosOptions lanczos;
  auto add_lanczos = [&](CLI::App* s) {
    s->add_option("--tol", lanczos.tol, "eigensolver tolerance");
    s->add_option("--max-iter", lanczos.max_iter, "eigensolver operator applications");
    s->add_option("--basis", lanczos.basis, "Krylov basis size before restart");
  };

  std::size_t gen_n = 1000, gen_d = 3;
  std::optional<double> gen_alpha;
  auto* gen = app.add_subcommand("gen", "generate a random regular graph or weighted network");
  add_common(gen, common);
  gen->add_option("--n", gen_n, "vertex count");
  gen->add_option("--d", gen_d, "degree");
  gen->add_option("--alpha", gen_alpha, "attach Weibull weights with this shape");

  NetworkSource src;
  bool with_vector = false;
  auto* eigen = app.add_subcommand("eigen", "largest eigenvalue of a weighted network");
  add_common(eigen, common);
  add_network_source(eigen, src);
  add_lanczos(eigen);
  eigen->add_flag("--vector", with_vector, "also emit the top eigenvector");

  VariationalArgs va;
  SolveOptions so;
  auto* var = app.add_subcommand("variational", "tree variational problem K_d^(L)(gamma) and h_d(alpha)");
  add_common(var, common);
  var->add_option("--d", va.d, "tree degree");
  var->add_option("--max-depth,--L", va.max_depth, "largest depth L");
  var->add_option("--gamma", va.gamma, "exponent gamma >= 1/2");
  var->add_option("--alpha", va.alpha, "Weibull shape; solves at gamma = beta/2 and reports h_d");
  var->add_option("--mode", va.mode, "solver mode")->check(CLI::IsMember({"automatic", "full", "level-reduced"}));
  var->add_option("--restarts", so.restarts, "starts per depth");
  var->add_option("--tolerance", so.tolerance, "projected-gradient tolerance");
  var->add_option("--summary", va.summary, "also write the JSON summary here");

  DecomposeArgs da;
  auto* dec = app.add_subcommand("decompose", "truncation, tree-excess split and component statistics");
  add_common(dec, common);
  add_network_source(dec, src);
  add_lanczos(dec);
  dec->add_option("--b", da.b, "truncation level b (keep |W| > b^(1/alpha))");
  dec->add_flag("--schedule", da.schedule, "use the b_n schedule");
  dec->add_option("--kappa", da.kappa, "schedule exponent slack");
  dec->add_option("--eps", da.eps, "mass shortfall for the support size");
  dec->add_option("--summary", da.summary, "also write the JSON summary here");

  TailArgs ta;
  auto* tail = app.add_subcommand("tailbound", "Weibull-sum tail bound, optionally against Monte Carlo");
  add_common(tail, common);
  tail->add_option("--m", ta.m, "number of summands");
  tail->add_option("--L", ta.L, "threshold");
  tail->add_option("--b", ta.b, "conditioning level");
  tail->add_option("--C", ta.C, "tail constant");
  tail->add_option("--alpha", ta.alpha, "Weibull shape for the Monte Carlo estimate");
  tail->add_option("--samples", ta.samples, "Monte Carlo draws");

  std::string config_path, exp_summary;
  auto* exp = app.add_subcommand("experiment", "run a JSON experiment config");
  add_common(exp, common);
  exp->add_option("--config", config_path, "config file")->required();
  exp->add_option("--summary", exp_summary, "summary path (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen(common, gen_n, gen_d, gen_alpha);
    if (*eigen) return cmd_eigen(common, src, lanczos, with_vector);
    if (*var) return cmd_variational(common, va, so);
    if (*dec) return cmd_decompose(common, src, da, lanczos);
    if (*tail) return cmd_tailbound(common, ta);
    if (*exp) return cmd_experiment(common, config_path, exp->count("--out") > 0, exp_summary);
  } catch (const Error& e) {
    std::cerr << "wrg: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "wrg: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

#include "matchmix/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "matchmix/analysis.hpp"
#include "matchmix/error.hpp"
#include "matchmix/parallel.hpp"
#include "matchmix/quasitree.hpp"
#include "matchmix/report.hpp"
#include "matchmix/verify.hpp"
#include "matchmix/walk.hpp"

namespace matchmix::cli {
namespace {

struct Options {
  std::string family = "cycle";
  std::vector<long long> n;
  int dim = 2;
  int d = 3;
  std::optional<double> eps;
  std::string eps_rule;
  std::optional<std::uint64_t> seed;
  std::vector<double> theta;
  std::size_t t_max = 100000;
  std::optional<std::size_t> trials;
  int R = 0;
  int K = 0;
  int M = 1;
  std::string out;
  unsigned jobs = default_jobs();
  bool lazy = false;
  bool all_starts = false;
  std::size_t starts = 64;
  std::size_t replicates = 1;
  bool predict = false;
  bool curve = false;
  std::vector<std::string> suites;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("MATCHMIX_SEED")) {
    try {
      std::size_t used = 0;
      auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidParameter("MATCHMIX_SEED is not an unsigned integer");
  }
  return 1;
}

FamilySpec resolve_family(const Options& o) {
  if (o.family.find(':') != std::string::npos) return parse_family(o.family);
  if (o.family == "torus") return parse_family("torus:" + std::to_string(o.dim));
  if (o.family == "random-regular") return parse_family("random-regular:" + std::to_string(o.d));
  if (o.family == "lamplighter") return parse_family("lamplighter:cycle");
  return parse_family(o.family);
}

EpsRule resolve_eps(const Options& o) {
  if (o.eps && !o.eps_rule.empty()) throw InvalidParameter("give either --eps or --eps-rule, not both");
  if (o.eps) {
    if (!(*o.eps > 0.0 && *o.eps <= 1.0)) throw InvalidParameter("--eps must lie in (0, 1]");
    EpsRule r;
    r.value = *o.eps;
    return r;
  }
  if (!o.eps_rule.empty()) return parse_eps_rule(o.eps_rule);
  throw InvalidParameter("--eps or --eps-rule is required");
}

std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path p(o.out);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec) throw InvalidPath("cannot create output directory " + o.out + ": " + ec.message());
  return p;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw InvalidPath("cannot write " + p.string());
  return f;
}

void emit(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

Json with_meta(const Metadata& m, const Json& body) {
  Json j{{"meta", to_json(m)}};
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

ExperimentConfig experiment(const Options& o) {
  ExperimentConfig cfg;
  cfg.family = resolve_family(o);
  cfg.sizes = o.n;
  cfg.eps = resolve_eps(o);
  if (!o.theta.empty()) cfg.thetas = o.theta;
  const std::uint64_t seed = resolve_seed(o);
  cfg.seeds.clear();
  for (std::size_t i = 0; i < std::max<std::size_t>(1, o.replicates); ++i) cfg.seeds.push_back(seed + i);
  cfg.t_max = o.t_max;
  cfg.start_sample = o.starts;
  cfg.all_starts = o.all_starts;
  cfg.lazy = o.lazy;
  cfg.jobs = std::max(1u, o.jobs);
  cfg.predict = o.predict;
  cfg.K = o.K;
  cfg.M = o.M;
  if (o.trials) cfg.speed_walks = *o.trials;
  cfg.validate();
  return cfg;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n.size() != 1) throw InvalidParameter("generate needs exactly one --n");
  const std::uint64_t seed = resolve_seed(o);
  auto spec = resolve_family(o);
  Rng rng = make_stream(seed, 0);
  Graph g = build_family(spec, o.n.front(), rng);
  Matching m = sample_uniform_matching(static_cast<int>(g.vertex_count()), rng);
  Json config{{"command", "generate"}, {"family", spec.name()}, {"n", o.n.front()}, {"seed", seed}};
  auto meta = make_metadata(config, seed);
  auto diam = diameter(g);
  Json body{{"config", config},
            {"vertices", g.vertex_count()},
            {"edges", g.edge_count()},
            {"max_degree", g.max_degree()},
            {"diameter", diam.value},
            {"diameter_exact", diam.exact}};
  if (!o.out.empty()) {
    auto dir = out_dir(o);
    auto gf = open_out(dir / "graph.txt");
    write_header(gf, meta);
    write_edge_list(gf, g);
    auto mf = open_out(dir / "matching.txt");
    write_header(mf, meta);
    write_matching(mf, m);
    body["files"] = Json::array({(dir / "graph.txt").string(), (dir / "matching.txt").string()});
    err << "wrote " << (dir / "graph.txt").string() << "\n";
  }
  emit(out, with_meta(meta, body));
  return kOk;
}

int cmd_mix_or_scan(const Options& o, bool scan, std::ostream& out, std::ostream& err) {
  if (o.n.empty()) throw InvalidParameter("--n is required");
  if (!scan && o.n.size() != 1) throw InvalidParameter("mix takes a single --n; use scan for several");
  ExperimentConfig cfg = experiment(o);
  Json config = to_json(cfg);
  config["command"] = scan ? "scan" : "mix";
  auto meta = make_metadata(config, cfg.seeds.front());
  err << (scan ? "scan" : "mix") << ": " << cfg.family.name() << " sizes=" << cfg.sizes.size()
      << " eps=" << cfg.eps.describe() << "\n";
  CutoffReport rep = scan ? phase_scan(cfg) : cutoff_profile(cfg);
  Json body = to_json(rep);
  body["config"]["command"] = config["command"];
  if (!o.out.empty()) {
    auto dir = out_dir(o);
    auto jf = open_out(dir / "report.json");
    emit(jf, with_meta(meta, body));
    auto mf = open_out(dir / "mix.csv");
    write_mix_table_csv(mf, rep, meta);
    auto wf = open_out(dir / "widths.csv");
    write_widths_csv(wf, rep, meta);
    auto ef = open_out(dir / "estimators.csv");
    write_estimators_csv(ef, rep, meta);
    if (o.curve && !scan) {
      // Recompute the single curve for the file; the report keeps only t_mix.
      Rng rng = make_stream(cfg.seeds.front(), static_cast<std::uint64_t>(cfg.sizes.front()));
      auto g = std::make_shared<const Graph>(build_family(cfg.family, cfg.sizes.front(), rng));
      GStar gs(g, sample_uniform_matching(static_cast<int>(g->vertex_count()), rng), rep.rows.front().eps);
      Kernel k(gs, cfg.lazy);
      auto starts = cfg.all_starts ? all_starts(g->vertex_count()) : default_starts(k, rng, cfg.start_sample);
      ProfileOptions po;
      po.stop_below = 0.01;
      auto c = distance_profile(k, starts, cfg.t_max, po);
      auto cf = open_out(dir / "curve.csv");
      write_header(cf, meta);
      write_mix_curve_csv(cf, c);
    }
    err << "wrote report files to " << dir.string() << "\n";
  }
  emit(out, with_meta(meta, body));
  return rep.partial ? kNotMixed : kOk;
}

int cmd_quasitree(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n.size() != 1) throw InvalidParameter("quasitree needs exactly one --n");
  EpsRule rule = resolve_eps(o);
  const std::uint64_t seed = resolve_seed(o);
  auto spec = resolve_family(o);
  Rng rng = make_stream(seed, 0);
  auto g = std::make_shared<const Graph>(build_family(spec, o.n.front(), rng));
  const double eps = rule.eps(static_cast<double>(g->vertex_count()));
  const int R = o.R > 0 ? o.R : static_cast<int>(std::ceil(4.0 / eps));
  const std::size_t walks = o.trials.value_or(200);
  if (walks == 0) throw InvalidParameter("--trials must be positive");
  if (o.M < 1) throw InvalidParameter("--M must be >= 1");
  if (o.K < 0) throw InvalidParameter("--K must be >= 0");
  Json config{{"command", "quasitree"}, {"family", spec.name()}, {"n", o.n.front()}, {"eps", eps},
              {"R", R}, {"K", o.K}, {"M", o.M}, {"trials", walks}, {"seed", seed}};
  auto meta = make_metadata(config, seed);
  err << "quasitree: delta\n";
  auto delta = estimate_delta(g, R, eps, walks, 10, rng);
  err << "quasitree: speed\n";
  SpeedOptions so;
  so.K = o.K;
  const auto horizon = static_cast<std::size_t>(std::ceil(400.0 / eps));
  auto speed = estimate_speed(g, R, eps, std::max<std::size_t>(10, walks / 10), horizon, rng, so);
  err << "quasitree: entropy\n";
  EntropyRateParams ep;
  ep.K = o.K;
  ep.phi_increment_mean = speed.mean_phi_increment;
  auto ent = estimate_entropy_rate(g, R, eps, ep, rng);
  QuasiTree qt(g, R, eps, rng);
  auto theta = estimate_theta_tilde(qt, o.M, walks, rng);
  double theta_max = 0.0;
  for (const auto& [edge, f] : theta) theta_max = std::max(theta_max, f);
  const double ln = std::log(static_cast<double>(g->vertex_count()));
  Json body{{"config", config},
            {"delta_hat", delta.delta_hat},
            {"delta_ci", delta.ci},
            {"nu_hat", speed.nu_hat},
            {"nu_ci", speed.ci},
            {"sigma_increment_mean", speed.mean_sigma_increment},
            {"phi_increment_mean", speed.mean_phi_increment},
            {"increments", speed.increments},
            {"h_hat", ent.h_hat},
            {"h_surrogate_h1", ent.h_surrogate_h1},
            {"h_mc", ent.h_mc ? Json(*ent.h_mc) : Json(nullptr)},
            {"h_mc_ci", ent.h_mc_ci ? Json(*ent.h_mc_ci) : Json(nullptr)},
            {"V_hat", ent.V_hat},
            {"mc_skipped", ent.mc_skipped},
            {"theta_tilde_edges", theta.size()},
            {"theta_tilde_max", theta_max},
            {"t0_pred", speed.nu_hat > 0 && ent.h_hat > 0 ? Json(ln / (speed.nu_hat * ent.h_hat)) : Json(nullptr)}};
  if (!o.out.empty()) {
    auto dir = out_dir(o);
    auto jf = open_out(dir / "quasitree.json");
    emit(jf, with_meta(meta, body));
  }
  emit(out, with_meta(meta, body));
  return kOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> known{"exactness", "reversal", "pairing", "heat-kernel", "sandwich",
                                              "lamplighter"};
  std::vector<std::string> suites = o.suites.empty() ? known : o.suites;
  for (const auto& s : suites)
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw InvalidParameter("unknown suite '" + s + "'");
  const std::uint64_t seed = resolve_seed(o);
  Json config{{"command", "verify"}, {"suites", suites}, {"seed", seed},
              {"trials", o.trials ? Json(*o.trials) : Json(nullptr)}};
  auto meta = make_metadata(config, seed);
  Json results = Json::array();
  bool all = true;
  for (const auto& s : suites) {
    SuiteResult r;
    if (s == "exactness") r = exactness_suite(o.trials.value_or(50), seed);
    if (s == "reversal") r = reversal_suite(o.trials.value_or(10000), 10, seed);
    if (s == "pairing") r = pairing_suite(o.trials.value_or(100000), seed);
    if (s == "heat-kernel") r = heat_kernel_suite();
    if (s == "sandwich") r = sandwich_suite(o.trials.value_or(20), seed);
    if (s == "lamplighter") r = lamplighter_suite(o.trials.value_or(20000), seed);
    err << r.line() << "\n";
    for (const auto& note : r.notes) err << "  " << note << "\n";
    all = all && r.passed;
    results.push_back(Json{{"suite", r.name},
                           {"passed", r.passed},
                           {"line", r.line()},
                           {"checks", r.checks},
                           {"failed", r.failed},
                           {"notes", r.notes}});
  }
  Json body{{"config", config}, {"suites", results}, {"passed", all}};
  if (!o.out.empty()) {
    auto dir = out_dir(o);
    auto jf = open_out(dir / "verify.json");
    emit(jf, with_meta(meta, body));
  }
  emit(out, with_meta(meta, body));
  return all ? kOk : kFailure;
}

void add_graph_flags(CLI::App* sub, Options& o) {
  sub->add_option("--family", o.family, "cycle | torus | random-regular | lamplighter (or family:arg)");
  sub->add_option("--dim", o.dim, "torus dimension")->check(CLI::PositiveNumber);
  sub->add_option("--d", o.d, "random-regular degree");
}

void add_common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "master seed (default: $MATCHMIX_SEED, else 1)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Random walks on graphs augmented with an eps-weighted random matching"};
  app.require_subcommand(1);
  app.set_config("--config", "", "configuration file (TOML; flags override)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto* gen = app.add_subcommand("generate", "build a graph and a uniform matching");
  add_graph_flags(gen, o);
  gen->add_option("--n", o.n, "vertex count (base size for lamplighters)")->expected(1);
  add_common_flags(gen, o);

  auto* mix = app.add_subcommand("mix", "mixing profile of one instance");
  auto* scan = app.add_subcommand("scan", "mixing profiles across sizes and eps regimes");
  for (auto* sub : {mix, scan}) {
    add_graph_flags(sub, o);
    sub->add_option("--n", o.n, "vertex counts")->expected(1, 1 << 20);
    sub->add_option("--eps", o.eps, "fixed eps in (0, 1]");
    sub->add_option("--eps-rule", o.eps_rule, "fixed:<e> | power:<a> | inv-log:<c> | exp-g:<sqrt-log|log-log>");
    sub->add_option("--theta", o.theta, "TV thresholds")->expected(1, 64);
    sub->add_option("--t-max", o.t_max, "horizon")->check(CLI::PositiveNumber);
    sub->add_option("--starts", o.starts, "sampled start vertices");
    sub->add_flag("--all-starts", o.all_starts, "use every start vertex");
    sub->add_flag("--lazy", o.lazy, "lazy walk");
    sub->add_option("--replicates", o.replicates, "seeds seed, seed+1, ...")->check(CLI::PositiveNumber);
    sub->add_flag("--predict", o.predict, "quasi-tree prediction of t0");
    sub->add_option("--trials", o.trials, "walks for the speed estimate");
    sub->add_option("--K", o.K, "regeneration level offset");
    sub->add_option("--M", o.M, "theta-tilde level");
    add_common_flags(sub, o);
  }
  mix->add_flag("--curve", o.curve, "also write the full curve (needs --out)");

  auto* qt = app.add_subcommand("quasitree", "quasi-tree estimates of delta, speed and entropy rate");
  add_graph_flags(qt, o);
  qt->add_option("--n", o.n, "vertex count")->expected(1);
  qt->add_option("--eps", o.eps, "fixed eps in (0, 1]");
  qt->add_option("--eps-rule", o.eps_rule, "eps rule");
  qt->add_option("--R", o.R, "ball radius (default ceil(4/eps))");
  qt->add_option("--K", o.K, "regeneration level offset");
  qt->add_option("--M", o.M, "theta-tilde level");
  qt->add_option("--trials", o.trials, "walks");
  add_common_flags(qt, o);

  auto* ver = app.add_subcommand("verify", "deterministic verification suites");
  ver->add_option("--suite", o.suites, "exactness | reversal | pairing | heat-kernel | sandwich | lamplighter");
  ver->add_option("--trials", o.trials, "suite size (instances, paths or samples)");
  add_common_flags(ver, o);

  // --config belongs to the top-level app; accept it after the subcommand too.
  std::vector<std::string> front, rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      front.push_back(args[i]);
      front.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      front.push_back(args[i]);
    } else {
      rest.push_back(args[i]);
    }
  }
  front.insert(front.end(), rest.begin(), rest.end());
  std::vector<std::string> rev(front.rbegin(), front.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInvalid;
  }

  try {
    if (gen->parsed()) return cmd_generate(o, out, err);
    if (mix->parsed()) return cmd_mix_or_scan(o, false, out, err);
    if (scan->parsed()) return cmd_mix_or_scan(o, true, out, err);
    if (qt->parsed()) return cmd_quasitree(o, out, err);
    if (ver->parsed()) return cmd_verify(o, out, err);
  } catch (const InvalidParameter& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidPath& e) {
    err << "invalid path: " << e.what() << "\n";
    return kInvalid;
  } catch (const NotMixedByHorizon& e) {
    err << "not mixed by horizon: " << e.what() << "\n";
    return kNotMixed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kInvalid;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace matchmix::cli

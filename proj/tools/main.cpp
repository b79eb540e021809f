// Batch driver: builds curves, clouds, cube systems, coefficient fields,
// Carleson reports, and corona decompositions from a JSON config, writing
// per-module export files plus a run manifest with content hashes.

#include "hrect/carleson.hpp"
#include "hrect/cloud.hpp"
#include "hrect/coeff.hpp"
#include "hrect/corona.hpp"
#include "hrect/curve.hpp"
#include "hrect/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hrect;

namespace {

constexpr const char* kVersion = "hrect 0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json default_config() {
  return json{
      {"n", 1},
      {"k", 1},
      {"curve", {{"c0", 0.2}, {"generations", 5}}},
      {"cloud",
       {{"source", "curve"},
        {"step", 0.0},
        {"levels", 6},
        {"path", ""},
        {"slope", 0.01},
        {"ripple", 2e-12},
        {"ripple_wavelength", 0.37},
        {"points", 512},
        {"angle", 0.5},
        {"resolution", 0.01}}},
      {"cubes", {{"rho", 0.5}, {"lambda", 2.0}}},
      {"coeff",
       {{"families", json::array({"beta_hat"})}, {"p", "1"}, {"restarts", 6},
        {"grid", 48}}},
      {"carleson",
       {{"q", 2.0}, {"A", 5.0}, {"level_lo", 0}, {"level_hi", 8},
        {"experiment", "dichotomy"}}},
      {"corona",
       {{"eta", 0.1}, {"epsilon", 0.025}, {"k0", 4.0}, {"k", 89.0},
        {"pc_samples", 2000}}},
      {"seed", 1},
      {"threads", 0},
  };
}

void merge_into(json& base, const json& user, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key()))
      throw ConfigError("unknown config field: " + key);
    if (base[it.key()].is_object() && it->is_object())
      merge_into(base[it.key()], *it, key);
    else
      base[it.key()] = *it;
  }
}

void validate_config(const json& cfg) {
  const int n = cfg["n"], k = cfg["k"];
  if (k < 1 || k > n)
    throw ConfigError("n,k: the ambient parameters require 1 <= k <= n");
  const double c0 = cfg["curve"]["c0"];
  if (!(c0 > 0.0) || c0 > 0.2)
    throw ConfigError("curve.c0: need 0 < c0 <= 0.2");
  const int gens = cfg["curve"]["generations"];
  if (gens < 0 || gens > 8)
    throw ConfigError("curve.generations: need 0 <= generations <= 8");
  const double rho = cfg["cubes"]["rho"];
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("cubes.rho: need rho in (0,1)");
  const double lambda = cfg["cubes"]["lambda"];
  if (!(lambda >= 1.0)) throw ConfigError("cubes.lambda: need lambda >= 1");
  CoronaParams p;
  p.eta = cfg["corona"]["eta"];
  p.epsilon = cfg["corona"]["epsilon"];
  p.k0 = cfg["corona"]["k0"];
  p.k_big = cfg["corona"]["k"];
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("corona: ") + e.what());
  }
  const std::string src = cfg["cloud"]["source"];
  if (src != "curve" && src != "flat" && src != "cantor" && src != "graph" &&
      src != "two_segment" && src != "file" && src != "curve_file")
    throw ConfigError("cloud.source: unknown source '" + src + "'");
  const std::string pp = cfg["coeff"]["p"];
  if (pp != "1" && pp != "inf") throw ConfigError("coeff.p: must be \"1\" or \"inf\"");
}

CurveConfig curve_config(const json& cfg) {
  return CurveConfig(cfg["curve"]["c0"], 8);
}

PointCloud build_cloud(const json& cfg) {
  const json& cl = cfg["cloud"];
  const std::string src = cl["source"];
  if (src == "curve") {
    const CurveConfig cc = curve_config(cfg);
    const int gens = cfg["curve"]["generations"];
    const PlanarPolyline pl = build_planar_generation(cc, gens);
    double step = cl["step"];
    if (step <= 0.0) step = pl.segment_length;
    return cloud_from_polyline(lift_horizontal(pl, {-1, 0, 0}), step);
  }
  if (src == "flat") return flat_segment_cloud(cl["points"]);
  if (src == "cantor") return cantor_vertical(cl["levels"]);
  if (src == "graph")
    return tilted_graph_cloud(cl["slope"], cl["points"], cl["ripple"],
                              cl["ripple_wavelength"]);
  if (src == "two_segment") return two_segment_cloud(cl["angle"], cl["points"]);
  const std::string path = cl["path"];
  if (!fs::exists(path))
    throw std::runtime_error("cloud.path: missing input file " + path);
  if (src == "curve_file") {
    const HorizontalPolyline g = read_curve(path);
    double step = cl["step"];
    if (step <= 0.0) {
      step = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i + 1 < g.v.size(); ++i)
        step = std::min(step, (g.v[i + 1].head<2>() - g.v[i].head<2>()).norm());
    }
    return cloud_from_polyline(g, step);
  }
  return read_cloud(path, cfg["n"], cfg["k"], cl["resolution"]);
}

CoeffOptions coeff_options(const json& cfg) {
  CoeffOptions o;
  o.restarts = cfg["coeff"]["restarts"];
  o.grid = cfg["coeff"]["grid"];
  o.seed = cfg["seed"].get<std::uint64_t>();
  return o;
}

CoronaParams corona_params(const json& cfg) {
  CoronaParams p;
  p.eta = cfg["corona"]["eta"];
  p.epsilon = cfg["corona"]["epsilon"];
  p.k0 = cfg["corona"]["k0"];
  p.k_big = cfg["corona"]["k"];
  return p;
}

CoeffKind parse_kind(const std::string& family, const std::string& p) {
  const double pv = p == "inf" ? kPInf : 1.0;
  if (family == "beta") return {CoeffFamily::BetaHorizontal, pv};
  if (family == "beta_hat") return {CoeffFamily::BetaStratified, pv};
  if (family == "beta_proj_v") return {CoeffFamily::BetaProjHorizontal, pv};
  if (family == "beta_proj_a") return {CoeffFamily::BetaProjAffine, pv};
  if (family == "iota") return {CoeffFamily::Iota, pv};
  throw ConfigError("coeff.families: unknown family '" + family + "'");
}

struct Manifest {
  json j;
  fs::path dir;

  Manifest(const fs::path& out, const std::string& sub, const json& cfg) : dir(out) {
    fs::create_directories(out);
    j["tool"] = kVersion;
    j["subcommand"] = sub;
    j["config"] = cfg;
    j["config_hash"] = fnv1a_bytes(cfg.dump());
    j["outputs"] = json::array();
  }

  std::string file(const std::string& name) { return (dir / name).string(); }

  void record(const std::string& name) {
    const std::string path = (dir / name).string();
    j["outputs"].push_back(
        {{"path", name}, {"bytes", fs::file_size(path)}, {"fnv1a", fnv1a_file(path)}});
  }

  void close() {
    std::ofstream f(dir / "manifest.json");
    f << j.dump(1) << '\n';
  }
};

int run_curve(const json& cfg, Manifest& man) {
  const CurveConfig cc = curve_config(cfg);
  const int gens = cfg["curve"]["generations"];
  const HorizontalPolyline g =
      lift_horizontal(build_planar_generation(cc, gens), {-1, 0, 0});
  write_curve(man.file("curve.txt"), g);
  man.record("curve.txt");
  std::cout << "curve: generation " << gens << ", " << g.v.size() << " vertices, length "
            << fmt17(planar_length(g)) << "\n";
  return 0;
}

int run_cloud(const json& cfg, Manifest& man) {
  const PointCloud c = build_cloud(cfg);
  write_cloud(man.file("cloud.txt"), c);
  man.record("cloud.txt");
  std::cout << "cloud: " << c.size() << " points, mass " << fmt17(c.total_mass())
            << ", resolution " << fmt17(c.resolution) << "\n";
  return 0;
}

int run_cubes(const json& cfg, Manifest& man) {
  const PointCloud c = build_cloud(cfg);
  const CubeTree tree = christ_cubes(c, cfg["cubes"]["rho"]);
  const ChristCheck chk = verify_christ(tree, c);
  write_cube_tree_json(man.file("cubes.json"), tree);
  man.record("cubes.json");
  const double sb = small_boundary_constant(tree, c, {0.05, 0.1, 0.2, 0.4});
  std::cout << "cubes: " << tree.cubes.size() << " cubes in " << tree.gen_count()
            << " generations, D = " << fmt17(tree.empirical_D)
            << ", small-boundary constant " << fmt17(sb) << " (measured), properties "
            << (chk.partition_ok && chk.nesting_ok && chk.diam_ok && chk.inner_ball_ok
                    ? "ok"
                    : "VIOLATED")
            << "\n";
  return chk.partition_ok && chk.nesting_ok ? 0 : 1;
}

int run_coeff(const json& cfg, Manifest& man, int threads) {
  const PointCloud c = build_cloud(cfg);
  const CubeTree tree = christ_cubes(c, cfg["cubes"]["rho"]);
  const CoeffOptions opts = coeff_options(cfg);
  for (const auto& fam : cfg["coeff"]["families"]) {
    const CoeffKind kind = parse_kind(fam, cfg["coeff"]["p"]);
    const CoeffField field =
        evaluate_field(c, tree, kind, cfg["cubes"]["lambda"], opts, threads);
    const std::string name = std::string("coeff_") + family_name(kind.family) +
                             (kind.p == kPInf ? "_inf" : "_1") + ".csv";
    write_coeff_csv(man.file(name), tree, field);
    man.record(name);
    std::cout << "coeff: wrote " << name << " over " << tree.cubes.size() << " cubes\n";
  }
  return 0;
}

int run_carleson(const json& cfg, Manifest& man, int threads) {
  const std::string exp = cfg["carleson"]["experiment"];
  const CoeffOptions opts = coeff_options(cfg);
  if (exp == "dichotomy") {
    const DichotomyReport rep = dichotomy_experiment(
        curve_config(cfg), cfg["curve"]["generations"], cfg["carleson"]["A"],
        cfg["carleson"]["level_lo"], cfg["carleson"]["level_hi"], opts, threads);
    write_levels_csv(man.file("carleson_beta1_sq.csv"), "beta1_sq", rep.beta_levels);
    write_levels_csv(man.file("carleson_bhat1_4.csv"), "bhat1_4", rep.bhat_levels);
    write_dichotomy_json(man.file("carleson_summary.json"), rep);
    man.record("carleson_beta1_sq.csv");
    man.record("carleson_bhat1_4.csv");
    man.record("carleson_summary.json");
    std::cout << "carleson: dichotomy over " << rep.cloud_points
              << " points, harmonic slope " << fmt17(rep.fit.slope) << "\n";
    return 0;
  }
  if (exp == "glem") {
    const PointCloud c = build_cloud(cfg);
    const CubeTree tree = christ_cubes(c, cfg["cubes"]["rho"]);
    const CoeffKind kind =
        parse_kind(cfg["coeff"]["families"].at(0), cfg["coeff"]["p"]);
    const CoeffField field =
        evaluate_field(c, tree, kind, cfg["cubes"]["lambda"], opts, threads);
    const std::vector<double> inc =
        glem_increments(tree, field, cfg["carleson"]["q"], tree.top());
    std::vector<MultiresLevel> levels;
    double partial = 0;
    for (size_t g = 0; g < inc.size(); ++g) {
      partial += inc[g];
      levels.push_back(MultiresLevel{tree.j0 + static_cast<int>(g), inc[g], partial,
                                     static_cast<int>(tree.generations[g].size())});
    }
    write_levels_csv(man.file("carleson_glem.csv"), family_name(kind.family), levels);
    man.record("carleson_glem.csv");
    std::cout << "carleson: glem sum " << fmt17(partial) << " over "
              << tree.cubes.size() << " cubes\n";
    return 0;
  }
  throw ConfigError("carleson.experiment: unknown experiment '" + exp + "'");
}

int run_corona(const json& cfg, Manifest& man) {
  const PointCloud c = build_cloud(cfg);
  const CubeTree tree = christ_cubes(c, cfg["cubes"]["rho"]);
  const CoronaParams params = corona_params(cfg);
  const CoeffOptions opts = coeff_options(cfg);
  GoodCubes gc = good_cubes(tree, c, params, opts);
  CoronaForest forest = build_forest(tree, c, std::move(gc), params);
  classify_trees(forest, tree, c);
  const PackingReport pack = packing_report(forest, tree);
  write_forest_json(man.file("forest.json"), forest, tree, pack);
  man.record("forest.json");

  Rng rng(cfg["seed"].get<std::uint64_t>());
  std::vector<PcReport> reports;
  int violations = 0;
  for (size_t ti = 0; ti < forest.trees.size(); ++ti) {
    reports.push_back(verify_pc(forest, static_cast<int>(ti), tree, c,
                                cfg["corona"]["pc_samples"], rng));
    violations += static_cast<int>(reports.back().violations.size());
  }
  write_pc_csv(man.file("pc_report.csv"), reports);
  man.record("pc_report.csv");
  std::cout << "corona: " << forest.trees.size() << " trees, packing bad "
            << fmt17(pack.bad_max) << ", tops " << fmt17(pack.tops12_max + pack.tops3_max)
            << ", pc violations " << violations << "\n";
  return violations == 0 ? 0 : 1;
}

int run_verify(const json& cfg, Manifest& man) {
  // smoke suite on the bundled flat-segment fixture
  int failures = 0;
  auto report = [&](const char* what, bool ok) {
    std::cout << (ok ? "ok: " : "FAIL: ") << what << "\n";
    if (!ok) ++failures;
  };
  Rng rng(cfg["seed"].get<std::uint64_t>());
  bool group_ok = true;
  for (int s = 0; s < 2000; ++s) {
    std::normal_distribution<double> g(0, 1);
    const HPoint a = hpoint(g(rng), g(rng), g(rng));
    const HPoint b = hpoint(g(rng), g(rng), g(rng));
    const HPoint cpt = hpoint(g(rng), g(rng), g(rng));
    const HPoint l = mul(mul(a, b), cpt), r = mul(a, mul(b, cpt));
    if ((l.z - r.z).cwiseAbs().maxCoeff() > 1e-12 || std::abs(l.t - r.t) > 1e-10)
      group_ok = false;
    if (std::abs(dist(mul(cpt, a), mul(cpt, b)) - dist(a, b)) > 1e-10) group_ok = false;
  }
  report("group axioms and left-invariance on 2000 samples", group_ok);

  const PointCloud c = flat_segment_cloud(256);
  const CubeTree tree = christ_cubes(c, 0.5);
  const ChristCheck chk = verify_christ(tree, c);
  report("christ cube properties on the flat fixture",
         chk.partition_ok && chk.nesting_ok && chk.diam_ok && chk.inner_ball_ok &&
             chk.mass_ok);
  const NetCheck nchk = verify_net(dyadic_net(c), c);
  report("dyadic net properties", nchk.nested_ok && nchk.separation_ok && nchk.covering_ok);

  const Region reg = whole_cloud_region(c);
  const double beta = optimize_coeff(c, reg, {CoeffFamily::BetaHorizontal, kPInf}).value;
  report("flat fixture is exactly flat", beta == 0.0);

  const CoronaParams params = CoronaParams::defaults(0.1);
  GoodCubes gcb = good_cubes(tree, c, params, coeff_options(cfg));
  CoronaForest forest = build_forest(tree, c, std::move(gcb), params);
  classify_trees(forest, tree, c);
  report("flat fixture coronizes into a single tree",
         forest.trees.size() == 1 &&
             forest.trees[0].cubes.size() == tree.cubes.size());

  std::ofstream f(man.file("verify.txt"));
  f << (failures == 0 ? "pass" : "fail") << "\n";
  man.record("verify.txt");
  return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) + " - Heisenberg multiscale flatness toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int threads_flag = -1;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed_flag, "random seed");
  app.add_option("--threads", threads_flag, "worker threads (0 = hardware)");

  int generations_flag = -1;
  std::string experiment_flag;
  for (const char* name :
       {"curve", "cloud", "cubes", "coeff", "carleson", "corona", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough(); // global flags may follow the subcommand
    if (std::string(name) == "carleson") {
      sub->add_option("--experiment", experiment_flag, "dichotomy|glem");
      sub->add_option("--generations", generations_flag, "curve generations");
    }
  }

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;
  const std::string sub = app.get_subcommands().front()->get_name();

  json cfg = default_config();
  try {
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 1;
      }
      json user;
      try {
        user = json::parse(f);
      } catch (const json::parse_error& e) {
        std::cerr << "error: config parse: " << e.what() << "\n";
        return 2;
      }
      merge_into(cfg, user, "");
    }
    // precedence: flag > environment > config
    if (const char* es = std::getenv("HRECT_SEED")) cfg["seed"] = std::strtoull(es, nullptr, 10);
    if (const char* et = std::getenv("HRECT_THREADS")) cfg["threads"] = std::atoi(et);
    if (seed_set) cfg["seed"] = seed_flag;
    if (threads_flag >= 0) cfg["threads"] = threads_flag;
    if (generations_flag >= 0) cfg["curve"]["generations"] = generations_flag;
    if (!experiment_flag.empty()) cfg["carleson"]["experiment"] = experiment_flag;
    validate_config(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return 2;
  }

  int threads = cfg["threads"];
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  try {
    Manifest man(out_dir, sub, cfg);
    int status = 0;
    if (sub == "curve") status = run_curve(cfg, man);
    else if (sub == "cloud") status = run_cloud(cfg, man);
    else if (sub == "cubes") status = run_cubes(cfg, man);
    else if (sub == "coeff") status = run_coeff(cfg, man, threads);
    else if (sub == "carleson") status = run_carleson(cfg, man, threads);
    else if (sub == "corona") status = run_corona(cfg, man);
    else if (sub == "verify") status = run_verify(cfg, man);
    man.close();
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

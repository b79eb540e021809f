#include "hrect/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hrect {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

} // namespace

void write_curve(const std::string& path, const HorizontalPolyline& gamma) {
  std::ofstream f = open_out(path);
  for (const auto& v : gamma.v)
    f << fmt17(v.x()) << ' ' << fmt17(v.y()) << ' ' << fmt17(v.z()) << '\n';
}

HorizontalPolyline read_curve(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open curve file: " + path);
  HorizontalPolyline g;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    double x, y, t;
    if (!(is >> x >> y >> t))
      throw std::runtime_error("curve line has wrong field count in " + path);
    g.v.push_back({x, y, t});
  }
  if (g.v.size() < 2) throw std::runtime_error("curve file too short: " + path);
  return g;
}

void write_cloud(const std::string& path, const PointCloud& c) {
  std::ofstream f = open_out(path);
  for (int i = 0; i < c.size(); ++i) {
    for (int r = 0; r < c.z.rows(); ++r) f << fmt17(c.z(r, i)) << ' ';
    f << fmt17(c.t(i)) << ' ' << fmt17(c.w(i)) << '\n';
  }
}

PointCloud read_cloud(const std::string& path, int n, int k, double resolution) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open cloud file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    std::vector<double> row;
    double v;
    while (is >> v) row.push_back(v);
    if (static_cast<int>(row.size()) != 2 * n + 2)
      throw std::runtime_error("cloud line has wrong field count in " + path);
    rows.push_back(std::move(row));
  }
  PointCloud c;
  c.n = n;
  c.k = k;
  c.resolution = resolution;
  const int N = static_cast<int>(rows.size());
  c.z.resize(2 * n, N);
  c.t.resize(N);
  c.w.resize(N);
  for (int i = 0; i < N; ++i) {
    for (int r = 0; r < 2 * n; ++r) c.z(r, i) = rows[i][r];
    c.t(i) = rows[i][2 * n];
    c.w(i) = rows[i][2 * n + 1];
  }
  validate_cloud(c);
  return c;
}

void write_cube_tree_json(const std::string& path, const CubeTree& tree) {
  json j;
  j["rho"] = tree.rho;
  j["j0"] = tree.j0;
  j["empirical_D"] = tree.empirical_D;
  json gens = json::array();
  for (size_t g = 0; g < tree.generations.size(); ++g) {
    json jg;
    jg["j"] = tree.j0 + static_cast<int>(g);
    json cubes = json::array();
    for (int id : tree.generations[g]) {
      const DyadicCube& q = tree.cubes[id];
      json jq;
      jq["id"] = q.id;
      jq["center"] = q.center;
      jq["parent"] = q.parent;
      jq["diam"] = q.diam;
      jq["mass"] = q.mass;
      jq["members"] = q.members;
      cubes.push_back(std::move(jq));
    }
    jg["cubes"] = std::move(cubes);
    gens.push_back(std::move(jg));
  }
  j["generations"] = std::move(gens);
  open_out(path) << j.dump(1) << '\n';
}

void write_coeff_csv(const std::string& path, const CubeTree& tree,
                     const CoeffField& field) {
  std::ofstream f = open_out(path);
  f << "cube_id,generation,coeff,value,plane_params\n";
  for (const DyadicCube& q : tree.cubes) {
    const auto it = field.value.find(q.id);
    if (it == field.value.end()) continue;
    f << q.id << ',' << q.j << ',' << family_name(field.kind.family)
      << (field.kind.p == kPInf ? "_inf" : "_1") << ',' << fmt17(it->second) << ',';
    const auto pit = field.plane.find(q.id);
    if (pit != field.plane.end()) {
      const PlaneCandidate& pc = pit->second;
      f << '"';
      for (int r = 0; r < pc.base_z.size(); ++r) f << fmt17(pc.base_z(r)) << ' ';
      f << fmt17(pc.base_t);
      for (int cidx = 0; cidx < pc.frame.cols(); ++cidx)
        for (int r = 0; r < pc.frame.rows(); ++r) f << ' ' << fmt17(pc.frame(r, cidx));
      f << '"';
    }
    f << '\n';
  }
}

void write_levels_csv(const std::string& path, const std::string& family,
                      const std::vector<MultiresLevel>& levels) {
  std::ofstream f = open_out(path);
  f << "family,level,increment,partial_sum,net_points\n";
  for (const auto& l : levels)
    f << family << ',' << l.j << ',' << fmt17(l.increment) << ','
      << fmt17(l.partial_sum) << ',' << l.net_points << '\n';
}

void write_dichotomy_json(const std::string& path, const DichotomyReport& rep) {
  json j;
  j["cloud_points"] = rep.cloud_points;
  j["cloud_mass"] = rep.cloud_mass;
  j["harmonic_slope"] = rep.fit.slope;
  j["harmonic_rel_resid"] = rep.fit.rel_resid;
  auto levels = [](const std::vector<MultiresLevel>& ls) {
    json a = json::array();
    for (const auto& l : ls)
      a.push_back({{"level", l.j},
                   {"increment", l.increment},
                   {"partial_sum", l.partial_sum},
                   {"points", l.net_points}});
    return a;
  };
  j["beta1_sq_levels"] = levels(rep.beta_levels);
  j["bhat1_4_levels"] = levels(rep.bhat_levels);
  open_out(path) << j.dump(1) << '\n';
}

void write_forest_json(const std::string& path, const CoronaForest& forest,
                       const CubeTree& tree, const PackingReport& packing) {
  json j;
  j["eta"] = forest.params.eta;
  j["epsilon"] = forest.params.epsilon;
  j["K0"] = forest.params.k0;
  j["K"] = forest.params.k_big;
  j["optimizer_failures"] = forest.gc.optimizer_failures;
  json trees = json::array();
  for (const CoronaTree& t : forest.trees) {
    json jt;
    jt["top"] = t.top;
    jt["cubes"] = t.cubes;
    jt["minimal"] = t.minimal;
    jt["m1_mass"] = t.mass_m1;
    jt["m2_mass"] = t.mass_m2;
    jt["unstopped_mass"] = t.mass_unstopped;
    jt["labels"] = json::array();
    if (t.f1) jt["labels"].push_back("F1");
    if (t.f2) jt["labels"].push_back("F2");
    if (t.f3) jt["labels"].push_back("F3");
    const PlaneCandidate& pc = forest.gc.plane.at(t.top);
    json plane;
    plane["base_z"] = std::vector<double>(pc.base_z.data(), pc.base_z.data() + pc.base_z.size());
    plane["base_t"] = pc.base_t;
    std::vector<double> fr(pc.frame.data(), pc.frame.data() + pc.frame.size());
    plane["frame"] = fr;
    jt["plane"] = std::move(plane);
    trees.push_back(std::move(jt));
  }
  j["trees"] = std::move(trees);
  j["bad_cubes"] = [&] {
    json a = json::array();
    for (size_t id = 0; id < tree.cubes.size(); ++id)
      if (!forest.gc.good[id]) a.push_back(static_cast<int>(id));
    return a;
  }();
  j["packing"] = {{"bad_max", packing.bad_max},
                  {"tops_f1f2_max", packing.tops12_max},
                  {"tops_f3_max", packing.tops3_max}};
  open_out(path) << j.dump(1) << '\n';
}

void write_pc_csv(const std::string& path, const std::vector<PcReport>& reports) {
  std::ofstream f = open_out(path);
  f << "tree,x,y,dist,proj_dist,ratio,violation\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    for (const PcViolation& p : reports[i].pairs) {
      const double ratio = p.dproj > 0 ? p.dxy / p.dproj
                                       : std::numeric_limits<double>::infinity();
      const bool bad = std::find_if(reports[i].violations.begin(),
                                    reports[i].violations.end(), [&](const auto& v) {
                                      return v.x == p.x && v.y == p.y;
                                    }) != reports[i].violations.end();
      f << i << ',' << p.x << ',' << p.y << ',' << fmt17(p.dxy) << ','
        << fmt17(p.dproj) << ',' << fmt17(ratio) << ',' << (bad ? 1 : 0) << '\n';
    }
  }
}

std::uint64_t fnv1a_bytes(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot hash missing file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return fnv1a_bytes(ss.str());
}

} // namespace hrect

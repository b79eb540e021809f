#include "hrect/carleson.hpp"

#include <cmath>

namespace hrect {

namespace {

// cube ids below (and including) root, in id order
std::vector<int> subtree_ids(const CubeTree& tree, int root) {
  std::vector<int> out;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    out.push_back(id);
    for (int ch : tree.cubes[id].children) stack.push_back(ch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double field_at(const CoeffField& field, int id) {
  const auto it = field.value.find(id);
  if (it == field.value.end())
    throw std::runtime_error("coefficient field does not cover cube " + std::to_string(id));
  return it->second;
}

} // namespace

double glem_sum(const CubeTree& tree, const CoeffField& field, double q, int root) {
  const double root_mass = tree.cubes.at(root).mass;
  double acc = 0;
  for (int id : subtree_ids(tree, root))
    acc += std::pow(field_at(field, id), q) * tree.cubes[id].mass;
  return acc / root_mass;
}

double wgl_count(const CubeTree& tree, const CoeffField& field, double eps, int root) {
  const double root_mass = tree.cubes.at(root).mass;
  double acc = 0;
  for (int id : subtree_ids(tree, root))
    if (field_at(field, id) > eps) acc += tree.cubes[id].mass;
  return acc / root_mass;
}

std::vector<double> glem_increments(const CubeTree& tree, const CoeffField& field,
                                    double q, int root) {
  const double root_mass = tree.cubes.at(root).mass;
  const int jroot = tree.cubes.at(root).j;
  std::vector<double> inc;
  for (int id : subtree_ids(tree, root)) {
    const int level = tree.cubes[id].j - jroot;
    if (level >= static_cast<int>(inc.size())) inc.resize(level + 1, 0.0);
    inc[level] += std::pow(field_at(field, id), q) * tree.cubes[id].mass / root_mass;
  }
  return inc;
}

std::vector<MultiresLevel> multires_sum(const PointCloud& c, const DyadicNet& net,
                                        double p, double A, int j_lo, int j_hi,
                                        const CoeffOptions& opts) {
  if (!(A > 1)) throw std::invalid_argument("multires_sum: A > 1 required");
  std::vector<MultiresLevel> out;
  double partial = 0;
  for (int li = 0; li < net.level_count(); ++li) {
    const int j = net.j_of(li);
    if (j < j_lo || j > j_hi) continue;
    const auto& lvl = net.levels[li];
    if (lvl.empty()) continue; // skipped level
    const double rad = A * std::pow(2.0, -j);
    double inc = 0;
    for (int x : lvl) {
      const Region r = ball_region(c, x, rad);
      CoeffOptions o = opts;
      o.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (x + 131 * j + 7));
      const CoeffResult res =
          optimize_coeff(c, r, {CoeffFamily::BetaHorizontal, p}, o);
      inc += res.value * res.value;
    }
    inc *= std::pow(2.0, -j);
    partial += inc;
    out.push_back(MultiresLevel{j, inc, partial, static_cast<int>(lvl.size())});
  }
  return out;
}

HarmonicFit harmonic_fit(const std::vector<MultiresLevel>& levels) {
  HarmonicFit fit;
  double sxy = 0, sxx = 0;
  for (const auto& l : levels) {
    const double x = 1.0 / (std::ceil(l.j / 2.0) + 1.0);
    sxy += l.increment * x;
    sxx += x * x;
  }
  if (sxx > 0) fit.slope = sxy / sxx;
  double num = 0, den = 0;
  for (const auto& l : levels) {
    const double x = 1.0 / (std::ceil(l.j / 2.0) + 1.0);
    num += std::pow(l.increment - fit.slope * x, 2);
    den += l.increment * l.increment;
  }
  fit.rel_resid = den > 0 ? std::sqrt(num / den) : 0.0;
  return fit;
}

DichotomyReport dichotomy_experiment(const CurveConfig& cfg, int J, double A,
                                     int j_lo, int j_hi, const CoeffOptions& opts,
                                     int threads) {
  if (J > 8) throw std::invalid_argument("dichotomy_experiment: J <= 8");
  const PlanarPolyline pl = build_planar_generation(cfg, J);
  const HorizontalPolyline gamma = lift_horizontal(pl, {-1.0, 0.0, 0.0});
  const PointCloud cloud = cloud_from_polyline(gamma, pl.segment_length);

  DichotomyReport rep;
  rep.cloud_mass = cloud.total_mass();
  rep.cloud_points = cloud.size();

  const DyadicNet net = dyadic_net(cloud);
  rep.beta_levels = multires_sum(cloud, net, 1.0, A, j_lo, j_hi, opts);
  rep.fit = harmonic_fit(rep.beta_levels);

  const CubeTree tree = christ_cubes(cloud, 0.5);
  const CoeffField field = evaluate_field(
      cloud, tree, {CoeffFamily::BetaStratified, 1.0}, 2.0, opts, threads);
  const std::vector<double> inc = glem_increments(tree, field, 4.0, tree.top());
  double partial = 0;
  for (size_t lvl = 0; lvl < inc.size(); ++lvl) {
    partial += inc[lvl];
    const int j = tree.j0 + static_cast<int>(lvl);
    rep.bhat_levels.push_back(
        MultiresLevel{j, inc[lvl], partial,
                      static_cast<int>(tree.generations[lvl].size())});
  }
  return rep;
}

double integral_glem_riemann(const PointCloud& c, const CoeffKind& kind, double q,
                             const CoeffOptions& opts) {
  const double R = cloud_diameter(c);
  const double r_lo = 10.0 * c.resolution;
  double acc = 0;
  const double ln2 = std::log(2.0);
  for (double r = R; r >= r_lo; r *= 0.5) {
    for (int i = 0; i < c.size(); ++i) {
      const Region reg = ball_region(c, i, r);
      CoeffOptions o = opts;
      o.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1)) ^
               std::hash<double>{}(r);
      const CoeffResult res = optimize_coeff(c, reg, kind, o);
      acc += std::pow(res.value, q) * c.w(i) * ln2;
    }
  }
  return acc / std::pow(R, c.k);
}

} // namespace hrect

#include "hrect/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hrect {

void validate_cloud(const PointCloud& c) {
  if (c.z.cols() != c.t.size() || c.z.cols() != c.w.size())
    throw std::invalid_argument("PointCloud: field lengths differ");
  if (c.z.rows() != 2 * c.n)
    throw std::invalid_argument("PointCloud: z must have 2n rows");
  if (c.k < 1 || c.k > c.n)
    throw std::invalid_argument("PointCloud: need 1 <= k <= n");
  if (c.size() == 0) throw std::invalid_argument("PointCloud: empty");
  if ((c.w.array() <= 0).any())
    throw std::invalid_argument("PointCloud: weights must be positive");
  if (!c.z.allFinite() || !c.t.allFinite())
    throw std::invalid_argument("PointCloud: non-finite coordinates");
}

namespace {

// d(x_j, p)^4 = |z_j - z_p|^4 + 16 (t_j - t_p - omega(z_p, z_j))^2, vectorized.
Vec dists_impl(const PointCloud& c, const Vec& zp, double tp) {
  const int n = c.n;
  Eigen::ArrayXd d2 = (c.z.colwise() - zp).colwise().squaredNorm().transpose().array();
  Eigen::ArrayXd om = (0.5 * (zp.head(n).transpose() * c.z.bottomRows(n) -
                              zp.tail(n).transpose() * c.z.topRows(n)))
                          .transpose()
                          .array();
  Eigen::ArrayXd vert = c.t.array() - tp - om;
  return (d2.square() + 16.0 * vert.square()).sqrt().sqrt().matrix();
}

} // namespace

Vec dists_from(const PointCloud& c, int i) { return dists_impl(c, c.z.col(i), c.t(i)); }

Vec dists_from_point(const PointCloud& c, const HPoint& p) {
  return dists_impl(c, p.z, p.t);
}

double cloud_diameter(const PointCloud& c, int exact_cap) {
  const int N = c.size();
  if (N <= exact_cap) {
    double d = 0;
    for (int i = 0; i < N; ++i) d = std::max(d, dists_from(c, i).maxCoeff());
    return d;
  }
  // two sweeps of iterated farthest; underestimates by at most a factor 2
  int p0 = 0, p1 = 0;
  double d = 0;
  Vec d0 = dists_from(c, p0);
  d0.maxCoeff(&p1);
  Vec d1 = dists_from(c, p1);
  int p2 = 0;
  d = d1.maxCoeff(&p2);
  return std::max(d, d0(p1));
}

PointCloud translate_cloud(const PointCloud& c, const HPoint& g) {
  PointCloud out = c;
  const int n = c.n;
  out.z = c.z.colwise() + g.z;
  // t' = g.t + t + omega(g.z, z)
  Vec om = (0.5 * (g.z.head(n).transpose() * c.z.bottomRows(n) -
                   g.z.tail(n).transpose() * c.z.topRows(n)))
               .transpose();
  out.t = c.t.array() + g.t + om.array();
  return out;
}

PointCloud rotate_cloud(const PointCloud& c, const Rotation& R) {
  PointCloud out = c;
  out.z = R.A * c.z;
  return out;
}

PointCloud dilate_cloud(const PointCloud& c, double r) {
  if (!(r > 0)) throw std::invalid_argument("dilate_cloud: r must be positive");
  PointCloud out = c;
  out.z = r * c.z;
  out.t = r * r * c.t;
  out.w = std::pow(r, c.k) * c.w;
  out.resolution = r * c.resolution;
  return out;
}

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

PointCloud cloud_from_polyline(const HorizontalPolyline& gamma, double step) {
  if (gamma.v.size() < 2)
    throw std::invalid_argument("cloud_from_polyline: degenerate polyline");
  if (!(step > 0)) throw std::invalid_argument("cloud_from_polyline: step must be positive");
  double shortest = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < gamma.v.size(); ++i)
    shortest = std::min(shortest,
                        (gamma.v[i + 1].head<2>() - gamma.v[i].head<2>()).norm());
  if (!(shortest > 0))
    throw std::invalid_argument("cloud_from_polyline: zero-length segment");
  // 1e-6 relative guard: segment lengths of deep generations carry
  // accumulated vertex roundoff well above machine epsilon
  if (step > shortest * (1 + 1e-6))
    throw std::invalid_argument("cloud_from_polyline: step exceeds shortest segment");

  std::vector<Eigen::Vector3d> pts;
  std::vector<double> wts;
  pts.push_back(gamma.v.front());
  wts.push_back(0.0);
  for (size_t i = 0; i + 1 < gamma.v.size(); ++i) {
    const Eigen::Vector2d a = gamma.v[i].head<2>(), b = gamma.v[i + 1].head<2>();
    const double len = (b - a).norm();
    const int m = std::max(1, static_cast<int>(std::ceil(len / step - 1e-6)));
    const double piece = len / m;
    const double om = 0.5 * (a.x() * b.y() - a.y() * b.x()); // full-segment lift
    for (int s = 1; s <= m; ++s) {
      const double f = static_cast<double>(s) / m;
      wts.back() += 0.5 * piece;
      if (s < m) {
        Eigen::Vector2d zz = a + f * (b - a);
        pts.push_back({zz.x(), zz.y(), gamma.v[i].z() + f * om});
        wts.push_back(0.5 * piece);
      } else {
        pts.push_back(gamma.v[i + 1]);
        wts.push_back(0.5 * piece);
      }
    }
  }
  PointCloud c;
  c.n = 1;
  c.k = 1;
  const int N = static_cast<int>(pts.size());
  c.z.resize(2, N);
  c.t.resize(N);
  c.w.resize(N);
  for (int i = 0; i < N; ++i) {
    c.z.col(i) = pts[i].head<2>();
    c.t(i) = pts[i].z();
    c.w(i) = wts[i];
  }
  c.resolution = step;
  validate_cloud(c);
  return c;
}

PointCloud cantor_vertical(int levels) {
  if (levels < 1) throw std::invalid_argument("cantor_vertical: levels >= 1");
  std::vector<double> lo{0.0};
  double len = 1.0;
  for (int l = 0; l < levels; ++l) {
    len /= 4.0;
    std::vector<double> next;
    next.reserve(2 * lo.size());
    for (double a : lo) {
      next.push_back(a);
      next.push_back(a + 3.0 * len);
    }
    lo = std::move(next);
  }
  const int N = static_cast<int>(lo.size());
  PointCloud c;
  c.n = 1;
  c.k = 1;
  c.z = Mat::Zero(2, N);
  c.t.resize(N);
  c.w = Vec::Constant(N, std::pow(2.0, -levels));
  for (int i = 0; i < N; ++i) c.t(i) = lo[i] + 0.5 * len;
  // nearest neighbours sit in a common level-`levels` pair
  c.resolution = koranyi_norm_zt(Eigen::Vector2d::Zero(), 3.0 * len);
  validate_cloud(c);
  return c;
}

PointCloud flat_segment_cloud(int points) {
  if (points < 2) throw std::invalid_argument("flat_segment_cloud: points >= 2");
  PointCloud c;
  c.n = 1;
  c.k = 1;
  c.z.resize(2, points);
  c.t = Vec::Zero(points);
  c.w.resize(points);
  const double h = 2.0 / (points - 1);
  for (int i = 0; i < points; ++i) {
    c.z(0, i) = -1.0 + i * h;
    c.z(1, i) = 0.0;
    c.w(i) = (i == 0 || i == points - 1) ? 0.5 * h : h;
  }
  c.resolution = h;
  return c;
}

PointCloud two_segment_cloud(double angle, int points_per_arm) {
  PlanarPolyline pl;
  pl.v = {{-1.0, 0.0}, {0.0, 0.0}, {std::cos(angle), std::sin(angle)}};
  pl.constant_speed = true;
  pl.segment_length = 1.0;
  const HorizontalPolyline g = lift_horizontal(pl, {-1.0, 0.0, 0.0});
  return cloud_from_polyline(g, 1.0 / points_per_arm);
}

PointCloud tilted_graph_cloud(double slope, int points, double ripple_amplitude,
                              double ripple_wavelength) {
  if (points < 9) throw std::invalid_argument("tilted_graph_cloud: points >= 9");
  PlanarPolyline pl;
  pl.constant_speed = false;
  const int segs = points - 1;
  pl.v.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * i / segs;
    double y = slope * x;
    if (ripple_amplitude != 0.0)
      y += ripple_amplitude * std::sin(2.0 * M_PI * x / ripple_wavelength);
    pl.v.push_back({x, y});
  }
  const HorizontalPolyline g =
      lift_horizontal(pl, {pl.v.front().x(), pl.v.front().y(), 0.0});
  // the polyline nodes are the cloud; weights are trapezoidal arclengths
  PointCloud c;
  c.n = 1;
  c.k = 1;
  c.z.resize(2, points);
  c.t.resize(points);
  c.w = Vec::Zero(points);
  double longest = 0;
  for (int i = 0; i < points; ++i) {
    c.z.col(i) = g.v[i].head<2>();
    c.t(i) = g.v[i].z();
    if (i + 1 < points) {
      const double len = (g.v[i + 1].head<2>() - g.v[i].head<2>()).norm();
      longest = std::max(longest, len);
      c.w(i) += 0.5 * len;
      c.w(i + 1) += 0.5 * len;
    }
  }
  c.resolution = longest;
  validate_cloud(c);
  return c;
}

// ---------------------------------------------------------------------------
// Regularity.
// ---------------------------------------------------------------------------

RegularityProfile regularity_profile(const PointCloud& c, int trials, Rng& rng,
                                     double r_lo, double r_hi) {
  validate_cloud(c);
  if (r_lo <= 0) r_lo = 10.0 * c.resolution;
  if (r_hi <= 0) r_hi = cloud_diameter(c);
  if (r_hi <= r_lo) r_hi = 2.0 * r_lo;
  std::uniform_int_distribution<int> pick(0, c.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> ratios;
  ratios.reserve(trials);
  for (int s = 0; s < trials; ++s) {
    const int i = pick(rng);
    const double r = r_lo * std::pow(r_hi / r_lo, u(rng));
    const Vec d = dists_from(c, i);
    const double mass = ((d.array() <= r).cast<double>() * c.w.array()).sum();
    ratios.push_back(mass / std::pow(r, c.k));
  }
  std::sort(ratios.begin(), ratios.end());
  RegularityProfile out;
  out.trials = trials;
  out.min_ratio = ratios.front();
  out.max_ratio = ratios.back();
  out.median_ratio = ratios[ratios.size() / 2];
  out.c_estimate = std::max(out.max_ratio, out.min_ratio > 0
                                               ? 1.0 / out.min_ratio
                                               : std::numeric_limits<double>::infinity());
  out.failed = !(out.c_estimate < 50.0);
  return out;
}

// ---------------------------------------------------------------------------
// Christ cubes.
// ---------------------------------------------------------------------------

namespace {

double diam_of_members(const PointCloud& c, const std::vector<int>& idx, int cap = 4000) {
  const int m = static_cast<int>(idx.size());
  if (m <= 1) return 0.0;
  auto dist_ij = [&](int a, int b) {
    return koranyi_norm_zt(c.z.col(idx[a]) - c.z.col(idx[b]),
                           c.t(idx[a]) - c.t(idx[b]) -
                               symplectic_form(c.z.col(idx[b]), c.z.col(idx[a])));
  };
  if (m <= cap) {
    double d = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) d = std::max(d, dist_ij(i, j));
    return d;
  }
  int far = 0;
  double best = 0;
  for (int j = 1; j < m; ++j) {
    const double d = dist_ij(0, j);
    if (d > best) { best = d; far = j; }
  }
  double second = 0;
  for (int j = 0; j < m; ++j) second = std::max(second, dist_ij(far, j));
  return std::max(best, second);
}

} // namespace

CubeTree christ_cubes(const PointCloud& c, double rho) {
  validate_cloud(c);
  if (!(rho > 0 && rho < 1)) throw std::invalid_argument("christ_cubes: rho in (0,1)");
  CubeTree tree;
  tree.rho = rho;
  const double diam = cloud_diameter(c);
  tree.j0 = diam > 0 ? static_cast<int>(std::floor(std::log(diam) / std::log(rho))) : 0;

  auto pdist = [&](int a, int b) {
    return koranyi_norm_zt(c.z.col(a) - c.z.col(b),
                           c.t(a) - c.t(b) - symplectic_form(c.z.col(b), c.z.col(a)));
  };

  // nested farthest-point nets, one per generation, globally rho^j-separated,
  // ties by lowest index
  const double floor_scale = 2.0 * c.resolution;
  std::vector<std::vector<int>> nets{{0}};
  {
    Vec mind = dists_from(c, 0);
    std::vector<int> current{0};
    for (int j = tree.j0 + 1; std::pow(rho, j) >= floor_scale; ++j) {
      const double sep = std::pow(rho, j);
      for (;;) {
        double best = mind.maxCoeff();
        if (!(best > sep)) break;
        // ties within a relative window resolve to the lowest index, so the
        // construction is stable under isometries of the cloud
        int far = 0;
        while (mind(far) < best * (1.0 - 1e-12)) ++far;
        current.push_back(far);
        mind = mind.cwiseMin(dists_from(c, far));
      }
      nets.push_back(current);
    }
  }
  const int levels = static_cast<int>(nets.size());

  // finest-level cells: every point goes to its nearest finest center
  const std::vector<int>& fine = nets.back();
  std::vector<int> cell(c.size(), 0);
  {
    Vec bestd = Vec::Constant(c.size(), std::numeric_limits<double>::infinity());
    for (size_t ci = 0; ci < fine.size(); ++ci) {
      const Vec d = dists_from(c, fine[ci]);
      for (int i = 0; i < c.size(); ++i)
        if (d(i) < bestd(i) * (1.0 - 1e-12)) {
          bestd(i) = d(i);
          cell[i] = static_cast<int>(ci);
        }
    }
  }

  // chain every center to its nearest center one level up; coarser cubes are
  // unions of their children's cells, so partition and nesting are exact
  std::vector<std::vector<int>> up(levels); // index into the coarser net
  for (int l = 1; l < levels; ++l) {
    up[l].resize(nets[l].size());
    for (size_t ci = 0; ci < nets[l].size(); ++ci) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (size_t pi = 0; pi < nets[l - 1].size(); ++pi) {
        const double d = pdist(nets[l][ci], nets[l - 1][pi]);
        if (d < bd * (1.0 - 1e-12)) { bd = d; best = static_cast<int>(pi); }
      }
      up[l][ci] = best;
    }
  }

  // members per center per level
  std::vector<std::vector<std::vector<int>>> members(levels);
  members[levels - 1].resize(fine.size());
  for (int i = 0; i < c.size(); ++i) members[levels - 1][cell[i]].push_back(i);
  for (int l = levels - 2; l >= 0; --l) {
    members[l].resize(nets[l].size());
    for (size_t ci = 0; ci < nets[l + 1].size(); ++ci) {
      auto& dst = members[l][up[l + 1][ci]];
      dst.insert(dst.end(), members[l + 1][ci].begin(), members[l + 1][ci].end());
    }
    for (auto& m : members[l]) std::sort(m.begin(), m.end());
  }

  std::vector<std::vector<int>> ids(levels);
  for (int l = 0; l < levels; ++l) {
    ids[l].resize(nets[l].size());
    std::vector<int> gen;
    for (size_t ci = 0; ci < nets[l].size(); ++ci) {
      DyadicCube q;
      q.id = static_cast<int>(tree.cubes.size());
      q.j = tree.j0 + l;
      q.members = std::move(members[l][ci]);
      q.center = nets[l][ci];
      q.parent = l > 0 ? ids[l - 1][up[l][ci]] : -1;
      q.diam = diam_of_members(c, q.members);
      for (int m : q.members) q.mass += c.w(m);
      ids[l][ci] = q.id;
      if (q.parent >= 0) tree.cubes[q.parent].children.push_back(q.id);
      gen.push_back(q.id);
      tree.cubes.push_back(std::move(q));
    }
    tree.generations.push_back(std::move(gen));
  }

  // empirical constant for the diameter and inner-ball properties
  double D = 1.0;
  for (const DyadicCube& q : tree.cubes) {
    const double scale = std::pow(rho, q.j);
    D = std::max(D, q.diam / scale);
    if (static_cast<int>(q.members.size()) < c.size()) {
      Vec d = dists_from(c, q.center);
      std::vector<char> inq(c.size(), 0);
      for (int m : q.members) inq[m] = 1;
      double nearest_out = std::numeric_limits<double>::infinity();
      for (int i = 0; i < c.size(); ++i)
        if (!inq[i]) nearest_out = std::min(nearest_out, d(i));
      if (nearest_out > 0) D = std::max(D, scale / nearest_out * (1 + 1e-12));
    }
  }
  tree.empirical_D = D;
  return tree;
}

std::vector<int> enlarge(const CubeTree& tree, const PointCloud& c, int cube_id,
                         double lambda) {
  if (lambda < 1.0) throw std::invalid_argument("enlarge: lambda >= 1");
  const DyadicCube& q = tree.cubes.at(cube_id);
  if (lambda == 1.0) return q.members;
  const double reach = (lambda - 1.0) * q.diam;
  // prefilter around the center, then exact d(x, Q)
  Vec dc = dists_from(c, q.center);
  std::vector<int> out;
  std::vector<char> inq(c.size(), 0);
  for (int m : q.members) inq[m] = 1;
  for (int i = 0; i < c.size(); ++i) {
    if (inq[i]) { out.push_back(i); continue; }
    if (dc(i) > reach + q.diam + 1e-15) continue;
    double dmin = std::numeric_limits<double>::infinity();
    for (int m : q.members) {
      const double d = koranyi_norm_zt(
          c.z.col(i) - c.z.col(m),
          c.t(i) - c.t(m) - symplectic_form(c.z.col(m), c.z.col(i)));
      dmin = std::min(dmin, d);
      if (dmin <= reach) break;
    }
    if (dmin <= reach) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ChristCheck verify_christ(const CubeTree& tree, const PointCloud& c) {
  ChristCheck out;
  out.D = tree.empirical_D;
  const double total = c.total_mass();
  for (const auto& gen : tree.generations) {
    std::vector<char> seen(c.size(), 0);
    double mass = 0;
    for (int qid : gen) {
      const DyadicCube& q = tree.cubes[qid];
      mass += q.mass;
      for (int m : q.members) {
        if (seen[m]) out.partition_ok = false;
        seen[m] = 1;
      }
      if (q.parent >= 0) {
        std::vector<char> inp(c.size(), 0);
        for (int m : tree.cubes[q.parent].members) inp[m] = 1;
        for (int m : q.members)
          if (!inp[m]) out.nesting_ok = false;
      }
      const double scale = std::pow(tree.rho, q.j);
      if (q.diam > tree.empirical_D * scale * (1 + 1e-12)) out.diam_ok = false;
      const double r = scale / tree.empirical_D;
      Vec d = dists_from(c, q.center);
      std::vector<char> inq(c.size(), 0);
      for (int m : q.members) inq[m] = 1;
      for (int i = 0; i < c.size(); ++i)
        if (d(i) < r * (1 - 1e-12) && !inq[i]) out.inner_ball_ok = false;
    }
    for (int i = 0; i < c.size(); ++i)
      if (!seen[i]) out.partition_ok = false;
    if (std::abs(mass - total) > 1e-9 * std::max(1.0, total)) out.mass_ok = false;
  }
  return out;
}

double small_boundary_constant(const CubeTree& tree, const PointCloud& c,
                               const std::vector<double>& etas,
                               int max_cubes_per_gen) {
  double worst = 0.0;
  const double invD = 1.0 / tree.empirical_D;
  for (const auto& gen : tree.generations) {
    int used = 0;
    for (int qid : gen) {
      if (used++ >= max_cubes_per_gen) break;
      const DyadicCube& q = tree.cubes[qid];
      if (q.members.size() == static_cast<size_t>(c.size())) continue;
      std::vector<char> inq(c.size(), 0);
      for (int m : q.members) inq[m] = 1;
      const double scale = std::pow(tree.rho, q.j);
      std::vector<double> dout(q.members.size());
      for (size_t mi = 0; mi < q.members.size(); ++mi) {
        Vec d = dists_from(c, q.members[mi]);
        double dm = std::numeric_limits<double>::infinity();
        for (int i = 0; i < c.size(); ++i)
          if (!inq[i]) dm = std::min(dm, d(i));
        dout[mi] = dm;
      }
      for (double eta : etas) {
        double bmass = 0.0;
        for (size_t mi = 0; mi < q.members.size(); ++mi)
          if (dout[mi] <= eta * scale) bmass += c.w(q.members[mi]);
        const double denom = std::pow(eta, invD) * q.mass;
        if (denom > 0) worst = std::max(worst, bmass / denom);
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Dyadic nets.
// ---------------------------------------------------------------------------

DyadicNet dyadic_net(const PointCloud& c) {
  validate_cloud(c);
  const double diam = cloud_diameter(c);
  DyadicNet net;
  net.j_first = diam > 0 ? static_cast<int>(std::floor(-std::log2(diam))) : 0;
  const double finest = std::max(c.resolution, 1e-300);
  // farthest-point greedy, ties by lowest index; nets stay nested because
  // the uncovered-distance field only ever shrinks
  std::vector<int> current{0};
  Vec mind = dists_from(c, 0);
  for (int j = net.j_first; std::pow(2.0, -j) >= finest; ++j) {
    const double sep = std::pow(2.0, -j);
    for (;;) {
      double best = mind.maxCoeff();
      if (!(best > sep)) break;
      int far = 0;
      while (mind(far) < best * (1.0 - 1e-12)) ++far;
      current.push_back(far);
      mind = mind.cwiseMin(dists_from(c, far));
    }
    std::vector<int> level = current;
    std::sort(level.begin(), level.end());
    net.levels.push_back(std::move(level));
  }
  return net;
}

NetCheck verify_net(const DyadicNet& net, const PointCloud& c) {
  NetCheck out;
  for (int li = 0; li < net.level_count(); ++li) {
    const auto& lvl = net.levels[li];
    const double scale = std::pow(2.0, -net.j_of(li));
    if (li > 0) {
      std::vector<char> now(c.size(), 0);
      for (int i : lvl) now[i] = 1;
      for (int i : net.levels[li - 1])
        if (!now[i]) out.nested_ok = false;
    }
    for (size_t a = 0; a < lvl.size(); ++a)
      for (size_t b = a + 1; b < lvl.size(); ++b) {
        const double d = koranyi_norm_zt(
            c.z.col(lvl[a]) - c.z.col(lvl[b]),
            c.t(lvl[a]) - c.t(lvl[b]) -
                symplectic_form(c.z.col(lvl[b]), c.z.col(lvl[a])));
        if (d <= scale * (1 - 1e-12)) out.separation_ok = false;
      }
    for (int i = 0; i < c.size(); ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      for (int x : lvl) {
        const double d = koranyi_norm_zt(
            c.z.col(i) - c.z.col(x),
            c.t(i) - c.t(x) - symplectic_form(c.z.col(x), c.z.col(i)));
        dmin = std::min(dmin, d);
      }
      if (dmin > scale * (1 + 1e-12)) out.covering_ok = false;
    }
  }
  return out;
}

std::vector<MultiresBall> multires_family(const DyadicNet& net, double A) {
  if (!(A > 1)) throw std::invalid_argument("multires_family: A > 1");
  std::vector<MultiresBall> out;
  for (int li = 0; li < net.level_count(); ++li) {
    const int j = net.j_of(li);
    for (int x : net.levels[li])
      out.push_back(MultiresBall{j, x, A * std::pow(2.0, -j)});
  }
  return out;
}

} // namespace hrect

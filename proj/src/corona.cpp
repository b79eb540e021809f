#include "hrect/corona.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hrect {

namespace {

// cache key for repeated KQ regions (coarse cubes often share one region)
std::uint64_t idx_hash(const std::vector<int>& idx) {
  std::uint64_t h = 1469598103934665603ULL;
  for (int i : idx) {
    h ^= static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return h;
}

// extra direction candidates towards region points make exactly flat
// configurations evaluate to exactly zero
void add_pair_directions(const PointCloud& c, const Region& r,
                         std::vector<Mat>& frames) {
  if (c.n != 1 || c.k != 1 || r.size() < 2) return;
  const Vec base = c.z.col(r.snap);
  int far = r.idx.front();
  double best = -1;
  for (int i : r.idx) {
    const double d = (c.z.col(i) - base).norm();
    if (d > best) { best = d; far = i; }
  }
  if (best <= 0) return;
  Mat B(2, 1);
  B = (c.z.col(far) - base).normalized();
  frames.push_back(B);
}

} // namespace

GoodCubes good_cubes(const CubeTree& tree, const PointCloud& c,
                     const CoronaParams& params, const CoeffOptions& opts) {
  params.validate();
  GoodCubes out;
  out.good.assign(tree.cubes.size(), 0);

  struct CacheEntry {
    std::vector<int> idx;
    double value;
    PlaneCandidate plane;
    bool converged;
  };
  std::map<std::uint64_t, std::vector<CacheEntry>> cache;

  for (const DyadicCube& q : tree.cubes) {
    Region r = cube_region(c, tree, q.id, params.k_big);
    double sup = 0;
    PlaneCandidate plane;
    bool converged = true;

    const std::uint64_t h = idx_hash(r.idx);
    CacheEntry* hit = nullptr;
    for (auto& e : cache[h])
      if (e.idx == r.idx) { hit = &e; break; }
    if (hit) {
      sup = hit->value;
      plane = hit->plane;
      converged = hit->converged;
    } else {
      CoeffOptions o = opts;
      o.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (q.id + 1));
      CoeffResult res = optimize_coeff(c, r, {CoeffFamily::BetaHorizontal, kPInf}, o);
      std::vector<Mat> extra;
      add_pair_directions(c, r, extra);
      for (const Mat& B : extra) {
        PlaneCandidate pc = res.plane;
        pc.frame = B;
        const double v = eval_coeff(c, r, {CoeffFamily::BetaHorizontal, kPInf}, pc);
        if (v < res.value) { res.value = v; res.plane = pc; }
      }
      sup = res.value * r.scale; // unnormalized sup distance over KQ
      plane = res.plane;
      converged = res.converged;
      cache[h].push_back(CacheEntry{r.idx, sup, plane, converged});
    }

    if (!converged) {
      ++out.optimizer_failures; // conservatively bad
      continue;
    }
    if (sup <= params.epsilon * params.epsilon * q.diam) {
      out.good[q.id] = 1;
      out.plane[q.id] = plane;
    }
    out.sup_dist[q.id] = sup;
  }
  return out;
}

CoronaForest build_forest(const CubeTree& tree, const PointCloud& c, GoodCubes gc,
                          const CoronaParams& params) {
  (void)c;
  params.validate();
  CoronaForest forest;
  forest.params = params;
  forest.gc = std::move(gc);
  forest.tree_of.assign(tree.cubes.size(), -1);

  for (const auto& gen : tree.generations) {
    for (int id : gen) {
      if (!forest.gc.good[id] || forest.tree_of[id] != -1) continue;
      // unassigned maximal good cube: a new tree
      const int ti = static_cast<int>(forest.trees.size());
      CoronaTree t;
      t.top = id;
      forest.tree_of[id] = ti;
      std::vector<int> queue{id};
      t.cubes.push_back(id);
      const HorizontalPlane vtop = plane_from(forest.gc.plane.at(id));
      while (!queue.empty()) {
        const int qid = queue.back();
        queue.pop_back();
        const auto& children = tree.cubes[qid].children;
        if (children.empty()) continue; // resolution floor: not a stop
        bool adopt = true;
        for (int ch : children) {
          if (!forest.gc.good[ch]) { adopt = false; break; }
          const HorizontalPlane vch = plane_from(forest.gc.plane.at(ch));
          if (!angle_within(plane_angle(vch, vtop), 1.0 + params.eta)) {
            adopt = false;
            break;
          }
        }
        if (adopt) {
          for (int ch : children) {
            forest.tree_of[ch] = ti;
            t.cubes.push_back(ch);
            queue.push_back(ch);
          }
        } else {
          t.minimal.push_back(qid);
        }
      }
      std::sort(t.cubes.begin(), t.cubes.end());
      std::sort(t.minimal.begin(), t.minimal.end());
      forest.trees.push_back(std::move(t));
    }
  }
  return forest;
}

void classify_trees(CoronaForest& forest, const CubeTree& tree, const PointCloud& c) {
  (void)c;
  for (CoronaTree& t : forest.trees) {
    t.m1.clear();
    t.m2.clear();
    t.mass_m1 = t.mass_m2 = 0;
    for (int qid : t.minimal) {
      bool bad_child = false;
      for (int ch : tree.cubes[qid].children)
        if (!forest.gc.good[ch]) { bad_child = true; break; }
      if (bad_child) {
        t.m1.push_back(qid);
        t.mass_m1 += tree.cubes[qid].mass;
      } else {
        t.m2.push_back(qid);
        t.mass_m2 += tree.cubes[qid].mass;
      }
    }
    const double top_mass = tree.cubes[t.top].mass;
    t.mass_unstopped = top_mass - t.mass_m1 - t.mass_m2;
    t.f1 = t.mass_m1 >= top_mass / 4.0;
    t.f2 = t.mass_unstopped >= top_mass / 4.0;
    t.f3 = t.mass_m2 >= top_mass / 2.0;
    if (!t.f1 && !t.f2 && !t.f3)
      throw std::logic_error("classify_trees: tree received no label");
  }
}

ForestCheck verify_forest(const CoronaForest& forest, const CubeTree& tree) {
  ForestCheck out;
  for (size_t id = 0; id < tree.cubes.size(); ++id)
    if (forest.gc.good[id] && forest.tree_of[id] < 0) out.partition_ok = false;
  for (size_t ti = 0; ti < forest.trees.size(); ++ti) {
    const CoronaTree& t = forest.trees[ti];
    const HorizontalPlane vtop = plane_from(forest.gc.plane.at(t.top));
    std::vector<char> inS(tree.cubes.size(), 0);
    for (int id : t.cubes) inS[id] = 1;
    for (int id : t.cubes) {
      if (forest.tree_of[id] != static_cast<int>(ti)) out.partition_ok = false;
      // sandwich closure: the parent chain up to the top stays in S
      if (id != t.top) {
        int p = tree.cubes[id].parent;
        if (p < 0 || !inS[p]) out.coherent_ok = false;
      }
      // children all-in-or-all-out
      const auto& ch = tree.cubes[id].children;
      if (!ch.empty()) {
        int cnt = 0;
        for (int cc : ch) cnt += inS[cc];
        if (cnt != 0 && cnt != static_cast<int>(ch.size())) out.coherent_ok = false;
      }
      const HorizontalPlane vq = plane_from(forest.gc.plane.at(id));
      if (!angle_within(plane_angle(vq, vtop), 1.0 + forest.params.eta + 1e-12))
        out.angle_ok = false;
    }
  }
  return out;
}

Vec tree_h_function(const CoronaForest& forest, int tree_index, const CubeTree& tree,
                    const PointCloud& c) {
  const CoronaTree& t = forest.trees.at(tree_index);
  Vec h = Vec::Constant(c.size(), std::numeric_limits<double>::infinity());
  for (int qid : t.cubes) {
    const DyadicCube& q = tree.cubes[qid];
    Vec dq = Vec::Constant(c.size(), std::numeric_limits<double>::infinity());
    for (int m : q.members) dq = dq.cwiseMin(dists_from(c, m));
    h = h.cwiseMin((dq.array() + q.diam).matrix());
  }
  return h;
}

PcReport verify_pc(const CoronaForest& forest, int tree_index, const CubeTree& tree,
                   const PointCloud& c, int samples, Rng& rng) {
  const CoronaTree& t = forest.trees.at(tree_index);
  const CoronaParams& params = forest.params;
  const std::vector<int> region = enlarge(tree, c, t.top, params.k0);
  const Vec h = tree_h_function(forest, tree_index, tree, c);
  const HorizontalPlane vs = plane_from(forest.gc.plane.at(t.top));

  PcReport rep;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(region.size()) - 1);
  for (int s = 0; s < samples; ++s) {
    const int x = region[pick(rng)];
    const int y = region[pick(rng)];
    if (x == y) { ++rep.gated_out; continue; }
    const double dxy = dist(c.point(x), c.point(y));
    if (!(dxy > params.eta * std::min(h(x), h(y)))) {
      ++rep.gated_out;
      continue;
    }
    ++rep.sampled;
    const double dproj = dist(project_plane(vs, c.point(x)), project_plane(vs, c.point(y)));
    const double bound = (1.0 + 2.0 * params.eta) * dproj;
    if (dproj > 0) rep.worst_ratio = std::max(rep.worst_ratio, dxy / dproj);
    rep.pairs.push_back(PcViolation{x, y, dxy, dproj});
    if (dxy > bound + 1e-12)
      rep.violations.push_back(PcViolation{x, y, dxy, dproj});
  }
  return rep;
}

GraphExtract extract_graph(const CoronaForest& forest, int tree_index,
                           const CubeTree& tree, const PointCloud& c) {
  const CoronaTree& t = forest.trees.at(tree_index);
  const CoronaParams& params = forest.params;
  GraphExtract out;
  const double D = tree.empirical_D;
  out.theta = (tree.rho / (D * D)) / (1.0 / (params.k0 - 1.0) + 1.0 / params.eta);
  out.intrinsic_envelope = 6.0 * std::pow(2.0 * params.eta, 0.25);

  // K0-enlargements of every tree cube, smallest diameter first
  std::vector<int> order = t.cubes;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (tree.cubes[a].diam != tree.cubes[b].diam)
      return tree.cubes[a].diam < tree.cubes[b].diam;
    return a < b;
  });
  std::vector<std::vector<char>> in_k0(order.size(), std::vector<char>(c.size(), 0));
  for (size_t oi = 0; oi < order.size(); ++oi)
    for (int m : enlarge(tree, c, order[oi], params.k0)) in_k0[oi][m] = 1;

  size_t top_pos = 0;
  for (size_t oi = 0; oi < order.size(); ++oi)
    if (order[oi] == t.top) top_pos = oi;
  std::vector<int> region;
  for (int i = 0; i < c.size(); ++i)
    if (in_k0[top_pos][i]) region.push_back(i);

  auto sep_scale = [&](int x, int y) {
    for (size_t oi = 0; oi < order.size(); ++oi)
      if (in_k0[oi][x] && in_k0[oi][y]) return tree.cubes[order[oi]].diam;
    return tree.cubes[t.top].diam;
  };

  for (int cand : region) {
    bool ok = true;
    for (int y : out.net) {
      const double d = dist(c.point(cand), c.point(y));
      if (d < out.theta * sep_scale(cand, y)) { ok = false; break; }
    }
    if (ok) out.net.push_back(cand);
  }

  // projection injectivity and the intrinsic constant over the net
  const HorizontalPlane vs = plane_from(forest.gc.plane.at(t.top));
  const IsotropicFrame v0 = vs.frame;
  std::vector<GraphSample> gs;
  gs.reserve(out.net.size());
  for (int i : out.net)
    gs.push_back(GraphSample{project_subgroup(v0, c.point(i)), c.point(i)});
  for (size_t a = 0; a < out.net.size() && out.injective; ++a)
    for (size_t b = a + 1; b < out.net.size(); ++b) {
      const double dp = dist(gs[a].v, gs[b].v);
      if (dp < 1e-14) {
        out.injective = false;
        out.collision = PcViolation{out.net[a], out.net[b],
                                    dist(gs[a].phi, gs[b].phi), dp};
        break;
      }
    }
  if (out.injective && gs.size() >= 2)
    out.intrinsic_estimate = intrinsic_lip_constant(gs, v0);

  // approximation property: x in K0 Q has a net point within eta diam(Q)
  Vec near = Vec::Constant(c.size(), std::numeric_limits<double>::infinity());
  for (int y : out.net) near = near.cwiseMin(dists_from(c, y));
  for (size_t oi = 0; oi < order.size(); ++oi) {
    const double dq = tree.cubes[order[oi]].diam;
    if (dq <= 0) continue;
    for (int i = 0; i < c.size(); ++i) {
      if (!in_k0[oi][i]) continue;
      const double ratio = near(i) / (params.eta * dq);
      out.worst_approx_ratio = std::max(out.worst_approx_ratio, ratio);
      if (ratio > 1.0 + 1e-9) out.approx_ok = false;
    }
  }
  return out;
}

PackingReport packing_report(const CoronaForest& forest, const CubeTree& tree) {
  PackingReport rep;
  const size_t m = tree.cubes.size();
  std::vector<double> bad(m, 0), tops12(m, 0), tops3(m, 0);
  for (size_t id = 0; id < m; ++id)
    if (!forest.gc.good[id]) bad[id] = tree.cubes[id].mass;
  for (const CoronaTree& t : forest.trees) {
    const double tm = tree.cubes[t.top].mass;
    if (t.f1 || t.f2) tops12[t.top] += tm;
    if (t.f3) tops3[t.top] += tm;
  }
  // bottom-up accumulation over the cube tree (children have larger ids)
  for (size_t id = m; id-- > 0;) {
    for (int ch : tree.cubes[id].children) {
      bad[id] += bad[ch];
      tops12[id] += tops12[ch];
      tops3[id] += tops3[ch];
    }
  }
  rep.bad_by_root.resize(m);
  rep.tops12_by_root.resize(m);
  rep.tops3_by_root.resize(m);
  for (size_t id = 0; id < m; ++id) {
    const double mass = tree.cubes[id].mass;
    rep.bad_by_root[id] = bad[id] / mass;
    rep.tops12_by_root[id] = tops12[id] / mass;
    rep.tops3_by_root[id] = tops3[id] / mass;
    rep.bad_max = std::max(rep.bad_max, rep.bad_by_root[id]);
    rep.tops12_max = std::max(rep.tops12_max, rep.tops12_by_root[id]);
    rep.tops3_max = std::max(rep.tops3_max, rep.tops3_by_root[id]);
  }
  return rep;
}

F3Check f3_bound_check(const CoronaForest& forest, const CubeTree& tree,
                       const PointCloud& c, const CoeffOptions& opts) {
  F3Check out;
  const CoronaParams& params = forest.params;
  const double eps_pow = std::pow(params.epsilon, -(6.0 * c.k + 1.0));
  for (size_t ti = 0; ti < forest.trees.size(); ++ti) {
    const CoronaTree& t = forest.trees[ti];
    if (!t.f3) continue;
    ++out.trees_checked;
    const double lhs = tree.cubes[t.top].mass;
    const Vec h = tree_h_function(forest, static_cast<int>(ti), tree, c);
    const double t_hi = params.k0 * tree.cubes[t.top].diam;
    const double ln2 = std::log(2.0);
    double integral = 0;
    for (int x : enlarge(tree, c, t.top, params.k0)) {
      const double t_lo = std::max(h(x) / params.k0, c.resolution);
      for (double tt = t_hi; tt >= t_lo; tt *= 0.5) {
        const Region reg = ball_region(c, x, params.k0 * tt);
        CoeffOptions o = opts;
        o.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (x + 1));
        const CoeffResult res =
            optimize_coeff(c, reg, {CoeffFamily::BetaProjAffine, 1.0}, o);
        integral += res.value * res.value * c.w(x) * ln2;
      }
    }
    const double rhs = eps_pow * integral;
    const double margin = rhs > 0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    out.worst_margin = std::max(out.worst_margin, margin);
    if (lhs > rhs) out.ok = false;
  }
  return out;
}

} // namespace hrect

#pragma once

// Stopping-time corona decomposition: good cubes with reference planes,
// coherent trees under the angle rule, tree classification, projection
// verification, intrinsic-graph extraction, and packing reports.

#include "hrect/carleson.hpp"
#include "hrect/cloud.hpp"
#include "hrect/coeff.hpp"

#include <unordered_map>
#include <vector>

namespace hrect {

struct CoronaParams {
  double eta = 0.1;
  double epsilon = 0.025; // min(0.05, eta/4)
  double k0 = 4.0;
  double k_big = 89.0;    // K >= 2 K0 (1 + 1/eta) + 1

  static CoronaParams defaults(double eta = 0.1) {
    CoronaParams p;
    p.eta = eta;
    p.epsilon = std::min(0.05, eta / 4.0);
    p.k0 = 4.0;
    p.k_big = 2.0 * p.k0 * (1.0 + 1.0 / eta) + 1.0;
    return p;
  }

  void validate() const {
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("corona: eta in (0,1)");
    if (!(epsilon > 0 && epsilon < 1))
      throw std::invalid_argument("corona: epsilon in (0,1)");
    if (!(k0 >= 2)) throw std::invalid_argument("corona: K0 >= 2");
    if (k_big < 2.0 * k0 * (1.0 + 1.0 / eta) + 1.0 - 1e-9)
      throw std::invalid_argument("corona: K >= 2 K0 (1 + 1/eta) + 1 required");
  }
};

// ---------------------------------------------------------------------------
// Good cubes.
// ---------------------------------------------------------------------------

struct GoodCubes {
  std::vector<char> good;                         // by cube id
  std::unordered_map<int, PlaneCandidate> plane;  // V_Q
  std::unordered_map<int, double> sup_dist;       // achieved sup over KQ
  int optimizer_failures = 0;                     // conservatively marked bad
};

/// Q is good iff the best-fit horizontal plane over KQ achieves
/// sup-distance <= epsilon^2 diam(Q); V_Q is the achieving plane.
GoodCubes good_cubes(const CubeTree& tree, const PointCloud& c,
                     const CoronaParams& params, const CoeffOptions& opts = {});

// ---------------------------------------------------------------------------
// Forest.
// ---------------------------------------------------------------------------

struct CoronaTree {
  int top = -1;
  std::vector<int> cubes;   // ids, ascending
  std::vector<int> minimal; // stopped cubes (children exist, none adopted)
  std::vector<int> m1;      // minimal with a bad child
  std::vector<int> m2;      // minimal, all children good, an angle stop
  double mass_m1 = 0, mass_m2 = 0, mass_unstopped = 0;
  bool f1 = false, f2 = false, f3 = false;
};

struct CoronaForest {
  CoronaParams params;
  GoodCubes gc;
  std::vector<CoronaTree> trees;
  std::vector<int> tree_of; // cube id -> tree index, -1 for bad cubes
};

/// Greedy top-down construction: an unassigned good maximal cube starts a
/// tree; the children of an in-tree cube are adopted iff all of them are
/// good and at angle <= 1+eta to the top's plane. Childless cubes at the
/// resolution floor are not counted as minimal.
CoronaForest build_forest(const CubeTree& tree, const PointCloud& c,
                          GoodCubes gc, const CoronaParams& params);

/// Recomputes m1/m2 masses and the F1/F2/F3 labels; throws if a tree would
/// receive no label.
void classify_trees(CoronaForest& forest, const CubeTree& tree, const PointCloud& c);

struct ForestCheck {
  bool coherent_ok = true; // unique top, sandwich closure, all-in-or-all-out
  bool partition_ok = true; // trees partition the good set
  bool angle_ok = true;     // every in-tree plane within 1+eta of its top
};

ForestCheck verify_forest(const CoronaForest& forest, const CubeTree& tree);

// ---------------------------------------------------------------------------
// Projection verification and graph extraction.
// ---------------------------------------------------------------------------

/// h_S(x) = inf{d(x,Q) + diam(Q) : Q in S} for every cloud point.
Vec tree_h_function(const CoronaForest& forest, int tree_index,
                    const CubeTree& tree, const PointCloud& c);

struct PcViolation {
  int x = -1, y = -1;
  double dxy = 0, dproj = 0;
};

struct PcReport {
  int sampled = 0;
  int gated_out = 0; // pairs excluded by the h_S gate
  double worst_ratio = 0;
  std::vector<PcViolation> pairs; // every tested pair, for the CSV report
  std::vector<PcViolation> violations;
};

/// Samples point pairs in K0 Q(S); pairs with d(x,y) > eta min(h(x),h(y))
/// must satisfy d(x,y) <= (1+2 eta) d(P_{V_S}(x), P_{V_S}(y)).
PcReport verify_pc(const CoronaForest& forest, int tree_index, const CubeTree& tree,
                   const PointCloud& c, int samples, Rng& rng);

struct GraphExtract {
  std::vector<int> net;       // cloud indices
  double theta = 0;           // separation parameter used
  bool injective = true;
  PcViolation collision;      // set when !injective
  double intrinsic_estimate = 0;
  double intrinsic_envelope = 0; // 6 (2 eta)^{1/4}
  bool approx_ok = true;      // every x in K0 Q has a net point within eta diam(Q)
  double worst_approx_ratio = 0;
};

/// Greedy maximal net with pairwise separation theta * diam(Q_{x,y}),
/// projected graph samples over V_S, and the intrinsic constant estimate.
GraphExtract extract_graph(const CoronaForest& forest, int tree_index,
                           const CubeTree& tree, const PointCloud& c);

// ---------------------------------------------------------------------------
// Packing.
// ---------------------------------------------------------------------------

struct PackingReport {
  std::vector<double> bad_by_root;    // normalized, indexed by cube id
  std::vector<double> tops12_by_root; // F1 u F2 top masses
  std::vector<double> tops3_by_root;  // F3 top masses
  double bad_max = 0, tops12_max = 0, tops3_max = 0;
};

PackingReport packing_report(const CoronaForest& forest, const CubeTree& tree);

struct F3Check {
  int trees_checked = 0;
  bool ok = true;
  double worst_margin = 0; // max over F3 trees of lhs/rhs
};

/// mu(Q(S)) <= eps^{-6k-1} * discretized double integral of
/// beta_{1,pi,A}(x, K0 t)^2 over K0 Q(S) x [h_S(x)/K0, K0 diam(Q(S))].
F3Check f3_bound_check(const CoronaForest& forest, const CubeTree& tree,
                       const PointCloud& c, const CoeffOptions& opts = {});

} // namespace hrect

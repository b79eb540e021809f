#pragma once

// Carleson-type sums over cube trees, weak-geometric-lemma counts,
// multiresolution sums over dyadic nets, and the divergence/convergence
// dichotomy experiment for the iterated-bump curve.

#include "hrect/cloud.hpp"
#include "hrect/coeff.hpp"

#include <string>
#include <vector>

namespace hrect {

/// sum_{Q subset root} h(lambda Q)^q mu(Q) / mu(root).
/// Throws if the field misses a cube under the root.
double glem_sum(const CubeTree& tree, const CoeffField& field, double q, int root);

/// sum_{Q subset root, h(lambda Q) > eps} mu(Q) / mu(root).
double wgl_count(const CubeTree& tree, const CoeffField& field, double eps, int root);

/// Per-generation increments of the glem sum under `root`:
/// inc[j] = sum_{Q in generation j, Q subset root} h(lambda Q)^q mu(Q)/mu(root).
std::vector<double> glem_increments(const CubeTree& tree, const CoeffField& field,
                                    double q, int root);

struct MultiresLevel {
  int j = 0;
  double increment = 0;   // 2^{-j} sum_{x in Delta_j} beta^2(x, A 2^{-j})
  double partial_sum = 0; // running sum of increments
  int net_points = 0;
};

/// Partial sums of the multiresolution quantity for beta_{p,V_1} balls.
/// Levels outside the net or outside [j_lo, j_hi] are skipped.
std::vector<MultiresLevel> multires_sum(const PointCloud& c, const DyadicNet& net,
                                        double p, double A, int j_lo, int j_hi,
                                        const CoeffOptions& opts = {});

struct HarmonicFit {
  double slope = 0;    // least-squares c in inc_j ~ c / (ceil(j/2)+1)
  double rel_resid = 0;
};

HarmonicFit harmonic_fit(const std::vector<MultiresLevel>& levels);

struct DichotomyReport {
  std::vector<MultiresLevel> beta_levels;  // beta_1^2 multiresolution
  std::vector<MultiresLevel> bhat_levels;  // bhat_1^4 cube-sum increments per generation
  HarmonicFit fit;
  double cloud_mass = 0;
  int cloud_points = 0;
};

/// Runs the experiment on the generation-J curve cloud with constant A:
/// the beta_1^2 multiresolution sums over net levels [j_lo, j_hi] against
/// the bhat_1^4 cube sums per generation.
DichotomyReport dichotomy_experiment(const CurveConfig& cfg, int J, double A = 5.0,
                                     int j_lo = 0, int j_hi = 8,
                                     const CoeffOptions& opts = {}, int threads = 1);

/// Riemann discretization of the ball-integral Carleson form
/// int_0^R int_B h(y,r)^q dmu dr/r normalized by R^k, radii dyadic in
/// [10*resolution, R]. Used as a sanity envelope against the cube sum.
double integral_glem_riemann(const PointCloud& c, const CoeffKind& kind, double q,
                             const CoeffOptions& opts = {});

} // namespace hrect

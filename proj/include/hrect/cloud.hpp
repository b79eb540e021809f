#pragma once

// Weighted point clouds sampling H^k on k-regular sets, regularity
// diagnostics, Christ-type dyadic cube systems, and dyadic nets.

#include "hrect/curve.hpp"
#include "hrect/hgroup.hpp"

#include <string>
#include <vector>

namespace hrect {

struct PointCloud {
  Mat z;         // 2n x N column-per-point
  Vec t;         // N
  Vec w;         // N, positive H^k weights
  double resolution = 0; // finest meaningful scale
  int n = 1;
  int k = 1;

  int size() const { return static_cast<int>(t.size()); }
  double total_mass() const { return w.sum(); }
  HPoint point(int i) const { return HPoint{z.col(i), t(i)}; }
};

void validate_cloud(const PointCloud& c);

/// Koranyi distances from point i of the cloud to every column.
Vec dists_from(const PointCloud& c, int i);

/// Koranyi distances from an arbitrary point to every column.
Vec dists_from_point(const PointCloud& c, const HPoint& p);

/// Exact diameter for small clouds, iterated-farthest (factor <= 2) above cap.
double cloud_diameter(const PointCloud& c, int exact_cap = 4000);

/// Apply a left translation to every point.
PointCloud translate_cloud(const PointCloud& c, const HPoint& g);

/// Apply a rotation to every point.
PointCloud rotate_cloud(const PointCloud& c, const Rotation& R);

/// Dilate by r; weights scale by r^k, resolution by r.
PointCloud dilate_cloud(const PointCloud& c, double r);

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

/// Arclength sampling of a lifted polyline at spacing <= step; node weights
/// are the adjacent half-segment lengths, so total mass equals the length.
PointCloud cloud_from_polyline(const HorizontalPolyline& gamma, double step);

/// Midpoints of the middle-half Cantor construction on the t-axis,
/// 2^levels points of equal weight 2^{-levels}.
PointCloud cantor_vertical(int levels);

/// Uniform samples of the horizontal segment [-1,1] x {0} x {0}.
PointCloud flat_segment_cloud(int points);

/// Two unit segments meeting at the origin with planar angle `angle`.
PointCloud two_segment_cloud(double angle, int points_per_arm);

/// Intrinsic graph over the x-axis: tilt of given slope plus an optional
/// sinusoidal ripple (amplitude, wavelength), sampled as a horizontal lift.
PointCloud tilted_graph_cloud(double slope, int points, double ripple_amplitude = 0.0,
                              double ripple_wavelength = 0.25);

// ---------------------------------------------------------------------------
// Regularity diagnostics.
// ---------------------------------------------------------------------------

struct RegularityProfile {
  double min_ratio = 0;
  double max_ratio = 0;
  double median_ratio = 0;
  double c_estimate = 0; // max(max_ratio, 1/min_ratio)
  bool failed = false;   // c_estimate above the reporting threshold
  int trials = 0;
};

/// Ratios mu(B(x,r))/r^k over random centers x in the cloud and radii
/// log-uniform in [r_lo, r_hi]; defaults to [10*resolution, diam].
RegularityProfile regularity_profile(const PointCloud& c, int trials, Rng& rng,
                                     double r_lo = -1, double r_hi = -1);

// ---------------------------------------------------------------------------
// Christ-type dyadic cubes.
// ---------------------------------------------------------------------------

struct DyadicCube {
  int id = -1;
  int j = 0;                 // generation exponent, scale rho^j
  std::vector<int> members;  // cloud indices
  int center = -1;           // cloud index of x_Q
  int parent = -1;           // cube id, -1 at the top
  std::vector<int> children; // cube ids
  double diam = 0;           // over members (capped-exact)
  double mass = 0;           // sum of member weights
};

struct CubeTree {
  double rho = 0.5;
  int j0 = 0;                                // top generation exponent
  std::vector<DyadicCube> cubes;             // id-indexed
  std::vector<std::vector<int>> generations; // cube ids per generation
  double empirical_D = 1.0;                  // constant for properties (3)-(4)

  int gen_count() const { return static_cast<int>(generations.size()); }
  int top() const { return generations.front().front(); }
  const DyadicCube& cube(int id) const { return cubes[id]; }
};

/// Builds the nested cube system from greedy nested rho^j-separated nets:
/// finest-level cells assign each point to its nearest center (ties by
/// lowest index), coarser cubes are unions along nearest-ancestor center
/// chains. Generations stop once rho^j < 2 * resolution.
CubeTree christ_cubes(const PointCloud& c, double rho = 0.5);

/// Member indices of lambda*Q = {x : d(x,Q) <= (lambda-1) diam(Q)}.
std::vector<int> enlarge(const CubeTree& tree, const PointCloud& c, int cube_id,
                         double lambda);

struct ChristCheck {
  bool partition_ok = true;
  bool nesting_ok = true;
  bool diam_ok = true;       // diam(Q) <= D rho^j
  bool inner_ball_ok = true; // B(x_Q, D^{-1} rho^j) cap cloud subset Q
  bool mass_ok = true;       // per-generation mass conservation
  double D = 1.0;
};

/// Re-verifies properties (1)-(4) and mass conservation on the sample.
ChristCheck verify_christ(const CubeTree& tree, const PointCloud& c);

/// Empirical small-boundary constant: max over sampled cubes of
/// mu{x in Q : d(x, E\Q) <= eta rho^j} / (eta^{1/D} mu(Q)).
double small_boundary_constant(const CubeTree& tree, const PointCloud& c,
                               const std::vector<double>& etas,
                               int max_cubes_per_gen = 16);

// ---------------------------------------------------------------------------
// Dyadic nets and multiresolution families.
// ---------------------------------------------------------------------------

struct DyadicNet {
  int j_first = 0;                      // coarsest level exponent
  std::vector<std::vector<int>> levels; // levels[i] = Delta_{j_first+i}

  int level_count() const { return static_cast<int>(levels.size()); }
  int j_of(int i) const { return j_first + i; }
};

/// Greedy nested nets: Delta_j is 2^{-j}-separated and 2^{-j}-covering.
DyadicNet dyadic_net(const PointCloud& c);

struct NetCheck {
  bool nested_ok = true;
  bool separation_ok = true;
  bool covering_ok = true;
};

NetCheck verify_net(const DyadicNet& net, const PointCloud& c);

struct MultiresBall {
  int j = 0;
  int center = 0; // cloud index
  double radius = 0;
};

/// Balls B(x, A 2^{-j}) for x in Delta_j, enumerated coarse-to-fine.
std::vector<MultiresBall> multires_family(const DyadicNet& net, double A);

} // namespace hrect

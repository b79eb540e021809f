#pragma once

// Heisenberg group arithmetic: group law, Koranyi metric, dilations,
// rotations, horizontal planes and their projections, plane angles.
//
// Points of H^n are pairs (z, t) with z in R^{2n} and t in R. All
// operations are pure and freely shareable across threads.

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace hrect {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Symplectic-type form on R^{2n}: omega(a,b) = 1/2 sum_i (a_i b_{n+i} - a_{n+i} b_i).
template <typename DA, typename DB>
double symplectic_form(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const Eigen::Index n = a.size() / 2;
  return 0.5 * (a.head(n).dot(b.tail(n)) - a.tail(n).dot(b.head(n)));
}

/// Koranyi norm of coordinates (z, t): (|z|^4 + 16 t^2)^{1/4}.
template <typename DZ>
double koranyi_norm_zt(const Eigen::MatrixBase<DZ>& z, double t) {
  const double zz = z.squaredNorm();
  return std::pow(zz * zz + 16.0 * t * t, 0.25);
}

struct HPoint {
  Vec z;        // horizontal coordinates, dimension 2n
  double t = 0; // vertical coordinate

  int n() const { return static_cast<int>(z.size()) / 2; }
};

/// H^1 shorthand.
inline HPoint hpoint(double x, double y, double t) {
  HPoint p;
  p.z = Eigen::Vector2d(x, y);
  p.t = t;
  return p;
}

inline HPoint h_identity(int n) { return HPoint{Vec::Zero(2 * n), 0.0}; }

inline void check_same_dim(const HPoint& p, const HPoint& q) {
  if (p.z.size() != q.z.size())
    throw std::invalid_argument("HPoint dimension mismatch");
}

/// Group product (z,t)*(z',t') = (z+z', t+t'+omega(z,z')).
inline HPoint mul(const HPoint& p, const HPoint& q) {
  check_same_dim(p, q);
  return HPoint{p.z + q.z, p.t + q.t + symplectic_form(p.z, q.z)};
}

inline HPoint inverse(const HPoint& p) { return HPoint{-p.z, -p.t}; }

inline double koranyi_norm(const HPoint& p) { return koranyi_norm_zt(p.z, p.t); }

/// Left-invariant Koranyi distance d(p,q) = ||q^{-1} * p||.
inline double dist(const HPoint& p, const HPoint& q) {
  check_same_dim(p, q);
  // q^{-1} p = (p.z - q.z, p.t - q.t - omega(q.z, p.z))
  return koranyi_norm_zt(p.z - q.z, p.t - q.t - symplectic_form(q.z, p.z));
}

/// Anisotropic dilation (z,t) -> (r z, r^2 t); scales the norm by r.
inline HPoint dilate(const HPoint& p, double r) {
  if (!(r > 0)) throw std::invalid_argument("dilate: r must be positive");
  return HPoint{r * p.z, r * r * p.t};
}

/// Euclidean coordinate projections pi and pi_t.
inline const Vec& project_z(const HPoint& p) { return p.z; }
inline double project_t(const HPoint& p) { return p.t; }

// ---------------------------------------------------------------------------
// Rotations: (z,t) -> (A z, t) with A orthogonal and omega-preserving.
// ---------------------------------------------------------------------------

struct Rotation {
  Mat A; // 2n x 2n
};

/// Validates orthogonality and omega-invariance to 1e-10; throws otherwise.
Rotation make_rotation(Mat A);

/// Haar-ish random rotation, built from a random unitary on C^n.
Rotation random_rotation(int n, Rng& rng);

inline HPoint rotate(const Rotation& R, const HPoint& p) {
  return HPoint{R.A * p.z, p.t};
}

// ---------------------------------------------------------------------------
// Isotropic frames and horizontal planes.
// ---------------------------------------------------------------------------

/// k orthonormal vectors in R^{2n} spanning an isotropic subspace.
struct IsotropicFrame {
  Mat basis; // 2n x k, orthonormal columns, omega(b_i, b_j) = 0

  int n() const { return static_cast<int>(basis.rows()) / 2; }
  int k() const { return static_cast<int>(basis.cols()); }
};

/// Validates orthonormality and isotropy to 1e-10; throws otherwise.
IsotropicFrame make_frame(Mat basis);

/// Direction (cos phi, sin phi) in H^1; every line in R^2 is isotropic.
IsotropicFrame frame_h1(double phi);

/// Random isotropic k-frame in R^{2n} (uniform via a complex Gaussian).
IsotropicFrame random_isotropic_frame(int n, int k, Rng& rng);

/// Small random move on the isotropic Stiefel manifold.
IsotropicFrame perturb_frame(const IsotropicFrame& f, double sigma, Rng& rng);

/// Affine horizontal k-plane V = base * (span(frame) x {0}).
struct HorizontalPlane {
  HPoint base;
  IsotropicFrame frame;
};

inline HorizontalPlane subgroup_plane(const IsotropicFrame& f) {
  return HorizontalPlane{h_identity(f.n()), f};
}

/// Point of the plane at parameter s: base * (frame * s, 0).
HPoint plane_point(const HorizontalPlane& V, const Vec& s);

/// Projection onto a horizontal subgroup V0: (z,t) -> (pi_{V_I}(z), 0).
HPoint project_subgroup(const IsotropicFrame& V0, const HPoint& p);

/// Projection onto an affine horizontal plane: P_V(y) = x * P_{V0}(x^{-1} y).
HPoint project_plane(const HorizontalPlane& V, const HPoint& y);

/// Complementary projection P_W(y) = (P_{V0}(y))^{-1} * y.
HPoint project_complement(const IsotropicFrame& V0, const HPoint& p);

// ---------------------------------------------------------------------------
// Distance to a plane.
// ---------------------------------------------------------------------------

struct DistToPlaneResult {
  double value = 0;       // inf_s d(y, base*(frame s, 0))
  Vec s;                  // minimizing parameter
  bool converged = true;
  int iterations = 0;
};

/// Distance from y to the horizontal plane V, to relative accuracy tol.
///
/// After moving y to base-coordinates the objective reduces to a single
/// scalar minimization of (a + u^2)^2 + 16 (b - c u)^2 whose derivative is a
/// monotone cubic, so the minimizer is the unique root of
/// u^3 + (a + 8 c^2) u = 8 c b.
DistToPlaneResult dist_to_plane_full(const HPoint& y, const HorizontalPlane& V,
                                     double tol = 1e-12);

inline double dist_to_plane(const HPoint& y, const HorizontalPlane& V,
                            double tol = 1e-12) {
  return dist_to_plane_full(y, V, tol).value;
}

// ---------------------------------------------------------------------------
// Angle between horizontal planes.
// ---------------------------------------------------------------------------

/// Angle(V1,V2) = min{C >= 1 : |x-y| <= C |pi_{pi(V2)}(x) - pi_{pi(V2)}(y)|}
/// over x,y in pi(V1); equals 1/sigma_min(B2^T B1). Returns nullopt when the
/// configuration is degenerate (sigma_min = 0, "infinite angle").
std::optional<double> plane_angle(const HorizontalPlane& V1, const HorizontalPlane& V2);

/// True iff the angle is finite and at most `bound`.
inline bool angle_within(const std::optional<double>& a, double bound) {
  return a.has_value() && *a <= bound;
}

// ---------------------------------------------------------------------------
// Intrinsic Lipschitz graphs.
// ---------------------------------------------------------------------------

struct GraphSample {
  HPoint v;   // point of the subgroup V0
  HPoint phi; // graph point Phi(v) = v * phi(v)
};

/// Largest pairwise ratio ||P_W(Phi(v')^{-1} Phi(v))|| / ||P_V(...)||;
/// a lower bound for the intrinsic Lipschitz constant of the sampled map.
/// Throws on coincident base points with distinct graph values.
double intrinsic_lip_constant(const std::vector<GraphSample>& samples,
                              const IsotropicFrame& V0);

/// Largest pairwise metric Lipschitz ratio d(Phi(v),Phi(v')) / d(v,v').
double graph_metric_lip(const std::vector<GraphSample>& samples);

// ---------------------------------------------------------------------------
// Ambient parameters.
// ---------------------------------------------------------------------------

struct AmbientGroup {
  int n = 1;
  int k = 1;

  AmbientGroup(int n_, int k_) : n(n_), k(k_) {
    if (n < 1 || k < 1 || k > n)
      throw std::invalid_argument("AmbientGroup: need 1 <= k <= n");
  }
};

} // namespace hrect

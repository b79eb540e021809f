#pragma once

// The five multiscale flatness coefficient families on cube and ball
// regions, optimized over candidate planes, plus the exhaustive L1 line
// oracle. Reported values are upper bounds on the defining infima: every
// candidate plane is feasible, and the search restricts plane base points
// to the region's centroid-snapped sample.

#include "hrect/cloud.hpp"
#include "hrect/hgroup.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace hrect {

enum class CoeffFamily {
  BetaHorizontal,     // metric distance to horizontal planes
  BetaStratified,     // (proj^2 + metric^4)^{1/4}
  BetaProjHorizontal, // projected distance to isotropic affine planes
  BetaProjAffine,     // projected distance to arbitrary affine planes
  Iota                // pairwise distance distortion under P_V0
};

constexpr double kPInf = std::numeric_limits<double>::infinity();

struct CoeffKind {
  CoeffFamily family = CoeffFamily::BetaHorizontal;
  double p = 1.0; // 1 or infinity

  CoeffKind() = default;
  CoeffKind(CoeffFamily f, double p_) : family(f), p(p_) {
    if (p != 1.0 && p != kPInf)
      throw std::invalid_argument("CoeffKind: p must be 1 or infinity");
  }
};

const char* family_name(CoeffFamily f);

// ---------------------------------------------------------------------------
// Regions.
// ---------------------------------------------------------------------------

struct Region {
  std::vector<int> idx;  // cloud indices
  double scale = 0;      // diam(lambda Q) for cubes, r for balls
  double mass_norm = 0;  // mu(lambda Q) for cubes, r^k for balls
  int snap = -1;         // centroid-snapped member (cloud index)

  int size() const { return static_cast<int>(idx.size()); }
};

Region cube_region(const PointCloud& c, const CubeTree& tree, int cube_id,
                   double lambda);
Region ball_region(const PointCloud& c, int center, double r);
Region whole_cloud_region(const PointCloud& c);

// ---------------------------------------------------------------------------
// Candidate planes and objective evaluation.
// ---------------------------------------------------------------------------

struct PlaneCandidate {
  Vec base_z;   // 2n
  double base_t = 0;
  Mat frame;    // 2n x k orthonormal; isotropic except for BetaProjAffine
};

PlaneCandidate candidate_from(const HorizontalPlane& V);
HorizontalPlane plane_from(const PlaneCandidate& cand);

/// Koranyi distances from the region points to the horizontal plane.
Vec plane_metric_dists(const PointCloud& c, const std::vector<int>& idx,
                       const PlaneCandidate& cand);

/// Euclidean distances from pi(points) to the affine plane pi(candidate).
Vec plane_proj_dists(const PointCloud& c, const std::vector<int>& idx,
                     const PlaneCandidate& cand);

/// The coefficient objective for one candidate plane.
double eval_coeff(const PointCloud& c, const Region& r, const CoeffKind& kind,
                  const PlaneCandidate& cand);

// ---------------------------------------------------------------------------
// Optimization.
// ---------------------------------------------------------------------------

struct CoeffOptions {
  int restarts = 6;
  int grid = 48;       // angle grid for n = k = 1
  std::uint64_t seed = 1;
  int iota_cap = 2000; // pair cost guard
};

struct CoeffResult {
  double value = 0;
  PlaneCandidate plane;
  bool converged = true;
};

/// Multi-start upper bound for the defining infimum; for n = k = 1 an angle
/// grid with golden-section polish, otherwise adaptive descent on the
/// (isotropic) Stiefel manifold.
CoeffResult optimize_coeff(const PointCloud& c, const Region& r,
                           const CoeffKind& kind, const CoeffOptions& opts = {});

// ---------------------------------------------------------------------------
// Coefficient fields over cube trees.
// ---------------------------------------------------------------------------

struct CoeffField {
  CoeffKind kind;
  double lambda = 2.0;
  std::unordered_map<int, double> value;        // cube id -> coefficient
  std::unordered_map<int, PlaneCandidate> plane; // cube id -> argmin plane
};

CoeffField evaluate_field(const PointCloud& c, const CubeTree& tree,
                          const CoeffKind& kind, double lambda,
                          const CoeffOptions& opts = {}, int threads = 1);

// ---------------------------------------------------------------------------
// Shared-candidate chain evaluation.
// ---------------------------------------------------------------------------

/// All ten family/p values computed as minima over one shared candidate
/// pool, so the comparison inequalities between them hold exactly.
struct ChainValues {
  double beta1 = 0, beta_inf = 0;
  double bhat1 = 0, bhat_inf = 0;
  double bprojv1 = 0, bprojv_inf = 0;
  double bproja1 = 0, bproja_inf = 0;
  double iota1 = 0, iota_inf = 0;
};

ChainValues evaluate_chain(const PointCloud& c, const Region& r,
                           const CoeffOptions& opts = {});

// ---------------------------------------------------------------------------
// Exhaustive L1 line oracle (independent check for the projected fits).
// ---------------------------------------------------------------------------

struct OracleLine {
  Eigen::Vector2d point{0, 0};
  Eigen::Vector2d dir{1, 0};
  double value = 0; // weighted L1 sum of orthogonal deviations
};

/// Global weighted L1 optimum over all point-pair lines plus axis-aligned
/// lines through each point; up to 12 points.
OracleLine oracle_fit(const std::vector<Eigen::Vector2d>& pts,
                      const std::vector<double>& w);

} // namespace hrect

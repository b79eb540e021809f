#include "hrect/curve.hpp"

#include <cmath>

namespace hrect {

namespace {

inline double omega2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

} // namespace

double segment_length(const CurveConfig& cfg, int n) {
  if (n < 0 || n > cfg.max_generation)
    throw std::invalid_argument("segment_length: generation out of range");
  double l = 2.0;
  for (int m = 1; m <= n; ++m) l /= 4.0 * std::cos(cfg.theta(m));
  return l;
}

PlanarPolyline build_planar_generation(const CurveConfig& cfg, int n) {
  if (n < 0 || n > cfg.max_generation)
    throw std::invalid_argument("build_planar_generation: generation out of range");
  PlanarPolyline pl;
  pl.v = {{-1.0, 0.0}, {1.0, 0.0}};
  pl.segment_length = 2.0;
  for (int m = 1; m <= n; ++m) {
    const double th = cfg.theta(m);
    const double lnew = pl.segment_length / (4.0 * std::cos(th));
    std::vector<Eigen::Vector2d> next;
    next.reserve(4 * (pl.v.size() - 1) + 1);
    next.push_back(pl.v.front());
    for (size_t i = 0; i + 1 < pl.v.size(); ++i) {
      const Eigen::Vector2d p = pl.v[i], q = pl.v[i + 1];
      const Eigen::Vector2d u = (q - p).normalized();
      const Eigen::Vector2d nu(-u.y(), u.x());
      const Eigen::Vector2d mid = 0.5 * (p + q);
      // two congruent isosceles triangles, the first below the parent
      next.push_back(p + lnew * (std::cos(th) * u - std::sin(th) * nu));
      next.push_back(mid);
      next.push_back(mid + lnew * (std::cos(th) * u + std::sin(th) * nu));
      next.push_back(q);
    }
    pl.v = std::move(next);
    pl.segment_length = lnew;
  }
  return pl;
}

HorizontalPolyline lift_horizontal(const PlanarPolyline& pl, const Eigen::Vector3d& start) {
  if (pl.v.size() < 2) throw std::invalid_argument("lift_horizontal: need >= 2 vertices");
  if ((start.head<2>() - pl.v.front()).norm() > 1e-12)
    throw std::invalid_argument("lift_horizontal: start does not project onto first vertex");
  HorizontalPolyline out;
  out.v.reserve(pl.v.size());
  out.v.push_back(start);
  double t = start.z();
  for (size_t i = 0; i + 1 < pl.v.size(); ++i) {
    t += omega2(pl.v[i], pl.v[i + 1]);
    out.v.push_back({pl.v[i + 1].x(), pl.v[i + 1].y(), t});
  }
  return out;
}

std::array<Eigen::Vector3d, 5> lambda_theta(double theta) {
  const double tn = std::tan(theta);
  return {Eigen::Vector3d{-1.0, 0.0, 0.0},
          Eigen::Vector3d{-0.5, -tn / 2.0, tn / 4.0},
          Eigen::Vector3d{0.0, 0.0, tn / 4.0},
          Eigen::Vector3d{0.5, tn / 2.0, tn / 4.0},
          Eigen::Vector3d{1.0, 0.0, 0.0}};
}

HorizontalPolyline gamma_piece(const CurveConfig& cfg, int n, long sigma, int depth) {
  const long pieces = 1L << (2 * n); // 4^n
  if (sigma < 0 || sigma >= pieces)
    throw std::invalid_argument("gamma_piece: sigma out of range");
  if (depth < 0 || n + depth > cfg.max_generation)
    throw std::invalid_argument("gamma_piece: depth out of range");

  const PlanarPolyline deep = build_planar_generation(cfg, n + depth);
  const HorizontalPolyline lift = lift_horizontal(deep, {-1.0, 0.0, 0.0});
  const long per = 1L << (2 * depth); // segments of the deep curve per piece
  const long first = sigma * per;

  const Eigen::Vector3d a3 = lift.v[first], b3 = lift.v[first + per];
  const HPoint a = hpoint(a3.x(), a3.y(), a3.z());

  // Similitude: translate a to the origin, rotate the chord onto the x-axis,
  // dilate the chord length to 2, then translate by (-1,0,0). The chord of a
  // refined piece is purely horizontal since the two bump triangles of every
  // replacement cancel in signed area.
  const Eigen::Vector2d chord = b3.head<2>() - a3.head<2>();
  const double clen = chord.norm();
  const double phi = std::atan2(chord.y(), chord.x());
  const double cph = std::cos(-phi), sph = std::sin(-phi);
  Mat R(2, 2);
  R << cph, -sph, sph, cph;
  const Rotation rot{R};
  const double scale = 2.0 / clen;
  const HPoint shift = hpoint(-1.0, 0.0, 0.0);

  HorizontalPolyline out;
  out.v.reserve(per + 1);
  for (long i = first; i <= first + per; ++i) {
    const HPoint y = hpoint(lift.v[i].x(), lift.v[i].y(), lift.v[i].z());
    const HPoint m = mul(shift, dilate(rotate(rot, mul(inverse(a), y)), scale));
    out.v.push_back({m.z(0), m.z(1), m.t});
  }
  return out;
}

AreaBound area_distance_bound(const HorizontalPolyline& gamma) {
  if (gamma.v.size() < 2)
    throw std::invalid_argument("area_distance_bound: need >= 2 vertices");
  const Eigen::Vector3d& s = gamma.v.front();
  const Eigen::Vector3d& e = gamma.v.back();
  double area = 0.0;
  for (size_t i = 0; i + 1 < gamma.v.size(); ++i)
    area += omega2(gamma.v[i].head<2>(), gamma.v[i + 1].head<2>());
  area += omega2(e.head<2>(), s.head<2>()); // closing segment
  AreaBound out;
  out.area = area;
  const HPoint p1 = hpoint(s.x(), s.y(), s.z());
  const HPoint p2 = hpoint(e.x(), e.y(), e.z());
  out.lhs = dist(p1, p2);
  out.rhs = (e.head<2>() - s.head<2>()).norm() + 2.0 * std::sqrt(std::abs(area));
  return out;
}

double planar_length(const HorizontalPolyline& gamma) {
  double len = 0.0;
  for (size_t i = 0; i + 1 < gamma.v.size(); ++i)
    len += (gamma.v[i + 1].head<2>() - gamma.v[i].head<2>()).norm();
  return len;
}

} // namespace hrect

#pragma once

// The iterated-bump horizontal curve in H^1: planar generations with angle
// sequence theta_n = C0/n, horizontal lifts, rescaled pieces, and the
// area-based endpoint distance bound.

#include "hrect/hgroup.hpp"

#include <Eigen/Dense>

#include <array>
#include <vector>

namespace hrect {

struct PlanarPolyline {
  std::vector<Eigen::Vector2d> v;
  bool constant_speed = true;   // all segments share one length
  double segment_length = 0;    // meaningful when constant_speed

  int segments() const { return static_cast<int>(v.size()) - 1; }
};

struct HorizontalPolyline {
  std::vector<Eigen::Vector3d> v; // (x, y, t), consecutive points lift-consistent

  int segments() const { return static_cast<int>(v.size()) - 1; }
};

struct CurveConfig {
  double c0 = 0.2;        // theta_n = c0 / n, c0 in (0, 0.2]
  int max_generation = 8;

  CurveConfig() = default;
  CurveConfig(double c0_, int maxgen) : c0(c0_), max_generation(maxgen) {
    if (!(c0 > 0) || c0 > 0.2)
      throw std::invalid_argument("CurveConfig: need 0 < c0 <= 0.2");
    if (maxgen < 0) throw std::invalid_argument("CurveConfig: max_generation >= 0");
  }

  double theta(int n) const { return c0 / n; }
};

/// Segment length of generation n: l_0 = 2, l_{n+1} = l_n / (4 cos theta_{n+1}).
double segment_length(const CurveConfig& cfg, int n);

/// Generation n of the planar curve: 4^n equal segments from (-1,0) to (1,0).
/// Each parent segment is replaced by four children at angle theta_{n+1},
/// first deviation towards the negative normal of the parent direction.
PlanarPolyline build_planar_generation(const CurveConfig& cfg, int n);

/// Horizontal lift; per segment the height increment is omega(z, z'-z).
HorizontalPolyline lift_horizontal(const PlanarPolyline& pl, const Eigen::Vector3d& start);

/// The five points of Lambda_theta, met by the first refinement of [-1,1].
std::array<Eigen::Vector3d, 5> lambda_theta(double theta);

/// The rescaled piece Gamma_n: extract omega_{n+depth} over
/// [sigma/4^n, (sigma+1)/4^n] and normalize it by the similitude taking the
/// endpoints to (-1,0,0) and (1,0,0).
HorizontalPolyline gamma_piece(const CurveConfig& cfg, int n, long sigma, int depth);

struct AreaBound {
  double lhs = 0;  // d(p1, p2)
  double rhs = 0;  // |pi(p1)-pi(p2)| + 2 sqrt(|A_gamma|)
  double area = 0; // signed shoelace area of the closed projected loop
};

/// Endpoint distance against the projected displacement plus enclosed area.
AreaBound area_distance_bound(const HorizontalPolyline& gamma);

/// Euclidean length of the projection (= Heisenberg length of the lift).
double planar_length(const HorizontalPolyline& gamma);

} // namespace hrect

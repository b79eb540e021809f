#include <doctest.h>

#include "hrect/curve.hpp"
#include "oracles.hpp"

#include <cmath>
#include <unordered_map>

using namespace hrect;

namespace {

double shoelace(const std::vector<Eigen::Vector2d>& loop) {
  double a = 0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % loop.size()];
    a += 0.5 * (p.x() * q.y() - p.y() * q.x());
  }
  return a;
}

} // namespace

TEST_CASE("segment length recurrence and bounds") {
  const CurveConfig cfg(0.2, 12);
  CHECK(segment_length(cfg, 0) == 2.0);
  CHECK(segment_length(cfg, 1) == doctest::Approx(0.5 / std::cos(0.2)).epsilon(1e-15));
  for (int n = 0; n < 12; ++n) {
    const double ln = segment_length(cfg, n), lnext = segment_length(cfg, n + 1);
    CHECK(std::abs(lnext * 4.0 * std::cos(cfg.theta(n + 1)) - ln) <= 1e-12 * ln);
  }
  double prev_total = 0;
  for (int n = 0; n <= 12; ++n) {
    const double ln = segment_length(cfg, n);
    CHECK(ln >= 2.0 * std::pow(4.0, -n));
    CHECK(ln <= std::pow(2.0, 1 - n));
    const double total = std::pow(4.0, n) * ln;
    CHECK(total >= prev_total);
    CHECK(total <= 2.2);
    prev_total = total;
  }
  CHECK_THROWS_AS(segment_length(cfg, 13), std::invalid_argument);
  CHECK_THROWS_AS(CurveConfig(0.25, 4), std::invalid_argument);
}

TEST_CASE("planar generations") {
  const CurveConfig cfg(0.2, 12);
  const PlanarPolyline g0 = build_planar_generation(cfg, 0);
  REQUIRE(g0.v.size() == 2);
  CHECK(g0.v[0] == Eigen::Vector2d(-1, 0));
  CHECK(g0.v[1] == Eigen::Vector2d(1, 0));
  CHECK(g0.segment_length == 2.0);

  for (int n = 1; n <= 6; ++n) {
    const PlanarPolyline g = build_planar_generation(cfg, n);
    REQUIRE(static_cast<long>(g.v.size()) == (1L << (2 * n)) + 1);
    const double ln = segment_length(cfg, n);
    CHECK(g.segment_length == doctest::Approx(ln).epsilon(1e-14));
    for (size_t i = 0; i + 1 < g.v.size(); ++i)
      CHECK((g.v[i + 1] - g.v[i]).norm() == doctest::Approx(ln).epsilon(1e-12));
    // replacement preserves parent endpoints
    const PlanarPolyline par = build_planar_generation(cfg, n - 1);
    for (size_t i = 0; i < par.v.size(); ++i)
      CHECK((g.v[4 * i] - par.v[i]).norm() <= 1e-12);
    // each child segment makes angle theta_n with its parent
    const double th = cfg.theta(n);
    for (size_t i = 0; i + 1 < par.v.size(); ++i) {
      const Eigen::Vector2d u = (par.v[i + 1] - par.v[i]).normalized();
      for (int s = 0; s < 4; ++s) {
        const Eigen::Vector2d cu =
            (g.v[4 * i + s + 1] - g.v[4 * i + s]).normalized();
        CHECK(std::abs(std::atan2(u.x() * cu.y() - u.y() * cu.x(), u.dot(cu))) ==
              doctest::Approx(th).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("horizontal lift") {
  SUBCASE("flat segment lifts flat") {
    PlanarPolyline pl;
    pl.v = {{0, 0}, {1, 0}};
    const HorizontalPolyline g = lift_horizontal(pl, {0, 0, 0});
    CHECK(g.v.back() == Eigen::Vector3d(1, 0, 0));
  }

  SUBCASE("closed unit square gains height 1") {
    PlanarPolyline pl;
    pl.v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    const HorizontalPolyline g = lift_horizontal(pl, {0, 0, 0});
    const double area = shoelace({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(area == 1.0);
    CHECK(g.v.back().z() == doctest::Approx(area).epsilon(1e-14));
  }

  SUBCASE("start must project onto the first vertex") {
    PlanarPolyline pl;
    pl.v = {{0, 0}, {1, 0}};
    CHECK_THROWS_AS(lift_horizontal(pl, {0.5, 0, 0}), std::invalid_argument);
  }

  SUBCASE("horizontality holds segment by segment") {
    const CurveConfig cfg(0.2, 8);
    const PlanarPolyline pl = build_planar_generation(cfg, 5);
    const HorizontalPolyline g = lift_horizontal(pl, {-1, 0, 0});
    for (size_t i = 0; i + 1 < g.v.size(); ++i) {
      const Eigen::Vector2d a = g.v[i].head<2>(), b = g.v[i + 1].head<2>();
      const double want = 0.5 * (a.x() * b.y() - a.y() * b.x());
      CHECK(std::abs((g.v[i + 1].z() - g.v[i].z()) - want) <= 1e-12);
    }
    // Heisenberg length of the lift equals the Euclidean projected length
    double hlen = 0;
    for (size_t i = 0; i + 1 < g.v.size(); ++i)
      hlen += dist(hpoint(g.v[i].x(), g.v[i].y(), g.v[i].z()),
                   hpoint(g.v[i + 1].x(), g.v[i + 1].y(), g.v[i + 1].z()));
    CHECK(hlen == doctest::Approx(planar_length(g)).epsilon(1e-10));
  }
}

TEST_CASE("generation consistency at dyadic parameters") {
  const CurveConfig cfg(0.2, 8);
  const int n = 3, m = 6;
  const HorizontalPolyline gn =
      lift_horizontal(build_planar_generation(cfg, n), {-1, 0, 0});
  const HorizontalPolyline gm =
      lift_horizontal(build_planar_generation(cfg, m), {-1, 0, 0});
  const long step = 1L << (2 * (m - n));
  for (size_t i = 0; i < gn.v.size(); ++i)
    CHECK((gm.v[step * i] - gn.v[i]).norm() <= 1e-10);
}

TEST_CASE("lambda_theta") {
  const double th = 0.11;
  const auto pts = lambda_theta(th);
  const double tn = std::tan(th);
  CHECK(pts[0] == Eigen::Vector3d(-1, 0, 0));
  CHECK((pts[1] - Eigen::Vector3d(-0.5, -tn / 2, tn / 4)).norm() <= 1e-15);
  CHECK((pts[2] - Eigen::Vector3d(0, 0, tn / 4)).norm() <= 1e-15);
  CHECK((pts[3] - Eigen::Vector3d(0.5, tn / 2, tn / 4)).norm() <= 1e-15);
  CHECK(pts[4] == Eigen::Vector3d(1, 0, 0));
  // theta -> 0 degenerates onto the segment
  for (const auto& p : lambda_theta(0.0)) {
    CHECK(p.y() == 0.0);
    CHECK(p.z() == 0.0);
  }
  // the first refinement of [-1,1] passes through Lambda_theta exactly
  const CurveConfig cfg(0.2, 8);
  const HorizontalPolyline g1 =
      lift_horizontal(build_planar_generation(cfg, 1), {-1, 0, 0});
  const auto lam = lambda_theta(cfg.theta(1));
  for (int i = 0; i < 5; ++i) CHECK((g1.v[i] - lam[i]).norm() <= 1e-14);
}

TEST_CASE("gamma_piece") {
  const CurveConfig cfg(0.2, 8);
  Rng rng(17);
  for (int n : {1, 2, 3}) {
    const long pieces = 1L << (2 * n);
    for (int rep = 0; rep < 4; ++rep) {
      const long sigma = static_cast<long>(rng() % pieces);
      const HorizontalPolyline g = gamma_piece(cfg, n, sigma, 2);
      CHECK((g.v.front() - Eigen::Vector3d(-1, 0, 0)).norm() <= 1e-9);
      CHECK((g.v.back() - Eigen::Vector3d(1, 0, 0)).norm() <= 1e-9);
      // passes through all five points of Lambda_{theta_{n+1}}
      const auto lam = lambda_theta(cfg.theta(n + 1));
      const long per = g.segments() / 4;
      for (int i = 0; i < 5; ++i)
        CHECK((g.v[per * i] - lam[i]).norm() <= 1e-9);
    }
  }
  CHECK_THROWS_AS(gamma_piece(cfg, 2, 16, 1), std::invalid_argument);
  CHECK_THROWS_AS(gamma_piece(cfg, 2, -1, 1), std::invalid_argument);
}

TEST_CASE("area distance bound") {
  SUBCASE("straight horizontal segment: equality, zero area") {
    PlanarPolyline pl;
    pl.v = {{0, 0}, {2, 0}};
    const AreaBound ab = area_distance_bound(lift_horizontal(pl, {0, 0, 0}));
    CHECK(ab.area == 0.0);
    CHECK(ab.lhs == doctest::Approx(ab.rhs).epsilon(1e-14));
    CHECK(ab.lhs == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("unit square loop: dist = 2 = bound") {
    PlanarPolyline pl;
    pl.v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    const AreaBound ab = area_distance_bound(lift_horizontal(pl, {0, 0, 0}));
    CHECK(ab.area == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ab.lhs == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ab.rhs == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("fuzz: lhs <= rhs on random horizontal polylines") {
    Rng rng(29);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int s = 0; s < 1000; ++s) {
      PlanarPolyline pl;
      const int m = 2 + static_cast<int>(rng() % 7);
      Eigen::Vector2d pos(g(rng), g(rng));
      pl.v.push_back(pos);
      for (int i = 0; i < m; ++i) {
        pos += 0.5 * Eigen::Vector2d(g(rng), g(rng));
        if ((pos - pl.v.back()).norm() < 1e-9) pos.x() += 0.1;
        pl.v.push_back(pos);
      }
      const AreaBound ab =
          area_distance_bound(lift_horizontal(pl, {pl.v[0].x(), pl.v[0].y(), g(rng)}));
      CHECK(ab.lhs <= ab.rhs + 1e-12);
    }
  }
}

TEST_CASE("injectivity witness at desk scale") {
  // no sampled curve point outside [(sigma-1)/4^n, (sigma+1)/4^n] enters
  // B_Eucl(p, 0.6 l_n) around the net vertex p at parameter sigma/4^n
  const CurveConfig cfg(0.2, 8);
  const int m = 8;
  const PlanarPolyline deep = build_planar_generation(cfg, m);
  const long M = deep.segments();
  for (int n = 1; n <= 8; ++n) {
    const double ln = segment_length(cfg, n);
    const double cell = 0.6 * ln;
    std::unordered_map<long long, std::vector<long>> grid;
    auto key = [&](long long gx, long long gy) { return (gx << 24) ^ (gy & 0xffffff); };
    for (long i = 0; i <= M; ++i) {
      const long long gx = static_cast<long long>(std::floor(deep.v[i].x() / cell));
      const long long gy = static_cast<long long>(std::floor(deep.v[i].y() / cell));
      grid[key(gx, gy)].push_back(i);
    }
    const long pieces = 1L << (2 * n);
    const long per = M / pieces;
    bool witness_ok = true;
    for (long sigma = 0; sigma <= pieces; ++sigma) {
      const Eigen::Vector2d p = deep.v[sigma * per];
      const long long gx = static_cast<long long>(std::floor(p.x() / cell));
      const long long gy = static_cast<long long>(std::floor(p.y() / cell));
      for (long long dx = -1; dx <= 1; ++dx)
        for (long long dy = -1; dy <= 1; ++dy) {
          const auto it = grid.find(key(gx + dx, gy + dy));
          if (it == grid.end()) continue;
          for (long j : it->second) {
            if ((deep.v[j] - p).norm() >= 0.6 * ln) continue;
            if (j < (sigma - 1) * per || j > (sigma + 1) * per) witness_ok = false;
          }
        }
    }
    CHECK(witness_ok);
  }
}

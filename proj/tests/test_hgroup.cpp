#include <doctest.h>

#include "hrect/hgroup.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace hrect;

TEST_CASE("group product, identity, inverse") {
  const HPoint p = hpoint(0.3, -1.2, 0.7);
  const HPoint e = h_identity(1);
  CHECK(dist(mul(e, p), p) == 0.0);
  CHECK(dist(mul(p, e), p) == 0.0);

  // hand evaluation: omega((1,0),(0,1)) = 1/2
  const HPoint r = mul(hpoint(1, 0, 0), hpoint(0, 1, 0));
  CHECK(r.z(0) == doctest::Approx(1.0));
  CHECK(r.z(1) == doctest::Approx(1.0));
  CHECK(r.t == doctest::Approx(0.5));

  const HPoint pi = mul(p, inverse(p));
  CHECK(koranyi_norm(pi) == 0.0);

  CHECK_THROWS_AS(mul(p, HPoint{Vec::Zero(4), 0.0}), std::invalid_argument);
}

TEST_CASE("koranyi norm values") {
  CHECK(koranyi_norm(hpoint(0, 0, 0)) == 0.0);
  CHECK(koranyi_norm(hpoint(0, 0, 1)) == doctest::Approx(2.0).epsilon(1e-14));
  const HPoint p = hpoint(0.3, -0.4, 0.0);
  CHECK(koranyi_norm(p) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("dilation homogeneity") {
  const HPoint p = hpoint(0.1, 0.2, -0.3);
  CHECK(dist(dilate(p, 1.0), p) == 0.0);
  CHECK(koranyi_norm(dilate(hpoint(0, 0, 1), 2.0)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(dilate(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dilate(p, -1.0), std::invalid_argument);

  Rng rng(7);
  for (int s = 0; s < 1000; ++s) {
    const HPoint a = oracle::random_hpoint(1, rng), b = oracle::random_hpoint(1, rng);
    const double r = 0.1 + 3.0 * (s % 17) / 17.0;
    CHECK(dist(dilate(a, r), dilate(b, r)) ==
          doctest::Approx(r * dist(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("rotations are isometries fixing t") {
  Rng rng(11);
  for (int n : {1, 2, 3}) {
    const Rotation R = random_rotation(n, rng);
    for (int s = 0; s < 1000 / n; ++s) {
      const HPoint a = oracle::random_hpoint(n, rng), b = oracle::random_hpoint(n, rng);
      CHECK(dist(rotate(R, a), rotate(R, b)) == doctest::Approx(dist(a, b)).epsilon(1e-10));
      CHECK(rotate(R, a).t == a.t);
    }
  }
  CHECK_THROWS_AS(make_rotation(2.0 * Mat::Identity(2, 2)), std::invalid_argument);
  // orthogonal but omega-reversing (a reflection) is not a rotation
  Mat refl = Mat::Identity(2, 2);
  refl(1, 1) = -1.0;
  CHECK_THROWS_AS(make_rotation(refl), std::invalid_argument);
}

TEST_CASE("group axioms on random triples") {
  Rng rng(3);
  for (int n : {1, 2}) {
    for (int s = 0; s < 10000 / n; ++s) {
      const HPoint a = oracle::random_hpoint(n, rng);
      const HPoint b = oracle::random_hpoint(n, rng);
      const HPoint c = oracle::random_hpoint(n, rng);
      const HPoint l = mul(mul(a, b), c);
      const HPoint r = mul(a, mul(b, c));
      const double scale = 1.0 + koranyi_norm(l);
      CHECK((l.z - r.z).cwiseAbs().maxCoeff() <= 1e-12 * scale);
      CHECK(std::abs(l.t - r.t) <= 1e-12 * scale * scale);
      // left-invariance and metric axioms
      CHECK(dist(mul(c, a), mul(c, b)) == doctest::Approx(dist(a, b)).epsilon(1e-10));
      CHECK(dist(a, b) == doctest::Approx(dist(b, a)).epsilon(1e-14));
      CHECK(dist(a, b) <= dist(a, c) + dist(c, b) + 1e-12);
    }
  }
}

TEST_CASE("projections: coordinate, subgroup, plane, complement") {
  const IsotropicFrame xaxis = frame_h1(0.0);
  const HPoint y = hpoint(3, 4, 5);
  const HPoint py = project_subgroup(xaxis, y);
  CHECK(py.z(0) == doctest::Approx(3.0));
  CHECK(py.z(1) == 0.0);
  CHECK(py.t == 0.0);
  CHECK(project_z(y)(1) == 4.0);
  CHECK(project_t(y) == 5.0);

  Rng rng(5);
  for (int n : {1, 2}) {
    for (int s = 0; s < 200; ++s) {
      const int k = 1 + static_cast<int>(rng() % n);
      const IsotropicFrame f = random_isotropic_frame(n, k, rng);
      const HorizontalPlane V{oracle::random_hpoint(n, rng), f};
      // projection fixes its plane
      Vec par(k);
      std::normal_distribution<double> g(0, 1);
      for (int i = 0; i < k; ++i) par(i) = g(rng);
      const HPoint v = plane_point(V, par);
      // vertical roundoff eps enters the metric as 2 sqrt(eps)
      CHECK(dist(project_plane(V, v), v) <= 1e-7);
      // 1-Lipschitz
      const HPoint a = oracle::random_hpoint(n, rng), b = oracle::random_hpoint(n, rng);
      CHECK(dist(project_plane(V, a), project_plane(V, b)) <= dist(a, b) + 1e-10);
      // P_W formula consistency: group definition vs explicit coordinates
      const HPoint pw = project_complement(f, a);
      const Vec zpar = f.basis * (f.basis.transpose() * a.z);
      const Vec zperp = a.z - zpar;
      CHECK((pw.z - zperp).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(pw.t == doctest::Approx(a.t - symplectic_form(zpar, zperp)).epsilon(1e-12));
      // reconstruction P_V0(p) * ((P_V0(p))^{-1} p) = p exactly
      const HPoint rec = mul(project_subgroup(f, a), pw);
      CHECK((rec.z - a.z).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK(rec.t == doctest::Approx(a.t).epsilon(1e-14));
    }
  }
}

TEST_CASE("frame validation") {
  Mat bad(2, 1);
  bad << 1.0, 1.0; // not unit
  CHECK_THROWS_AS(make_frame(bad), std::invalid_argument);
  Mat pair(4, 2);
  pair << 1, 0, 0, 0, 0, 1, 0, 0; // e1, e3 in R^4: omega(e1, e3) = 1/2
  CHECK_THROWS_AS(make_frame(pair), std::invalid_argument);
  Mat ok(4, 2);
  ok << 1, 0, 0, 1, 0, 0, 0, 0; // e1, e2: isotropic
  CHECK_NOTHROW(make_frame(ok));
}

TEST_CASE("dist_to_plane against the dense-grid oracle") {
  const HorizontalPlane xaxis{h_identity(1), frame_h1(0.0)};

  SUBCASE("hand values") {
    Vec s0(1);
    s0 << 0.7;
    const HPoint on_plane = plane_point(xaxis, s0);
    CHECK(dist_to_plane(on_plane, xaxis) <= 1e-12);
    CHECK(dist_to_plane(hpoint(0, 0, 1), xaxis) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dist_to_plane(hpoint(0, 1, 0), xaxis) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("random instances, k = 1, n <= 2") {
    Rng rng(23);
    for (int s = 0; s < 100; ++s) {
      const int n = 1 + (s % 2);
      const HorizontalPlane V{oracle::random_hpoint(n, rng),
                              random_isotropic_frame(n, 1, rng)};
      const HPoint y = oracle::random_hpoint(n, rng, 1.5);
      const DistToPlaneResult res = dist_to_plane_full(y, V, 1e-12);
      CHECK(res.converged);
      const double ref = oracle::dist_to_line_grid(y, V);
      CHECK(res.value == doctest::Approx(ref).epsilon(1e-6));
      CHECK(res.value <= dist(y, V.base) + 1e-12);
    }
  }

  CHECK_THROWS_AS(dist_to_plane(hpoint(0, 0, 1), xaxis, 0.0), std::invalid_argument);
}

TEST_CASE("plane angle") {
  const HorizontalPlane xaxis{h_identity(1), frame_h1(0.0)};
  CHECK(*plane_angle(xaxis, xaxis) == doctest::Approx(1.0).epsilon(1e-14));

  const double delta = 0.1;
  const HorizontalPlane tilted{h_identity(1), frame_h1(delta)};
  const double a = *plane_angle(xaxis, tilted);
  CHECK(a == doctest::Approx(1.0 / std::cos(delta)).epsilon(1e-12));
  CHECK(a == doctest::Approx(1.0 + delta * delta / 2.0).epsilon(2e-3));

  const HorizontalPlane perp{h_identity(1), frame_h1(M_PI / 2)};
  CHECK_FALSE(plane_angle(xaxis, perp).has_value());
  CHECK_FALSE(angle_within(plane_angle(xaxis, perp), 100.0));

  SUBCASE("symmetry and sampled-sup oracle") {
    Rng rng(31);
    for (int s = 0; s < 50; ++s) {
      const int n = 2;
      const HorizontalPlane V1{oracle::random_hpoint(n, rng),
                               random_isotropic_frame(n, 2, rng)};
      const HorizontalPlane V2{oracle::random_hpoint(n, rng),
                               random_isotropic_frame(n, 2, rng)};
      const auto a12 = plane_angle(V1, V2);
      const auto a21 = plane_angle(V2, V1);
      if (!a12 || !a21) continue;
      CHECK(*a12 == doctest::Approx(*a21).epsilon(1e-9));
      const double sup = oracle::angle_sampled_sup(V1, V2, 4000, rng);
      CHECK(sup <= *a12 * (1 + 1e-9));
      CHECK(sup >= *a12 * 0.8); // the sampled sup approaches 1/sigma_min
    }
  }
}

TEST_CASE("intrinsic Lipschitz constant") {
  const IsotropicFrame xaxis = frame_h1(0.0);

  SUBCASE("graph of phi == 0") {
    std::vector<GraphSample> gs;
    for (int i = 0; i < 8; ++i) {
      const HPoint v = hpoint(-1.0 + i / 3.5, 0, 0);
      gs.push_back(GraphSample{v, v});
    }
    CHECK(intrinsic_lip_constant(gs, xaxis) == 0.0);
  }

  SUBCASE("single pair, constant phi, hand evaluation") {
    const double cc = 0.3, x = 1.0;
    const HPoint v0 = h_identity(1), v1 = hpoint(x, 0, 0);
    const HPoint phi = hpoint(0, cc, 0);
    std::vector<GraphSample> gs{{v0, mul(v0, phi)}, {v1, mul(v1, phi)}};
    // P_W(Phi(v0)^{-1} Phi(v1)) = (0, 0, c x): ratio 2 sqrt(c x) / x
    CHECK(intrinsic_lip_constant(gs, xaxis) ==
          doctest::Approx(2.0 * std::sqrt(cc * x) / x).epsilon(1e-12));
  }

  SUBCASE("measured (1+eta)-Lipschitz maps satisfy the 6 eta^{1/4} bound") {
    Rng rng(41);
    for (int s = 0; s < 25; ++s) {
      double eta = 0;
      const auto gs = oracle::random_graph_map(rng, 1e-4, 1.0, eta);
      CHECK(intrinsic_lip_constant(gs, xaxis) <= 6.0 * std::pow(eta, 0.25));
    }
  }

  SUBCASE("degenerate ratio error") {
    const HPoint v = hpoint(0.5, 0, 0);
    std::vector<GraphSample> gs{{v, mul(v, hpoint(0, 0.1, 0))},
                                {v, mul(v, hpoint(0, 0.2, 0))}};
    CHECK_THROWS_AS(intrinsic_lip_constant(gs, frame_h1(0.0)), std::domain_error);
  }
}

TEST_CASE("ambient group constraint") {
  CHECK_NOTHROW(AmbientGroup(2, 2));
  CHECK_THROWS_AS(AmbientGroup(1, 2), std::invalid_argument);
  CHECK_THROWS_AS(AmbientGroup(0, 0), std::invalid_argument);
}

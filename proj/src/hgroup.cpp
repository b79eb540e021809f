#include "hrect/hgroup.hpp"

#include <cmath>

namespace hrect {

namespace {

constexpr double kStructTol = 1e-10;

void check_isotropy(const Mat& basis) {
  const int k = static_cast<int>(basis.cols());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (std::abs(symplectic_form(basis.col(i), basis.col(j))) > kStructTol)
        throw std::invalid_argument("frame is not isotropic");
    }
  }
}

} // namespace

Rotation make_rotation(Mat A) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0)
    throw std::invalid_argument("rotation matrix must be 2n x 2n");
  const Eigen::Index d = A.rows();
  if ((A.transpose() * A - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > kStructTol)
    throw std::invalid_argument("rotation matrix is not orthogonal");
  // omega(Az, Az') = omega(z, z') on the standard basis.
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const double want =
          symplectic_form(Vec::Unit(d, i), Vec::Unit(d, j));
      const double got = symplectic_form(A.col(i), A.col(j));
      if (std::abs(want - got) > kStructTol)
        throw std::invalid_argument("rotation does not preserve omega");
    }
  }
  return Rotation{std::move(A)};
}

Rotation random_rotation(int n, Rng& rng) {
  // Realify a Haar unitary U on C^n as A = [Re U, -Im U; Im U, Re U].
  using CMat = Eigen::MatrixXcd;
  std::normal_distribution<double> g(0.0, 1.0);
  CMat G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = std::complex<double>(g(rng), g(rng));
  Eigen::HouseholderQR<CMat> qr(G);
  CMat Q = qr.householderQ() * CMat::Identity(n, n);
  CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    std::complex<double> d = R(j, j);
    Q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : 1.0);
  }
  Mat A(2 * n, 2 * n);
  A.topLeftCorner(n, n) = Q.real();
  A.topRightCorner(n, n) = -Q.imag();
  A.bottomLeftCorner(n, n) = Q.imag();
  A.bottomRightCorner(n, n) = Q.real();
  return make_rotation(std::move(A));
}

IsotropicFrame make_frame(Mat basis) {
  if (basis.rows() % 2 != 0 || basis.cols() < 1 || basis.cols() > basis.rows() / 2)
    throw std::invalid_argument("frame must be 2n x k with 1 <= k <= n");
  const Eigen::Index k = basis.cols();
  if ((basis.transpose() * basis - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > kStructTol)
    throw std::invalid_argument("frame is not orthonormal");
  check_isotropy(basis);
  return IsotropicFrame{std::move(basis)};
}

IsotropicFrame frame_h1(double phi) {
  Mat b(2, 1);
  b << std::cos(phi), std::sin(phi);
  return IsotropicFrame{std::move(b)};
}

IsotropicFrame random_isotropic_frame(int n, int k, Rng& rng) {
  // Isotropic orthonormal k-frames in R^{2n} realify Hermitian-orthonormal
  // k-frames in C^n, so draw a complex Gaussian and orthonormalize.
  using CMat = Eigen::MatrixXcd;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    CMat G(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) G(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::HouseholderQR<CMat> qr(G);
    CMat Q = qr.householderQ() * CMat::Identity(n, k);
    Mat b(2 * n, k);
    b.topRows(n) = Q.real();
    b.bottomRows(n) = Q.imag();
    if ((b.transpose() * b - Mat::Identity(k, k)).cwiseAbs().maxCoeff() < kStructTol)
      return IsotropicFrame{std::move(b)};
  }
  throw std::runtime_error("random_isotropic_frame: degenerate draw");
}

IsotropicFrame perturb_frame(const IsotropicFrame& f, double sigma, Rng& rng) {
  using CMat = Eigen::MatrixXcd;
  const int n = f.n(), k = f.k();
  CMat W(n, k);
  W.real() = f.basis.topRows(n);
  W.imag() = f.basis.bottomRows(n);
  std::normal_distribution<double> g(0.0, 1.0);
  CMat G(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) G(i, j) = std::complex<double>(g(rng), g(rng));
  CMat P = W + sigma * G;
  Eigen::HouseholderQR<CMat> qr(P);
  CMat Q = qr.householderQ() * CMat::Identity(n, k);
  Mat b(2 * n, k);
  b.topRows(n) = Q.real();
  b.bottomRows(n) = Q.imag();
  return IsotropicFrame{std::move(b)};
}

HPoint plane_point(const HorizontalPlane& V, const Vec& s) {
  if (s.size() != V.frame.k())
    throw std::invalid_argument("plane_point: parameter size mismatch");
  HPoint q{V.frame.basis * s, 0.0};
  return mul(V.base, q);
}

HPoint project_subgroup(const IsotropicFrame& V0, const HPoint& p) {
  if (V0.basis.rows() != p.z.size())
    throw std::invalid_argument("project_subgroup: dimension mismatch");
  return HPoint{V0.basis * (V0.basis.transpose() * p.z), 0.0};
}

HPoint project_plane(const HorizontalPlane& V, const HPoint& y) {
  const HPoint q = mul(inverse(V.base), y);
  return mul(V.base, project_subgroup(V.frame, q));
}

HPoint project_complement(const IsotropicFrame& V0, const HPoint& p) {
  return mul(inverse(project_subgroup(V0, p)), p);
}

DistToPlaneResult dist_to_plane_full(const HPoint& y, const HorizontalPlane& V,
                                     double tol) {
  if (!(tol > 0)) throw std::invalid_argument("dist_to_plane: tol must be positive");
  if (V.frame.basis.rows() != y.z.size())
    throw std::invalid_argument("dist_to_plane: dimension mismatch");
  const Mat& B = V.frame.basis;
  const HPoint q = mul(inverse(V.base), y); // coordinates relative to base

  // d(y, base*(Bs,0))^4 = |w - Bs|^4 + 16 (tau - c.s)^2 with c_i = omega(b_i, w).
  // Writing s = B^T w + u c_hat splits off the foot-point; in the scalar
  // variable u the derivative is the monotone cubic u^3 + (a + 8c^2)u - 8cb.
  const Vec w = q.z;
  const Vec wpar = B.transpose() * w;
  const double a = w.squaredNorm() - wpar.squaredNorm(); // |w_perp|^2
  Vec c(B.cols());
  for (Eigen::Index i = 0; i < B.cols(); ++i) c(i) = symplectic_form(B.col(i), w);
  const double tau = q.t - c.dot(wpar);
  const double cn = c.norm();

  DistToPlaneResult res;
  double ustar = 0.0;
  int iters = 0;
  if (cn > 0) {
    const double lin = a + 8.0 * cn * cn;
    const double rhs = 8.0 * cn * tau;
    // unique real root of u^3 + lin*u - rhs = 0 (lin >= 0); safeguarded Newton
    double lo = 0.0, hi = 0.0;
    if (rhs >= 0) hi = std::max(1.0, rhs / std::max(lin, 1e-300));
    else lo = std::min(-1.0, rhs / std::max(lin, 1e-300));
    if (rhs >= 0) hi = std::max(hi, std::cbrt(rhs));
    else lo = std::min(lo, std::cbrt(rhs));
    double u = 0.5 * (lo + hi);
    for (; iters < 200; ++iters) {
      const double f = u * u * u + lin * u - rhs;
      if (f > 0) hi = u; else lo = u;
      const double df = 3.0 * u * u + lin;
      double step = df > 0 ? f / df : 0.0;
      double nu = u - step;
      if (!(nu > lo && nu < hi)) nu = 0.5 * (lo + hi);
      if (std::abs(nu - u) <= tol * (1.0 + std::abs(u))) { u = nu; ++iters; break; }
      u = nu;
    }
    ustar = u;
    res.converged = iters < 200;
  }
  res.iterations = iters;
  const double resid2 = a + ustar * ustar;
  const double vert = tau - cn * ustar;
  res.value = std::pow(resid2 * resid2 + 16.0 * vert * vert, 0.25);
  res.s = wpar;
  if (cn > 0) res.s += ustar / cn * c;
  return res;
}

std::optional<double> plane_angle(const HorizontalPlane& V1, const HorizontalPlane& V2) {
  if (V1.frame.k() != V2.frame.k())
    throw std::invalid_argument("plane_angle: planes must have equal dimension");
  const Mat M = V2.frame.basis.transpose() * V1.frame.basis;
  Eigen::JacobiSVD<Mat> svd(M);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-12) return std::nullopt;
  return std::max(1.0, 1.0 / smin);
}

double intrinsic_lip_constant(const std::vector<GraphSample>& samples,
                              const IsotropicFrame& V0) {
  if (samples.size() < 2)
    throw std::invalid_argument("intrinsic_lip_constant: need at least 2 samples");
  double best = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = i + 1; j < samples.size(); ++j) {
      const HPoint diff = mul(inverse(samples[j].phi), samples[i].phi);
      const double pv = koranyi_norm(project_subgroup(V0, diff));
      const double pw = koranyi_norm(project_complement(V0, diff));
      if (pv == 0.0) {
        if (pw == 0.0) continue;
        throw std::domain_error(
            "intrinsic_lip_constant: coincident base points with distinct values");
      }
      best = std::max(best, pw / pv);
    }
  }
  return best;
}

double graph_metric_lip(const std::vector<GraphSample>& samples) {
  double best = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    for (size_t j = i + 1; j < samples.size(); ++j) {
      const double dv = dist(samples[i].v, samples[j].v);
      if (dv == 0.0) continue;
      best = std::max(best, dist(samples[i].phi, samples[j].phi) / dv);
    }
  }
  return best;
}

} // namespace hrect

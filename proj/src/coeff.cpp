#include "hrect/coeff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <thread>

namespace hrect {

const char* family_name(CoeffFamily f) {
  switch (f) {
    case CoeffFamily::BetaHorizontal: return "beta";
    case CoeffFamily::BetaStratified: return "beta_hat";
    case CoeffFamily::BetaProjHorizontal: return "beta_proj_v";
    case CoeffFamily::BetaProjAffine: return "beta_proj_a";
    case CoeffFamily::Iota: return "iota";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Regions.
// ---------------------------------------------------------------------------

namespace {

int snap_to_centroid(const PointCloud& c, const std::vector<int>& idx) {
  Vec zbar = Vec::Zero(c.z.rows());
  double tbar = 0, wsum = 0;
  for (int i : idx) {
    zbar += c.w(i) * c.z.col(i);
    tbar += c.w(i) * c.t(i);
    wsum += c.w(i);
  }
  zbar /= wsum;
  tbar /= wsum;
  const HPoint ctr{zbar, tbar};
  int best = idx.front();
  double bestd = std::numeric_limits<double>::infinity();
  for (int i : idx) {
    const double d = dist(c.point(i), ctr);
    if (d < bestd - 1e-15) { bestd = d; best = i; }
  }
  return best;
}

double region_diam(const PointCloud& c, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  if (m <= 1) return 0.0;
  auto dij = [&](int a, int b) {
    return koranyi_norm_zt(c.z.col(idx[a]) - c.z.col(idx[b]),
                           c.t(idx[a]) - c.t(idx[b]) -
                               symplectic_form(c.z.col(idx[b]), c.z.col(idx[a])));
  };
  if (m <= 4000) {
    double d = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) d = std::max(d, dij(i, j));
    return d;
  }
  int far = 0;
  double best = 0;
  for (int j = 1; j < m; ++j) {
    const double d = dij(0, j);
    if (d > best) { best = d; far = j; }
  }
  double second = 0;
  for (int j = 0; j < m; ++j) second = std::max(second, dij(far, j));
  return std::max(best, second);
}

} // namespace

Region cube_region(const PointCloud& c, const CubeTree& tree, int cube_id,
                   double lambda) {
  Region r;
  r.idx = enlarge(tree, c, cube_id, lambda);
  r.scale = region_diam(c, r.idx);
  r.mass_norm = 0;
  for (int i : r.idx) r.mass_norm += c.w(i);
  r.snap = snap_to_centroid(c, r.idx);
  return r;
}

Region ball_region(const PointCloud& c, int center, double rad) {
  Region r;
  const Vec d = dists_from(c, center);
  for (int i = 0; i < c.size(); ++i)
    if (d(i) <= rad) r.idx.push_back(i);
  r.scale = rad;
  r.mass_norm = std::pow(rad, c.k);
  if (!r.idx.empty()) r.snap = snap_to_centroid(c, r.idx);
  return r;
}

Region whole_cloud_region(const PointCloud& c) {
  Region r;
  r.idx.resize(c.size());
  std::iota(r.idx.begin(), r.idx.end(), 0);
  r.scale = region_diam(c, r.idx);
  r.mass_norm = c.total_mass();
  r.snap = snap_to_centroid(c, r.idx);
  return r;
}

// ---------------------------------------------------------------------------
// Objective evaluation.
// ---------------------------------------------------------------------------

PlaneCandidate candidate_from(const HorizontalPlane& V) {
  return PlaneCandidate{V.base.z, V.base.t, V.frame.basis};
}

HorizontalPlane plane_from(const PlaneCandidate& cand) {
  return HorizontalPlane{HPoint{cand.base_z, cand.base_t}, make_frame(cand.frame)};
}

Vec plane_metric_dists(const PointCloud& c, const std::vector<int>& idx,
                       const PlaneCandidate& cand) {
  const Mat& B = cand.frame;
  const int m = static_cast<int>(idx.size());
  Vec out(m);
  for (int ii = 0; ii < m; ++ii) {
    const int i = idx[ii];
    const Vec w = c.z.col(i) - cand.base_z;
    const double tau0 =
        c.t(i) - cand.base_t - symplectic_form(cand.base_z, c.z.col(i));
    const Vec wpar = B.transpose() * w;
    const double a = std::max(0.0, w.squaredNorm() - wpar.squaredNorm());
    Vec cc(B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j)
      cc(j) = symplectic_form(B.col(j), w);
    const double tau = tau0 - cc.dot(wpar);
    const double cn = cc.norm();
    double u = 0.0;
    if (cn > 0) {
      const double lin = a + 8.0 * cn * cn;
      const double rhs = 8.0 * cn * tau;
      double lo = 0, hi = 0;
      if (rhs >= 0) hi = std::max(std::cbrt(rhs), rhs / std::max(lin, 1e-300));
      else lo = std::min(std::cbrt(rhs), rhs / std::max(lin, 1e-300));
      u = 0.5 * (lo + hi);
      for (int it = 0; it < 80; ++it) {
        const double f = u * u * u + lin * u - rhs;
        if (f > 0) hi = u; else lo = u;
        const double df = 3.0 * u * u + lin;
        double nu = df > 0 ? u - f / df : 0.5 * (lo + hi);
        if (!(nu > lo && nu < hi)) nu = 0.5 * (lo + hi);
        if (std::abs(nu - u) <= 1e-13 * (1.0 + std::abs(u))) { u = nu; break; }
        u = nu;
      }
    }
    const double resid2 = a + u * u;
    const double vert = tau - cn * u;
    out(ii) = std::pow(resid2 * resid2 + 16.0 * vert * vert, 0.25);
  }
  return out;
}

Vec plane_proj_dists(const PointCloud& c, const std::vector<int>& idx,
                     const PlaneCandidate& cand) {
  const Mat& B = cand.frame;
  const int m = static_cast<int>(idx.size());
  Vec out(m);
  for (int ii = 0; ii < m; ++ii) {
    const Vec w = c.z.col(idx[ii]) - cand.base_z;
    const double s2 = std::max(0.0, w.squaredNorm() - (B.transpose() * w).squaredNorm());
    out(ii) = std::sqrt(s2);
  }
  return out;
}

namespace {

double pmean(const PointCloud& c, const Region& r, const Vec& d, double p) {
  if (r.scale <= 0) return 0.0;
  if (p == kPInf) return d.maxCoeff() / r.scale;
  double acc = 0;
  for (int ii = 0; ii < r.size(); ++ii) acc += c.w(r.idx[ii]) * d(ii);
  return acc / (r.mass_norm * r.scale);
}

// pairwise Koranyi distances within the region, cached per region by callers
Mat pair_dists(const PointCloud& c, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  Mat D = Mat::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      const double d = koranyi_norm_zt(
          c.z.col(idx[a]) - c.z.col(idx[b]),
          c.t(idx[a]) - c.t(idx[b]) -
              symplectic_form(c.z.col(idx[b]), c.z.col(idx[a])));
      D(a, b) = D(b, a) = d;
    }
  return D;
}

double eval_iota_cached(const PointCloud& c, const Region& r, double p,
                        const Mat& D, const PlaneCandidate& cand) {
  const int m = r.size();
  if (m <= 1 || r.scale <= 0) return 0.0;
  const Mat& B = cand.frame;
  Mat Y(B.cols(), m);
  for (int a = 0; a < m; ++a) Y.col(a) = B.transpose() * c.z.col(r.idx[a]);
  if (p == kPInf) {
    double worst = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        worst = std::max(worst, std::abs(D(a, b) - (Y.col(a) - Y.col(b)).norm()));
    return worst / r.scale;
  }
  double acc = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (a == b) continue;
      acc += c.w(r.idx[a]) * c.w(r.idx[b]) *
             std::abs(D(a, b) - (Y.col(a) - Y.col(b)).norm());
    }
  return acc / (r.mass_norm * r.mass_norm * r.scale);
}

} // namespace

double eval_coeff(const PointCloud& c, const Region& r, const CoeffKind& kind,
                  const PlaneCandidate& cand) {
  if (r.size() <= 1) return 0.0; // vacuous averages
  switch (kind.family) {
    case CoeffFamily::BetaHorizontal:
      return pmean(c, r, plane_metric_dists(c, r.idx, cand), kind.p);
    case CoeffFamily::BetaStratified: {
      const double mp = pmean(c, r, plane_proj_dists(c, r.idx, cand), kind.p);
      const double mm = pmean(c, r, plane_metric_dists(c, r.idx, cand), kind.p);
      return std::pow(mp * mp + mm * mm * mm * mm, 0.25);
    }
    case CoeffFamily::BetaProjHorizontal:
    case CoeffFamily::BetaProjAffine:
      return pmean(c, r, plane_proj_dists(c, r.idx, cand), kind.p);
    case CoeffFamily::Iota: {
      if (r.size() > 2000)
        throw std::length_error("iota: region exceeds the 2000-point cap");
      const Mat D = pair_dists(c, r.idx);
      return eval_iota_cached(c, r, kind.p, D, cand);
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Optimization.
// ---------------------------------------------------------------------------

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol, double& xbest) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    }
  }
  xbest = f1 <= f2 ? x1 : x2;
  return std::min(f1, f2);
}

// grid + golden polish over a periodic angle objective on [0, period)
double angle_search(const std::function<double(double)>& f, int grid,
                    double period, double& best_phi) {
  std::vector<double> vals(grid);
  for (int g = 0; g < grid; ++g) vals[g] = f(period * g / grid);
  double best = std::numeric_limits<double>::infinity();
  best_phi = 0;
  // polish around every local minimum of the grid, keeping the grid value
  // itself as a candidate (exact minima often sit on grid points)
  for (int g = 0; g < grid; ++g) {
    const double prev = vals[(g + grid - 1) % grid];
    const double next = vals[(g + 1) % grid];
    if (vals[g] <= prev && vals[g] <= next) {
      if (vals[g] < best) { best = vals[g]; best_phi = period * g / grid; }
      const double lo = period * (g - 1) / grid, hi = period * (g + 1) / grid;
      double x;
      const double v = golden_min(f, lo, hi, 1e-11 * period, x);
      if (v < best) { best = v; best_phi = x; }
    }
  }
  return best;
}

struct IotaCache {
  Mat D;
};

// weighted median of values
double weighted_median(std::vector<std::pair<double, double>>& vw) {
  std::sort(vw.begin(), vw.end());
  double total = 0;
  for (auto& p : vw) total += p.second;
  double acc = 0;
  for (auto& p : vw) {
    acc += p.second;
    if (acc >= 0.5 * total) return p.first;
  }
  return vw.back().first;
}

PlaneCandidate base_candidate(const PointCloud& c, const Region& r) {
  PlaneCandidate cand;
  cand.base_z = c.z.col(r.snap);
  cand.base_t = c.t(r.snap);
  cand.frame = Mat::Zero(c.z.rows(), c.k);
  for (int j = 0; j < c.k; ++j) cand.frame(j, j) = 1.0;
  return cand;
}

// isotropic frame nearest-ish to the weighted principal subspace
IsotropicFrame pca_isotropic_seed(const PointCloud& c, const Region& r) {
  const int n = c.n, k = c.k;
  Mat cov = Mat::Zero(2 * n, 2 * n);
  Vec zbar = Vec::Zero(2 * n);
  double wsum = 0;
  for (int i : r.idx) { zbar += c.w(i) * c.z.col(i); wsum += c.w(i); }
  zbar /= wsum;
  for (int i : r.idx) {
    const Vec d = c.z.col(i) - zbar;
    cov += c.w(i) * d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  using CMat = Eigen::MatrixXcd;
  CMat W(n, k);
  for (int j = 0; j < k; ++j) {
    const Vec e = es.eigenvectors().col(2 * n - 1 - j);
    for (int i = 0; i < n; ++i) W(i, j) = std::complex<double>(e(i), e(n + i));
  }
  Eigen::HouseholderQR<CMat> qr(W);
  CMat Q = qr.householderQ() * CMat::Identity(n, k);
  Mat b(2 * n, k);
  b.topRows(n) = Q.real();
  b.bottomRows(n) = Q.imag();
  if (!b.allFinite() || (b.transpose() * b - Mat::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-9) {
    Rng rng(12345);
    return random_isotropic_frame(n, k, rng);
  }
  return IsotropicFrame{std::move(b)};
}

CoeffResult optimize_affine(const PointCloud& c, const Region& r,
                            const CoeffKind& kind, const CoeffOptions& opts) {
  CoeffResult res;
  PlaneCandidate cand = base_candidate(c, r);
  if (c.n == 1) {
    // lines in the plane: per direction the optimal offset is the weighted
    // median (p=1) or midrange (p=inf) of the normal residuals
    auto fit_at = [&](double phi, PlaneCandidate& out) {
      const Eigen::Vector2d u(std::cos(phi), std::sin(phi));
      const Eigen::Vector2d nu(-u.y(), u.x());
      double copt = 0;
      if (kind.p == kPInf) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (int i : r.idx) {
          const double v = nu.dot(c.z.col(i).head<2>());
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        copt = 0.5 * (mn + mx);
      } else {
        std::vector<std::pair<double, double>> vw;
        vw.reserve(r.size());
        for (int i : r.idx)
          vw.push_back({nu.dot(c.z.col(i).head<2>()), c.w(i)});
        copt = weighted_median(vw);
      }
      out.frame = Mat(2, 1);
      out.frame << u.x(), u.y();
      out.base_z = copt * Vec(nu);
      out.base_t = 0;
      return eval_coeff(c, r, kind, out);
    };
    PlaneCandidate tmp = cand;
    double phi_best;
    auto f = [&](double phi) { return fit_at(phi, tmp); };
    res.value = angle_search(f, opts.grid, M_PI, phi_best);
    res.value = fit_at(phi_best, cand);
    // pair lines give the exact L1 optimum for small regions
    if (kind.p == 1.0 && r.size() <= 40) {
      for (int a = 0; a < r.size(); ++a)
        for (int b = a + 1; b < r.size(); ++b) {
          const Eigen::Vector2d pa = c.z.col(r.idx[a]).head<2>();
          const Eigen::Vector2d pb = c.z.col(r.idx[b]).head<2>();
          if ((pb - pa).norm() < 1e-14) continue;
          PlaneCandidate pc2 = cand;
          pc2.frame = Mat(2, 1);
          const Eigen::Vector2d u = (pb - pa).normalized();
          pc2.frame << u.x(), u.y();
          pc2.base_z = Vec(pa);
          pc2.base_t = 0;
          const double v = eval_coeff(c, r, kind, pc2);
          if (v < res.value) { res.value = v; cand = pc2; }
        }
    }
    res.plane = cand;
    return res;
  }

  // general ambient dimension: IRLS for p=1 plus adaptive random descent
  Rng rng(opts.seed);
  const int n2 = 2 * c.n, k = c.k;
  auto orthonormalize = [&](Mat B) {
    Eigen::HouseholderQR<Mat> qr(B);
    return Mat(qr.householderQ() * Mat::Identity(n2, k));
  };
  auto eval_at = [&](const Mat& B, const Vec& base) {
    PlaneCandidate pc2;
    pc2.frame = B;
    pc2.base_z = base;
    pc2.base_t = 0;
    return std::make_pair(eval_coeff(c, r, kind, pc2), pc2);
  };

  res.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.restarts); ++s) {
    Mat B(n2, k);
    std::normal_distribution<double> g(0, 1);
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < k; ++j) B(i, j) = g(rng);
    B = orthonormalize(B);
    Vec base = c.z.col(r.snap);
    if (kind.p == 1.0) {
      double delta = 0.1 * std::max(r.scale, 1e-12);
      for (int it = 0; it < 40; ++it) {
        PlaneCandidate pc2;
        pc2.frame = B;
        pc2.base_z = base;
        const Vec d = plane_proj_dists(c, r.idx, pc2);
        double wsum = 0;
        Vec zb = Vec::Zero(n2);
        for (int ii = 0; ii < r.size(); ++ii) {
          const double om = c.w(r.idx[ii]) / std::max(d(ii), delta);
          zb += om * c.z.col(r.idx[ii]);
          wsum += om;
        }
        zb /= wsum;
        Mat cov = Mat::Zero(n2, n2);
        for (int ii = 0; ii < r.size(); ++ii) {
          const double om = c.w(r.idx[ii]) / std::max(d(ii), delta);
          const Vec dd = c.z.col(r.idx[ii]) - zb;
          cov += om * dd * dd.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(cov);
        for (int j = 0; j < k; ++j) B.col(j) = es.eigenvectors().col(n2 - 1 - j);
        base = zb;
        delta = std::max(delta * 0.5, 1e-9 * std::max(r.scale, 1e-12));
      }
    }
    auto [v, pc2] = eval_at(B, base);
    if (v < res.value) { res.value = v; cand = pc2; }
    // random polish
    double sigma = 0.3;
    int stale = 0;
    Mat Bb = cand.frame;
    Vec bb = cand.base_z;
    while (sigma > 1e-7 && stale < 200) {
      Mat P = Bb;
      std::normal_distribution<double> gg(0, 1);
      for (int i = 0; i < n2; ++i)
        for (int j = 0; j < k; ++j) P(i, j) += sigma * gg(rng);
      P = orthonormalize(P);
      Vec nb = bb;
      for (int i = 0; i < n2; ++i) nb(i) += sigma * r.scale * 0.2 * gg(rng);
      auto [v2, pc3] = eval_at(P, nb);
      if (v2 < res.value) {
        res.value = v2;
        cand = pc3;
        Bb = P;
        bb = nb;
        stale = 0;
      } else if (++stale % 12 == 0) {
        sigma *= 0.6;
      }
    }
  }
  res.plane = cand;
  return res;
}

} // namespace

CoeffResult optimize_coeff(const PointCloud& c, const Region& r,
                           const CoeffKind& kind, const CoeffOptions& opts) {
  CoeffResult res;
  if (r.size() <= 1 || r.scale <= 0) {
    res.plane = r.size() >= 1 ? base_candidate(c, r) : PlaneCandidate{};
    if (r.size() >= 1 && c.n == 1) res.plane.frame = frame_h1(0.0).basis;
    return res;
  }
  if (kind.family == CoeffFamily::BetaProjAffine) return optimize_affine(c, r, kind, opts);

  if (kind.family == CoeffFamily::Iota && r.size() > opts.iota_cap)
    throw std::length_error("iota: region exceeds the point cap");

  PlaneCandidate cand = base_candidate(c, r);
  const bool iota = kind.family == CoeffFamily::Iota;
  IotaCache cache;
  if (iota) cache.D = pair_dists(c, r.idx);

  auto eval_frame = [&](const Mat& B) {
    PlaneCandidate pc2 = cand;
    pc2.frame = B;
    if (iota) return eval_iota_cached(c, r, kind.p, cache.D, pc2);
    return eval_coeff(c, r, kind, pc2);
  };

  if (c.n == 1 && c.k == 1) {
    double phi_best;
    auto f = [&](double phi) {
      Mat B(2, 1);
      B << std::cos(phi), std::sin(phi);
      return eval_frame(B);
    };
    res.value = angle_search(f, opts.grid, M_PI, phi_best);
    Mat B(2, 1);
    B << std::cos(phi_best), std::sin(phi_best);
    cand.frame = B;
    res.value = eval_frame(B);
    res.plane = cand;
    return res;
  }

  // general case: PCA seed plus random restarts with adaptive descent
  Rng rng(opts.seed);
  double best = std::numeric_limits<double>::infinity();
  Mat bestB;
  std::vector<IsotropicFrame> seeds;
  seeds.push_back(pca_isotropic_seed(c, r));
  for (int s = 1; s < std::max(1, opts.restarts); ++s)
    seeds.push_back(random_isotropic_frame(c.n, c.k, rng));
  for (const auto& seed : seeds) {
    Mat B = seed.basis;
    double v = eval_frame(B);
    double sigma = 0.4;
    int stale = 0;
    while (sigma > 1e-7 && stale < 240) {
      IsotropicFrame pf = perturb_frame(IsotropicFrame{B}, sigma, rng);
      const double v2 = eval_frame(pf.basis);
      if (v2 < v) {
        v = v2;
        B = pf.basis;
        stale = 0;
      } else if (++stale % 12 == 0) {
        sigma *= 0.6;
      }
    }
    if (v < best) { best = v; bestB = B; }
  }
  cand.frame = bestB;
  res.value = best;
  res.plane = cand;
  return res;
}

// ---------------------------------------------------------------------------
// Fields.
// ---------------------------------------------------------------------------

CoeffField evaluate_field(const PointCloud& c, const CubeTree& tree,
                          const CoeffKind& kind, double lambda,
                          const CoeffOptions& opts, int threads) {
  CoeffField field;
  field.kind = kind;
  field.lambda = lambda;
  const int m = static_cast<int>(tree.cubes.size());
  std::vector<double> vals(m);
  std::vector<PlaneCandidate> planes(m);

  auto work = [&](int lo, int hi) {
    for (int id = lo; id < hi; ++id) {
      const Region r = cube_region(c, tree, id, lambda);
      CoeffOptions o = opts;
      o.seed = opts.seed ^ (0x9e3779b97f4a7c15ULL * (id + 1));
      const CoeffResult res = optimize_coeff(c, r, kind, o);
      vals[id] = res.value;
      planes[id] = res.plane;
    }
  };
  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || m < 8) {
    work(0, m);
  } else {
    std::vector<std::future<void>> fs;
    const int chunk = (m + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int lo = t * chunk, hi = std::min(m, lo + chunk);
      if (lo < hi) fs.push_back(std::async(std::launch::async, work, lo, hi));
    }
    for (auto& f : fs) f.get();
  }
  for (int id = 0; id < m; ++id) {
    field.value[id] = vals[id];
    field.plane[id] = planes[id];
  }
  return field;
}

// ---------------------------------------------------------------------------
// Shared-candidate chain.
// ---------------------------------------------------------------------------

ChainValues evaluate_chain(const PointCloud& c, const Region& r,
                           const CoeffOptions& opts) {
  ChainValues out;
  if (r.size() <= 1) return out;

  std::vector<PlaneCandidate> pool; // isotropic, through region points
  auto add = [&](const CoeffResult& res) { pool.push_back(res.plane); };
  add(optimize_coeff(c, r, {CoeffFamily::BetaHorizontal, 1.0}, opts));
  add(optimize_coeff(c, r, {CoeffFamily::BetaHorizontal, kPInf}, opts));
  add(optimize_coeff(c, r, {CoeffFamily::BetaStratified, 1.0}, opts));
  add(optimize_coeff(c, r, {CoeffFamily::BetaProjHorizontal, 1.0}, opts));
  const CoeffResult ri1 = optimize_coeff(c, r, {CoeffFamily::Iota, 1.0}, opts);
  const CoeffResult riI = optimize_coeff(c, r, {CoeffFamily::Iota, kPInf}, opts);
  {
    // the iota frames based at the snapped sample join the shared pool
    PlaneCandidate pc = pool.front();
    pc.frame = ri1.plane.frame;
    pool.push_back(pc);
    pc.frame = riI.plane.frame;
    pool.push_back(pc);
  }

  auto minval = [&](CoeffFamily fam, double p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cand : pool)
      best = std::min(best, eval_coeff(c, r, {fam, p}, cand));
    return best;
  };
  out.beta1 = minval(CoeffFamily::BetaHorizontal, 1.0);
  out.beta_inf = minval(CoeffFamily::BetaHorizontal, kPInf);
  out.bhat1 = minval(CoeffFamily::BetaStratified, 1.0);
  out.bhat_inf = minval(CoeffFamily::BetaStratified, kPInf);
  out.bprojv1 = minval(CoeffFamily::BetaProjHorizontal, 1.0);
  out.bprojv_inf = minval(CoeffFamily::BetaProjHorizontal, kPInf);

  // affine pool: the isotropic candidates plus the dedicated affine fits
  std::vector<PlaneCandidate> apool = pool;
  apool.push_back(optimize_coeff(c, r, {CoeffFamily::BetaProjAffine, 1.0}, opts).plane);
  apool.push_back(optimize_coeff(c, r, {CoeffFamily::BetaProjAffine, kPInf}, opts).plane);
  auto minval_a = [&](double p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cand : apool)
      best = std::min(best, eval_coeff(c, r, {CoeffFamily::BetaProjAffine, p}, cand));
    return best;
  };
  out.bproja1 = minval_a(1.0);
  out.bproja_inf = minval_a(kPInf);

  // iota over the shared frames
  const Mat D = pair_dists(c, r.idx);
  auto minval_i = [&](double p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cand : pool)
      best = std::min(best, eval_iota_cached(c, r, p, D, cand));
    return best;
  };
  out.iota1 = minval_i(1.0);
  out.iota_inf = minval_i(kPInf);
  return out;
}

// ---------------------------------------------------------------------------
// Oracle.
// ---------------------------------------------------------------------------

OracleLine oracle_fit(const std::vector<Eigen::Vector2d>& pts,
                      const std::vector<double>& w) {
  if (pts.size() > 12) throw std::invalid_argument("oracle_fit: at most 12 points");
  if (pts.empty() || pts.size() != w.size())
    throw std::invalid_argument("oracle_fit: bad input");
  auto value_of = [&](const Eigen::Vector2d& p0, const Eigen::Vector2d& dir) {
    const Eigen::Vector2d nu(-dir.y(), dir.x());
    double acc = 0;
    for (size_t i = 0; i < pts.size(); ++i) acc += w[i] * std::abs(nu.dot(pts[i] - p0));
    return acc;
  };
  OracleLine best;
  best.point = pts.front();
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::Vector2d& p0, const Eigen::Vector2d& dir) {
    const double v = value_of(p0, dir);
    if (v < best.value) best = OracleLine{p0, dir, v};
  };
  for (size_t i = 0; i < pts.size(); ++i) {
    consider(pts[i], {1.0, 0.0});
    consider(pts[i], {0.0, 1.0});
    for (size_t j = i + 1; j < pts.size(); ++j) {
      const Eigen::Vector2d d = pts[j] - pts[i];
      if (d.norm() < 1e-14) continue;
      consider(pts[i], d.normalized());
    }
  }
  return best;
}

} // namespace hrect

#include "netlift/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace netlift {

BetaResult beta_urban(double eps, double a) {
  if (!(eps > 0.0)) throw invalid_parameter("beta_urban: eps must be > 0");
  if (!(a > 1.0)) throw invalid_parameter("beta_urban: a must be > 1");
  const double excess = 0.25 * std::pow(1.5, 2.0 / 3.0) * std::pow(eps, 2.0 / 3.0);
  if (excess >= a - 1.0) return {a, a - 1.0, true};
  return {1.0 + excess, excess, false};
}

double beta_branched(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameter("beta_branched: eps must be in (0,1)");
  return 1.0 + eps * std::abs(std::log(eps)) / 2.0;
}

CertificateParams make_certificate(ModelKind model, double eps, double a, double ell) {
  if (!(ell > 0.0)) throw invalid_parameter("make_certificate: ell must be > 0");
  CertificateParams cp;
  cp.model = model;
  cp.eps = eps;
  cp.a = a;
  cp.ell = ell;
  if (model == ModelKind::Urban) {
    BetaResult b = beta_urban(eps, a);
    cp.beta = b.beta;
    cp.excess = b.excess;
    cp.clamped = b.clamped;
  } else {
    if (!(eps > 0.0 && eps < 1.0))
      throw invalid_parameter("make_certificate: branched eps must be in (0,1)");
    cp.excess = eps * std::abs(std::log(eps)) / 2.0;
    cp.beta = 1.0 + cp.excess;
    cp.clamped = false;
  }
  cp.stretch = 2.0 * cp.beta;
  cp.sbar_coeff = 4.0 * cp.beta * std::sqrt(std::max(cp.beta * cp.beta - 1.0, 0.0) / 3.0);
  return cp;
}

Vec2 circular_flow(Vec2 x) {
  const double r = std::sqrt(x.x * x.x + x.y * x.y);
  if (r > 0.5 || r == 0.0) return {0.0, 0.0};
  return {x.y / r, -x.x / r};
}

namespace {

// (1/2) B theta(B^{-1} z) with B = diag(stretch, 1)
Vec2 stretched_flow(const CertificateParams& cp, Vec2 z) {
  const Vec2 t = circular_flow({z.x / cp.stretch, z.y});
  return {0.5 * cp.stretch * t.x, 0.5 * t.y};
}

}  // namespace

Vec2 phi_field(const CertificateParams& cp, Vec2 x, double s) {
  if (s < 0.0 || s > cp.ell) return {0.0, 0.0};
  if (x.y <= 0.5) return stretched_flow(cp, {x.x - s, x.y});
  // upper half: point reflection of the lower flow about (s, 1), so the
  // x1-component stays +beta across the whole segment x1 = s
  const Vec2 f = stretched_flow(cp, {x.x - s, x.y - 1.0});
  return {-f.x, -f.y};
}

AdmissibilityReport verify_admissibility(const CertificateParams& cp, int density) {
  if (density < 50) throw invalid_parameter("verify_admissibility: density must be >= 50");

  const double bound_scale = cp.model == ModelKind::Urban ? cp.a : 1.0;
  (void)bound_scale;
  auto rhs = [&](double ds) {
    return cp.model == ModelKind::Urban ? std::min(ds + cp.eps, cp.a * ds)
                                        : std::pow(ds, 1.0 - cp.eps);
  };

  // lattice in s covering the support and the truncation edges
  const double s_lo = -0.25, s_hi = cp.ell + 0.25;
  const int ns = density;
  std::vector<double> s_nodes(ns + 1);
  for (int i = 0; i <= ns; ++i) s_nodes[i] = s_lo + (s_hi - s_lo) * i / ns;

  std::vector<double> x1_list = {0.0, 0.25 * cp.ell, 0.5 * cp.ell, 0.75 * cp.ell, cp.ell};
  AdmissibilityReport rep;

  std::vector<Vec2> cum(ns + 1);
  for (double x1 : x1_list) {
    for (int jy = 0; jy <= density; ++jy) {
      const double x2 = -0.55 + (1.55 - (-0.55)) * jy / density;
      // cumulative integral of phi_x along s at the lattice nodes
      cum[0] = {0.0, 0.0};
      for (int i = 0; i < ns; ++i) {
        const double a = s_nodes[i], b = s_nodes[i + 1];
        int m = static_cast<int>(std::ceil(200.0 * (b - a)));
        m = std::max(4, m + (m % 2));  // even subinterval count
        const double h = (b - a) / m;
        Vec2 acc = phi_field(cp, {x1, x2}, a) + phi_field(cp, {x1, x2}, b);
        for (int q = 1; q < m; ++q) {
          const double w = (q % 2 == 1) ? 4.0 : 2.0;
          acc += w * phi_field(cp, {x1, x2}, a + q * h);
        }
        cum[i + 1] = cum[i] + (h / 3.0) * acc;
      }
      for (int i = 0; i <= ns; ++i) {
        for (int j = i + 1; j <= ns; ++j) {
          const double ds = s_nodes[j] - s_nodes[i];
          const double lhs = norm(cum[j] - cum[i]);
          const double c = rhs(ds);
          const double excess = lhs - c;
          if (excess > rep.max_violation) {
            rep.max_violation = excess;
            rep.worst_x = {x1, x2};
            rep.worst_s1 = s_nodes[i];
            rep.worst_s2 = s_nodes[j];
          }
          if (c > 0.0) rep.max_rel_violation = std::max(rep.max_rel_violation, excess / c);
        }
      }
    }
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  rep.max_rel_violation = std::max(rep.max_rel_violation, 0.0);
  return rep;
}

CertificateBound certificate_bound(const CertificateParams& cp) {
  return {cp.beta * cp.ell, cp.ell * cp.excess};
}

double measure_branched_eps0(int density, double audit_tol, double beta_excess_scale) {
  auto admissible = [&](double eps) {
    CertificateParams cp = make_certificate(ModelKind::Branched, eps, 0.0, 3.0);
    cp.beta = 1.0 + beta_excess_scale * (cp.beta - 1.0);
    cp.stretch = 2.0 * cp.beta;
    return verify_admissibility(cp, density).max_rel_violation <= audit_tol;
  };
  double lo = 0.01, hi = 0.99;
  if (!admissible(lo)) return 0.0;
  if (admissible(hi)) return hi;
  for (int it = 0; it < 20; ++it) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace netlift

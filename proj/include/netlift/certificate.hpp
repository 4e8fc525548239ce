#pragma once

#include "netlift/model.hpp"

namespace netlift {

// Analytic dual test field for the line-to-line geometry on [0,ell] x [0,1]:
// a horizontally stretched circular flow translated along s, paired with the
// boundary data to certify a lower energy bound of beta*ell.
struct CertificateParams {
  ModelKind model = ModelKind::Urban;
  double eps = 0.0;
  double a = 0.0;  // urban only
  double ell = 0.0;
  double beta = 1.0;
  double excess = 0.0;      // beta - 1, kept separately for exact reporting
  bool clamped = false;     // urban: the min picked `a`
  double stretch = 2.0;     // matrix diag(2*beta, 1)
  double sbar_coeff = 0.0;  // |phi| exceeds 1 only for |s - x1| <= sbar_coeff * x2
};

struct BetaResult {
  double beta = 0.0;
  double excess = 0.0;  // beta - 1 without the 1 + x roundtrip
  bool clamped = false;
};

// beta = min(1 + (1/4)(3/2)^(2/3) eps^(2/3), a)
BetaResult beta_urban(double eps, double a);
// beta = 1 + eps*|log eps|/2
double beta_branched(double eps);

CertificateParams make_certificate(ModelKind model, double eps, double a, double ell);

// Unit clockwise circular flow supported on the half-disk radius 1/2.
Vec2 circular_flow(Vec2 x);

// The spatial dual component at ((x1,x2), s); the s-component is zero.
Vec2 phi_field(const CertificateParams& cp, Vec2 x, double s);

struct AdmissibilityReport {
  double max_violation = 0.0;      // absolute constraint excess
  double max_rel_violation = 0.0;  // excess / bound
  Vec2 worst_x;
  double worst_s1 = 0.0, worst_s2 = 0.0;
};

// Audits |int_{s1}^{s2} phi_x ds| against the interval bound over a lattice of
// (x, s1, s2) triples; composite Simpson with >= 200 subintervals per unit.
AdmissibilityReport verify_admissibility(const CertificateParams& cp, int density);

struct CertificateBound {
  double total = 0.0;   // beta * ell
  double excess = 0.0;  // ell * (beta - 1)
};

CertificateBound certificate_bound(const CertificateParams& cp);

// Largest branched eps whose field still passes the audit (bisection).
// beta_excess_scale scales beta - 1: the nominal stretched flow overshoots
// its interval bound by a margin proportional to eps, so the nominal scale
// admits nothing and the measurement is mainly of interest for reduced
// stretches.
double measure_branched_eps0(int density, double audit_tol = 1e-6,
                             double beta_excess_scale = 1.0);

}  // namespace netlift

#include <algorithm>
#include <cmath>

#include "netlift/errors.hpp"
#include "netlift/kernels.hpp"

namespace netlift::kern {

void PairScheme::build(int p_, double hs_, bool dyadic, bool urban, double eps, double a) {
  p = p_;
  hs = hs_;
  bound.assign(static_cast<std::size_t>(p) + 2, 0.0);
  active.assign(static_cast<std::size_t>(p) + 2, 0);
  for (int k = 1; k <= p + 1; ++k) {
    const double L = k * hs;
    bound[k] = urban ? std::min(L + eps, a * L) : std::pow(L, 1.0 - eps);
    active[k] = dyadic ? static_cast<std::uint8_t>((k & (k - 1)) == 0) : 1;
  }
  offset.assign(static_cast<std::size_t>(p) + 2, 0);
  int running = 0;
  for (int l1 = 0; l1 <= p; ++l1) {
    offset[l1] = running;
    for (int k = 1; k <= p + 1 - l1; ++k)
      if (active[k]) ++running;
  }
  offset[p + 1] = running;
  total_pairs = running;
}

namespace {

double primal_step_scalar(double* v, const double* adj, const double* frozen,
                          const std::uint8_t* fixed, double tau, std::size_t n) {
  double max_change = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    double nv;
    if (fixed[q]) {
      nv = frozen[q];
    } else {
      nv = v[q] - tau * adj[q];
      nv = std::min(std::max(nv, 0.0), 1.0);
    }
    max_change = std::max(max_change, std::abs(nv - v[q]));
    v[q] = nv;
  }
  return max_change;
}

void extrapolate_scalar(double* vbar, const double* v, const double* v_prev,
                        double theta, std::size_t n) {
  for (std::size_t q = 0; q < n; ++q) vbar[q] = v[q] + theta * (v[q] - v_prev[q]);
}

void ascent_strided_scalar(double* phi, const double* v, double c, std::ptrdiff_t stride,
                           std::size_t begin, std::size_t end) {
  for (std::size_t q = begin; q < end; ++q) phi[q] += c * (v[q + stride] - v[q]);
}

void ascent_rows_scalar(double* phi, const double* v, double c, int rowlen,
                        std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::size_t base = r * rowlen;
    for (int i = 0; i + 1 < rowlen; ++i) phi[base + i] += c * (v[base + i + 1] - v[base + i]);
  }
}

void adj_gather_scalar(double* out, const double* phi, double c, std::ptrdiff_t stride,
                       std::size_t begin, std::size_t end) {
  for (std::size_t q = begin; q < end; ++q) out[q] += c * (phi[q - stride] - phi[q]);
}

void adj_head_scalar(double* out, const double* phi, double c, std::size_t begin,
                     std::size_t end) {
  for (std::size_t q = begin; q < end; ++q) out[q] -= c * phi[q];
}

void adj_tail_scalar(double* out, const double* phi, double c, std::ptrdiff_t stride,
                     std::size_t begin, std::size_t end) {
  for (std::size_t q = begin; q < end; ++q) out[q] += c * phi[q - stride];
}

void adj_rows_scalar(double* out, const double* phi, double c, int rowlen,
                     std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::size_t base = r * rowlen;
    out[base] -= c * phi[base];
    for (int i = 1; i + 1 < rowlen; ++i)
      out[base + i] += c * (phi[base + i - 1] - phi[base + i]);
    if (rowlen > 1) out[base + rowlen - 1] += c * phi[base + rowlen - 2];
  }
}

double nonneg_dykstra_scalar(double* phi, double* corr, std::size_t n) {
  double moved = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const double y = phi[q] + corr[q];
    const double x = std::max(y, 0.0);
    corr[q] = y - x;
    moved = std::max(moved, std::abs(x - phi[q]));
    phi[q] = x;
  }
  return moved;
}

double ball_dykstra_scalar(double* x1, double* x2, double* c1, double* c2, double radius,
                           std::size_t n) {
  double moved = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    const double y1 = x1[q] + c1[q];
    const double y2 = x2[q] + c2[q];
    const double nrm = std::sqrt(y1 * y1 + y2 * y2);
    double n1, n2;
    if (nrm > radius) {
      const double r = radius / nrm;
      n1 = r * y1;
      n2 = r * y2;
    } else {
      n1 = y1;
      n2 = y2;
    }
    c1[q] = y1 - n1;
    c2[q] = y2 - n2;
    moved = std::max({moved, std::abs(n1 - x1[q]), std::abs(n2 - x2[q])});
    x1[q] = n1;
    x2[q] = n2;
  }
  return moved;
}

double max_neg_scalar(const double* a, std::size_t n) {
  double v = 0.0;
  for (std::size_t q = 0; q < n; ++q) v = std::max(v, -a[q]);
  return std::max(v, 0.0);
}

double max_ball_excess_scalar(const double* x1, const double* x2, double radius,
                              std::size_t n) {
  double v = 0.0;
  for (std::size_t q = 0; q < n; ++q)
    v = std::max(v, std::sqrt(x1[q] * x1[q] + x2[q] * x2[q]) - radius);
  return std::max(v, 0.0);
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
  double v = 0.0;
  for (std::size_t q = 0; q < n; ++q) v = std::max(v, std::abs(a[q] - b[q]));
  return v;
}

// Reference sweep: per pair, materialize the Dykstra "add back correction,
// project, store new correction" directly on the field entries.
double pair_sweep_ref(double* x1, double* x2, double* corr, const PairScheme& tab, int C,
                      double* /*scratch_d*/, double* /*scratch_s*/) {
  const int p = tab.p;
  const double hs = tab.hs;
  double moved = 0.0;
  for (int l1 = 0; l1 <= p; ++l1) {
    int slot = tab.offset[l1];
    for (int l2 = l1; l2 <= p; ++l2) {
      const int k = l2 - l1 + 1;
      if (!tab.active[k]) continue;
      const double c = tab.bound[k];
      double* q1 = corr + (static_cast<std::size_t>(slot) * 2) * C;
      double* q2 = corr + (static_cast<std::size_t>(slot) * 2 + 1) * C;
      for (int col = 0; col < C; ++col) {
        const double qo1 = q1[col], qo2 = q2[col];
        double s1 = 0.0, s2 = 0.0;
        for (int l = l1; l <= l2; ++l) {
          const std::size_t idx = static_cast<std::size_t>(l) * C + col;
          x1[idx] += qo1;
          x2[idx] += qo2;
          s1 += hs * x1[idx];
          s2 += hs * x2[idx];
        }
        const double nrm = std::sqrt(s1 * s1 + s2 * s2);
        double qn1 = 0.0, qn2 = 0.0;
        if (nrm > c) {
          const double r = c / nrm;
          qn1 = (s1 - r * s1) / (hs * k);
          qn2 = (s2 - r * s2) / (hs * k);
          for (int l = l1; l <= l2; ++l) {
            const std::size_t idx = static_cast<std::size_t>(l) * C + col;
            x1[idx] -= qn1;
            x2[idx] -= qn2;
          }
        }
        moved = std::max({moved, std::abs(qo1 - qn1), std::abs(qo2 - qn2)});
        q1[col] = qn1;
        q2[col] = qn2;
      }
      ++slot;
    }
  }
  return moved;
}

double pair_violation_ref(const double* x1, const double* x2, const PairScheme& tab, int C,
                          double* /*scratch*/, double bail_above) {
  const int p = tab.p;
  const double hs = tab.hs;
  double viol = 0.0;
  for (int col = 0; col < C; ++col) {
    for (int l1 = 0; l1 <= p; ++l1) {
      double s1 = 0.0, s2 = 0.0;
      for (int l2 = l1; l2 <= p; ++l2) {
        const std::size_t idx = static_cast<std::size_t>(l2) * C + col;
        s1 += hs * x1[idx];
        s2 += hs * x2[idx];
        const int k = l2 - l1 + 1;
        if (!tab.active[k]) continue;
        viol = std::max(viol, std::sqrt(s1 * s1 + s2 * s2) - tab.bound[k]);
      }
      if (viol > bail_above) return viol;
    }
  }
  return std::max(viol, 0.0);
}

// Optimized sweep: same pass, but block sums are carried incrementally and
// entry updates are deferred to one suffix-sum application per l1 row.
double pair_sweep_lazy(double* x1, double* x2, double* corr, const PairScheme& tab, int C,
                       double* scratch_d, double* scratch_s) {
  const int p = tab.p;
  const double hs = tab.hs;
  double moved = 0.0;
  double* S1 = scratch_s;
  double* S2 = scratch_s + C;
  double* A1 = scratch_s + 2 * C;
  double* A2 = scratch_s + 3 * C;
  for (int l1 = 0; l1 <= p; ++l1) {
    std::fill(S1, S1 + C, 0.0);
    std::fill(S2, S2 + C, 0.0);
    int slot = tab.offset[l1];
    for (int l2 = l1; l2 <= p; ++l2) {
      const int k = l2 - l1 + 1;
      const double* row1 = x1 + static_cast<std::size_t>(l2) * C;
      const double* row2 = x2 + static_cast<std::size_t>(l2) * C;
      double* d1 = scratch_d + (static_cast<std::size_t>(l2) * 2) * C;
      double* d2 = scratch_d + (static_cast<std::size_t>(l2) * 2 + 1) * C;
      if (tab.active[k]) {
        const double c = tab.bound[k];
        const double hsk = hs * k;
        const double inv = 1.0 / hsk;
        double* q1 = corr + (static_cast<std::size_t>(slot) * 2) * C;
        double* q2 = corr + (static_cast<std::size_t>(slot) * 2 + 1) * C;
        for (int col = 0; col < C; ++col) {
          double s1 = S1[col] + hs * row1[col];
          double s2 = S2[col] + hs * row2[col];
          const double qo1 = q1[col], qo2 = q2[col];
          const double y1 = s1 + hsk * qo1;
          const double y2 = s2 + hsk * qo2;
          const double nrm = std::sqrt(y1 * y1 + y2 * y2);
          double qn1, qn2;
          if (nrm > c) {
            const double r = c / nrm;
            qn1 = (y1 - r * y1) * inv;
            qn2 = (y2 - r * y2) * inv;
            s1 = r * y1;
            s2 = r * y2;
          } else {
            qn1 = 0.0;
            qn2 = 0.0;
            s1 = y1;
            s2 = y2;
          }
          q1[col] = qn1;
          q2[col] = qn2;
          d1[col] = qo1 - qn1;
          d2[col] = qo2 - qn2;
          moved = std::max({moved, std::abs(d1[col]), std::abs(d2[col])});
          S1[col] = s1;
          S2[col] = s2;
        }
        ++slot;
      } else {
        for (int col = 0; col < C; ++col) {
          S1[col] += hs * row1[col];
          S2[col] += hs * row2[col];
          d1[col] = 0.0;
          d2[col] = 0.0;
        }
      }
    }
    std::fill(A1, A1 + C, 0.0);
    std::fill(A2, A2 + C, 0.0);
    for (int l = p; l >= l1; --l) {
      double* row1 = x1 + static_cast<std::size_t>(l) * C;
      double* row2 = x2 + static_cast<std::size_t>(l) * C;
      const double* d1 = scratch_d + (static_cast<std::size_t>(l) * 2) * C;
      const double* d2 = scratch_d + (static_cast<std::size_t>(l) * 2 + 1) * C;
      for (int col = 0; col < C; ++col) {
        A1[col] += d1[col];
        A2[col] += d2[col];
        row1[col] += A1[col];
        row2[col] += A2[col];
      }
    }
  }
  return moved;
}

// Violation scan off per-column prefix sums: block sum [l1,l2] is
// P[l2+1] - P[l1].
double pair_violation_lazy(const double* x1, const double* x2, const PairScheme& tab, int C,
                           double* scratch_prefix, double bail_above) {
  const int p = tab.p;
  const double hs = tab.hs;
  double* P1 = scratch_prefix;                                       // (p+2)*C
  double* P2 = scratch_prefix + static_cast<std::size_t>(p + 2) * C; // (p+2)*C
  std::fill(P1, P1 + C, 0.0);
  std::fill(P2, P2 + C, 0.0);
  for (int l = 0; l <= p; ++l) {
    const double* row1 = x1 + static_cast<std::size_t>(l) * C;
    const double* row2 = x2 + static_cast<std::size_t>(l) * C;
    const double* prev1 = P1 + static_cast<std::size_t>(l) * C;
    const double* prev2 = P2 + static_cast<std::size_t>(l) * C;
    double* next1 = P1 + static_cast<std::size_t>(l + 1) * C;
    double* next2 = P2 + static_cast<std::size_t>(l + 1) * C;
    for (int col = 0; col < C; ++col) {
      next1[col] = prev1[col] + hs * row1[col];
      next2[col] = prev2[col] + hs * row2[col];
    }
  }
  double viol = 0.0;
  for (int l1 = 0; l1 <= p; ++l1) {
    const double* base1 = P1 + static_cast<std::size_t>(l1) * C;
    const double* base2 = P2 + static_cast<std::size_t>(l1) * C;
    for (int l2 = l1; l2 <= p; ++l2) {
      const int k = l2 - l1 + 1;
      if (!tab.active[k]) continue;
      const double c = tab.bound[k];
      const double* top1 = P1 + static_cast<std::size_t>(l2 + 1) * C;
      const double* top2 = P2 + static_cast<std::size_t>(l2 + 1) * C;
      for (int col = 0; col < C; ++col) {
        const double s1 = top1[col] - base1[col];
        const double s2 = top2[col] - base2[col];
        viol = std::max(viol, std::sqrt(s1 * s1 + s2 * s2) - c);
      }
      if (viol > bail_above) return viol;
    }
  }
  return std::max(viol, 0.0);
}

}  // namespace

const KernelOps kScalarRef = {
    "scalar",
    primal_step_scalar,
    extrapolate_scalar,
    ascent_strided_scalar,
    ascent_rows_scalar,
    adj_gather_scalar,
    adj_head_scalar,
    adj_tail_scalar,
    adj_rows_scalar,
    nonneg_dykstra_scalar,
    ball_dykstra_scalar,
    max_neg_scalar,
    max_ball_excess_scalar,
    max_abs_diff_scalar,
    pair_sweep_ref,
    pair_violation_ref,
};

const KernelOps kScalarOpt = {
    "opt",
    primal_step_scalar,
    extrapolate_scalar,
    ascent_strided_scalar,
    ascent_rows_scalar,
    adj_gather_scalar,
    adj_head_scalar,
    adj_tail_scalar,
    adj_rows_scalar,
    nonneg_dykstra_scalar,
    ball_dykstra_scalar,
    max_neg_scalar,
    max_ball_excess_scalar,
    max_abs_diff_scalar,
    pair_sweep_lazy,
    pair_violation_lazy,
};

}  // namespace netlift::kern

// AVX2 variants. Lanes map to independent grid columns (or flat node runs),
// so every lane performs the same operation sequence as the optimized scalar
// kernels and the results are bit-identical to them.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "netlift/kernels.hpp"

namespace netlift::kern {

extern const KernelOps kAvx2;  // external linkage for the dispatch table

namespace {

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline __m256d abs_pd(__m256d v) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return _mm256_and_pd(v, mask);
}

double primal_step_avx2(double* v, const double* adj, const double* frozen,
                        const std::uint8_t* fixed, double tau, std::size_t n) {
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d vmax = zero;
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    __m256d vv = _mm256_loadu_pd(v + q);
    __m256d va = _mm256_loadu_pd(adj + q);
    __m256d nv = _mm256_sub_pd(vv, _mm256_mul_pd(vtau, va));
    nv = _mm256_min_pd(_mm256_max_pd(nv, zero), one);
    // fixed nodes take the frozen value instead
    __m128i f8 = _mm_cvtsi32_si128(*reinterpret_cast<const int*>(fixed + q));
    __m256i f64 = _mm256_cvtepu8_epi64(f8);
    __m256d mask = _mm256_castsi256_pd(_mm256_cmpeq_epi64(f64, _mm256_setzero_si256()));
    __m256d vf = _mm256_loadu_pd(frozen + q);
    nv = _mm256_blendv_pd(vf, nv, mask);
    vmax = _mm256_max_pd(vmax, abs_pd(_mm256_sub_pd(nv, vv)));
    _mm256_storeu_pd(v + q, nv);
  }
  double max_change = hmax(vmax);
  for (; q < n; ++q) {
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

void extrapolate_avx2(double* vbar, const double* v, const double* v_prev, double theta,
                      std::size_t n) {
  const __m256d vt = _mm256_set1_pd(theta);
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    __m256d a = _mm256_loadu_pd(v + q);
    __m256d b = _mm256_loadu_pd(v_prev + q);
    _mm256_storeu_pd(vbar + q, _mm256_add_pd(a, _mm256_mul_pd(vt, _mm256_sub_pd(a, b))));
  }
  for (; q < n; ++q) vbar[q] = v[q] + theta * (v[q] - v_prev[q]);
}

void ascent_strided_avx2(double* phi, const double* v, double c, std::ptrdiff_t stride,
                         std::size_t begin, std::size_t end) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t q = begin;
  for (; q + 4 <= end; q += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + q + stride), _mm256_loadu_pd(v + q));
    _mm256_storeu_pd(phi + q, _mm256_add_pd(_mm256_loadu_pd(phi + q), _mm256_mul_pd(vc, d)));
  }
  for (; q < end; ++q) phi[q] += c * (v[q + stride] - v[q]);
}

void ascent_rows_avx2(double* phi, const double* v, double c, int rowlen, std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::size_t base = r * rowlen;
    ascent_strided_avx2(phi, v, c, 1, base, base + rowlen - 1);
  }
}

void adj_gather_avx2(double* out, const double* phi, double c, std::ptrdiff_t stride,
                     std::size_t begin, std::size_t end) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t q = begin;
  for (; q + 4 <= end; q += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(phi + q - stride), _mm256_loadu_pd(phi + q));
    _mm256_storeu_pd(out + q, _mm256_add_pd(_mm256_loadu_pd(out + q), _mm256_mul_pd(vc, d)));
  }
  for (; q < end; ++q) out[q] += c * (phi[q - stride] - phi[q]);
}

void adj_head_avx2(double* out, const double* phi, double c, std::size_t begin,
                   std::size_t end) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t q = begin;
  for (; q + 4 <= end; q += 4) {
    __m256d t = _mm256_mul_pd(vc, _mm256_loadu_pd(phi + q));
    _mm256_storeu_pd(out + q, _mm256_sub_pd(_mm256_loadu_pd(out + q), t));
  }
  for (; q < end; ++q) out[q] -= c * phi[q];
}

void adj_tail_avx2(double* out, const double* phi, double c, std::ptrdiff_t stride,
                   std::size_t begin, std::size_t end) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t q = begin;
  for (; q + 4 <= end; q += 4) {
    __m256d t = _mm256_mul_pd(vc, _mm256_loadu_pd(phi + q - stride));
    _mm256_storeu_pd(out + q, _mm256_add_pd(_mm256_loadu_pd(out + q), t));
  }
  for (; q < end; ++q) out[q] += c * phi[q - stride];
}

void adj_rows_avx2(double* out, const double* phi, double c, int rowlen, std::size_t nrows) {
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::size_t base = r * rowlen;
    out[base] -= c * phi[base];
    adj_gather_avx2(out, phi, c, 1, base + 1, base + rowlen - 1);
    if (rowlen > 1) out[base + rowlen - 1] += c * phi[base + rowlen - 2];
  }
}

double nonneg_dykstra_avx2(double* phi, double* corr, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d vmax = zero;
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    __m256d old = _mm256_loadu_pd(phi + q);
    __m256d y = _mm256_add_pd(old, _mm256_loadu_pd(corr + q));
    __m256d x = _mm256_max_pd(y, zero);
    _mm256_storeu_pd(corr + q, _mm256_sub_pd(y, x));
    vmax = _mm256_max_pd(vmax, abs_pd(_mm256_sub_pd(x, old)));
    _mm256_storeu_pd(phi + q, x);
  }
  double moved = hmax(vmax);
  for (; q < n; ++q) {
    const double y = phi[q] + corr[q];
    const double x = std::max(y, 0.0);
    corr[q] = y - x;
    moved = std::max(moved, std::abs(x - phi[q]));
    phi[q] = x;
  }
  return moved;
}

double ball_dykstra_avx2(double* x1, double* x2, double* c1, double* c2, double radius,
                         std::size_t n) {
  const __m256d vr = _mm256_set1_pd(radius);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    __m256d o1 = _mm256_loadu_pd(x1 + q);
    __m256d o2 = _mm256_loadu_pd(x2 + q);
    __m256d y1 = _mm256_add_pd(o1, _mm256_loadu_pd(c1 + q));
    __m256d y2 = _mm256_add_pd(o2, _mm256_loadu_pd(c2 + q));
    __m256d nrm = _mm256_sqrt_pd(
        _mm256_add_pd(_mm256_mul_pd(y1, y1), _mm256_mul_pd(y2, y2)));
    __m256d over = _mm256_cmp_pd(nrm, vr, _CMP_GT_OQ);
    __m256d r = _mm256_div_pd(vr, nrm);
    __m256d n1 = _mm256_blendv_pd(y1, _mm256_mul_pd(r, y1), over);
    __m256d n2 = _mm256_blendv_pd(y2, _mm256_mul_pd(r, y2), over);
    _mm256_storeu_pd(c1 + q, _mm256_sub_pd(y1, n1));
    _mm256_storeu_pd(c2 + q, _mm256_sub_pd(y2, n2));
    vmax = _mm256_max_pd(vmax, abs_pd(_mm256_sub_pd(n1, o1)));
    vmax = _mm256_max_pd(vmax, abs_pd(_mm256_sub_pd(n2, o2)));
    _mm256_storeu_pd(x1 + q, n1);
    _mm256_storeu_pd(x2 + q, n2);
  }
  double moved = hmax(vmax);
  for (; q < n; ++q) {
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

double max_neg_avx2(const double* a, std::size_t n) {
  __m256d vmax = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4)
    vmax = _mm256_max_pd(vmax, _mm256_sub_pd(_mm256_setzero_pd(), _mm256_loadu_pd(a + q)));
  double v = hmax(vmax);
  for (; q < n; ++q) v = std::max(v, -a[q]);
  return std::max(v, 0.0);
}

double max_ball_excess_avx2(const double* x1, const double* x2, double radius,
                            std::size_t n) {
  const __m256d vr = _mm256_set1_pd(radius);
  __m256d vmax = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    __m256d a = _mm256_loadu_pd(x1 + q);
    __m256d b = _mm256_loadu_pd(x2 + q);
    __m256d nrm = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
    vmax = _mm256_max_pd(vmax, _mm256_sub_pd(nrm, vr));
  }
  double v = hmax(vmax);
  for (; q < n; ++q) v = std::max(v, std::sqrt(x1[q] * x1[q] + x2[q] * x2[q]) - radius);
  return std::max(v, 0.0);
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vmax = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4)
    vmax = _mm256_max_pd(vmax, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + q),
                                                    _mm256_loadu_pd(b + q))));
  double v = hmax(vmax);
  for (; q < n; ++q) v = std::max(v, std::abs(a[q] - b[q]));
  return v;
}

// Same lazy sweep as the optimized scalar kernel, 4 columns per lane group.
double pair_sweep_avx2(double* x1, double* x2, double* corr, const PairScheme& tab, int C,
                       double* scratch_d, double* scratch_s) {
  const int p = tab.p;
  const double hs = tab.hs;
  const __m256d vhs = _mm256_set1_pd(hs);
  __m256d vmoved = _mm256_setzero_pd();
  double moved_tail = 0.0;
  double* S1 = scratch_s;
  double* S2 = scratch_s + C;
  double* A1 = scratch_s + 2 * C;
  double* A2 = scratch_s + 3 * C;
  const int C4 = C - (C % 4);
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
        const __m256d vc = _mm256_set1_pd(c);
        const __m256d vhsk = _mm256_set1_pd(hsk);
        const __m256d vinv = _mm256_set1_pd(inv);
        double* q1 = corr + (static_cast<std::size_t>(slot) * 2) * C;
        double* q2 = corr + (static_cast<std::size_t>(slot) * 2 + 1) * C;
        int col = 0;
        for (; col < C4; col += 4) {
          __m256d s1 = _mm256_add_pd(_mm256_loadu_pd(S1 + col),
                                     _mm256_mul_pd(vhs, _mm256_loadu_pd(row1 + col)));
          __m256d s2 = _mm256_add_pd(_mm256_loadu_pd(S2 + col),
                                     _mm256_mul_pd(vhs, _mm256_loadu_pd(row2 + col)));
          __m256d qo1 = _mm256_loadu_pd(q1 + col);
          __m256d qo2 = _mm256_loadu_pd(q2 + col);
          __m256d y1 = _mm256_add_pd(s1, _mm256_mul_pd(vhsk, qo1));
          __m256d y2 = _mm256_add_pd(s2, _mm256_mul_pd(vhsk, qo2));
          __m256d nrm = _mm256_sqrt_pd(
              _mm256_add_pd(_mm256_mul_pd(y1, y1), _mm256_mul_pd(y2, y2)));
          __m256d over = _mm256_cmp_pd(nrm, vc, _CMP_GT_OQ);
          __m256d r = _mm256_div_pd(vc, nrm);
          __m256d qn1 = _mm256_mul_pd(_mm256_sub_pd(y1, _mm256_mul_pd(r, y1)), vinv);
          __m256d qn2 = _mm256_mul_pd(_mm256_sub_pd(y2, _mm256_mul_pd(r, y2)), vinv);
          qn1 = _mm256_blendv_pd(_mm256_setzero_pd(), qn1, over);
          qn2 = _mm256_blendv_pd(_mm256_setzero_pd(), qn2, over);
          __m256d ns1 = _mm256_blendv_pd(y1, _mm256_mul_pd(r, y1), over);
          __m256d ns2 = _mm256_blendv_pd(y2, _mm256_mul_pd(r, y2), over);
          _mm256_storeu_pd(q1 + col, qn1);
          _mm256_storeu_pd(q2 + col, qn2);
          __m256d dd1 = _mm256_sub_pd(qo1, qn1);
          __m256d dd2 = _mm256_sub_pd(qo2, qn2);
          _mm256_storeu_pd(d1 + col, dd1);
          _mm256_storeu_pd(d2 + col, dd2);
          vmoved = _mm256_max_pd(vmoved, _mm256_max_pd(abs_pd(dd1), abs_pd(dd2)));
          _mm256_storeu_pd(S1 + col, ns1);
          _mm256_storeu_pd(S2 + col, ns2);
        }
        for (; col < C; ++col) {
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
          moved_tail = std::max({moved_tail, std::abs(d1[col]), std::abs(d2[col])});
          S1[col] = s1;
          S2[col] = s2;
        }
        ++slot;
      } else {
        int col = 0;
        for (; col < C4; col += 4) {
          _mm256_storeu_pd(S1 + col,
                           _mm256_add_pd(_mm256_loadu_pd(S1 + col),
                                         _mm256_mul_pd(vhs, _mm256_loadu_pd(row1 + col))));
          _mm256_storeu_pd(S2 + col,
                           _mm256_add_pd(_mm256_loadu_pd(S2 + col),
                                         _mm256_mul_pd(vhs, _mm256_loadu_pd(row2 + col))));
          _mm256_storeu_pd(d1 + col, _mm256_setzero_pd());
          _mm256_storeu_pd(d2 + col, _mm256_setzero_pd());
        }
        for (; col < C; ++col) {
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
      int col = 0;
      for (; col < C4; col += 4) {
        __m256d a1 = _mm256_add_pd(_mm256_loadu_pd(A1 + col), _mm256_loadu_pd(d1 + col));
        __m256d a2 = _mm256_add_pd(_mm256_loadu_pd(A2 + col), _mm256_loadu_pd(d2 + col));
        _mm256_storeu_pd(A1 + col, a1);
        _mm256_storeu_pd(A2 + col, a2);
        _mm256_storeu_pd(row1 + col, _mm256_add_pd(_mm256_loadu_pd(row1 + col), a1));
        _mm256_storeu_pd(row2 + col, _mm256_add_pd(_mm256_loadu_pd(row2 + col), a2));
      }
      for (; col < C; ++col) {
        A1[col] += d1[col];
        A2[col] += d2[col];
        row1[col] += A1[col];
        row2[col] += A2[col];
      }
    }
  }
  return std::max(hmax(vmoved), moved_tail);
}

double pair_violation_avx2(const double* x1, const double* x2, const PairScheme& tab, int C,
                           double* scratch_prefix, double bail_above) {
  const int p = tab.p;
  const double hs = tab.hs;
  const __m256d vhs = _mm256_set1_pd(hs);
  double* P1 = scratch_prefix;
  double* P2 = scratch_prefix + static_cast<std::size_t>(p + 2) * C;
  const int C4 = C - (C % 4);
  std::fill(P1, P1 + C, 0.0);
  std::fill(P2, P2 + C, 0.0);
  for (int l = 0; l <= p; ++l) {
    const double* row1 = x1 + static_cast<std::size_t>(l) * C;
    const double* row2 = x2 + static_cast<std::size_t>(l) * C;
    const double* prev1 = P1 + static_cast<std::size_t>(l) * C;
    const double* prev2 = P2 + static_cast<std::size_t>(l) * C;
    double* next1 = P1 + static_cast<std::size_t>(l + 1) * C;
    double* next2 = P2 + static_cast<std::size_t>(l + 1) * C;
    int col = 0;
    for (; col < C4; col += 4) {
      _mm256_storeu_pd(next1 + col,
                       _mm256_add_pd(_mm256_loadu_pd(prev1 + col),
                                     _mm256_mul_pd(vhs, _mm256_loadu_pd(row1 + col))));
      _mm256_storeu_pd(next2 + col,
                       _mm256_add_pd(_mm256_loadu_pd(prev2 + col),
                                     _mm256_mul_pd(vhs, _mm256_loadu_pd(row2 + col))));
    }
    for (; col < C; ++col) {
      next1[col] = prev1[col] + hs * row1[col];
      next2[col] = prev2[col] + hs * row2[col];
    }
  }
  __m256d vmax = _mm256_setzero_pd();
  double tailmax = 0.0;
  for (int l1 = 0; l1 <= p; ++l1) {
    const double* base1 = P1 + static_cast<std::size_t>(l1) * C;
    const double* base2 = P2 + static_cast<std::size_t>(l1) * C;
    for (int l2 = l1; l2 <= p; ++l2) {
      const int k = l2 - l1 + 1;
      if (!tab.active[k]) continue;
      const double c = tab.bound[k];
      const __m256d vc = _mm256_set1_pd(c);
      const double* top1 = P1 + static_cast<std::size_t>(l2 + 1) * C;
      const double* top2 = P2 + static_cast<std::size_t>(l2 + 1) * C;
      int col = 0;
      for (; col < C4; col += 4) {
        __m256d s1 = _mm256_sub_pd(_mm256_loadu_pd(top1 + col), _mm256_loadu_pd(base1 + col));
        __m256d s2 = _mm256_sub_pd(_mm256_loadu_pd(top2 + col), _mm256_loadu_pd(base2 + col));
        __m256d nrm = _mm256_sqrt_pd(
            _mm256_add_pd(_mm256_mul_pd(s1, s1), _mm256_mul_pd(s2, s2)));
        vmax = _mm256_max_pd(vmax, _mm256_sub_pd(nrm, vc));
      }
      for (; col < C; ++col) {
        const double s1 = top1[col] - base1[col];
        const double s2 = top2[col] - base2[col];
        tailmax = std::max(tailmax, std::sqrt(s1 * s1 + s2 * s2) - c);
      }
      const double running = std::max(hmax(vmax), tailmax);
      if (running > bail_above) return running;
    }
  }
  return std::max({hmax(vmax), tailmax, 0.0});
}

}  // namespace

const KernelOps kAvx2 = {
    "avx2",
    primal_step_avx2,
    extrapolate_avx2,
    ascent_strided_avx2,
    ascent_rows_avx2,
    adj_gather_avx2,
    adj_head_avx2,
    adj_tail_avx2,
    adj_rows_avx2,
    nonneg_dykstra_avx2,
    ball_dykstra_avx2,
    max_neg_avx2,
    max_ball_excess_avx2,
    max_abs_diff_avx2,
    pair_sweep_avx2,
    pair_violation_avx2,
};

}  // namespace netlift::kern

#endif  // x86_64

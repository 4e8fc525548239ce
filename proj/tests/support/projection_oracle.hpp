#pragma once

#include <cmath>
#include <vector>

#include "netlift/constraints.hpp"

namespace netlift::testutil {

// Single pair-constraint projection with the KKT multiplier located by
// bisection: psi_l = phi_l - lambda*hs*u, u the unit direction of the
// constrained sum. Independent of the closed-form shift used in production.
inline std::vector<Vec2> project_pair_bisection(std::vector<Vec2> column,
                                                const PairConstraint& pc, double hs) {
  const int k = pc.l2 - pc.l1 + 1;
  Vec2 S{0, 0};
  for (int l = pc.l1; l <= pc.l2; ++l) S += hs * column[l];
  const double nrm = norm(S);
  if (nrm <= pc.bound) return column;
  const Vec2 u = (1.0 / nrm) * S;
  // residual norm after shifting by lambda along u is nrm - k*hs*hs*lambda
  double lo = 0.0, hi = 1.0;
  auto residual = [&](double lam) { return nrm - k * hs * hs * lam - pc.bound; };
  while (residual(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  const double lam = 0.5 * (lo + hi);
  for (int l = pc.l1; l <= pc.l2; ++l) column[l] -= (lam * hs) * u;
  return column;
}

// Projection onto the whole dual constraint set by consensus ADMM: one copy
// per constraint set, per-set exact projections, averaged global update.
// A different splitting scheme than Dykstra, used as the dense oracle.
struct DenseProjectionOracle {
  const Grid3& g;
  const TransportModel& model;
  double rho = 1.0;
  double relax = 1.7;
  int max_iters = 60000;
  double change_tol = 1e-12;

  DualField project(const DualField& z) const {
    struct Set {
      int kind;  // 0 nonneg (node), 1 ball (node), 2 pair (col, l1, l2)
      std::size_t node = 0;
      int col = 0, l1 = 0, l2 = 0;
      double bound = 0.0;
    };
    std::vector<Set> sets;
    const int C = g.ncols();
    for (std::size_t q = 0; q < g.nnodes(); ++q) sets.push_back({0, q, 0, 0, 0, 0.0});
    if (model.kind == ModelKind::Urban)
      for (std::size_t q = 0; q < g.nnodes(); ++q) sets.push_back({1, q, 0, 0, 0, model.a});
    for (int col = 0; col < C; ++col)
      for (int l1 = 0; l1 <= g.p; ++l1)
        for (int l2 = l1; l2 <= g.p; ++l2) {
          PairConstraint pc = make_pair_constraint(l1, l2, g.hs, model);
          sets.push_back({2, 0, col, l1, l2, pc.bound});
        }
    const std::size_t M = sets.size();

    // local copies and scaled duals, stored compactly per set
    auto set_dim = [&](const Set& s) -> int {
      if (s.kind == 0) return 1;
      if (s.kind == 1) return 2;
      return 2 * (s.l2 - s.l1 + 1);
    };
    std::vector<std::vector<double>> zi(M), ui(M);
    for (std::size_t i = 0; i < M; ++i) {
      zi[i].assign(set_dim(sets[i]), 0.0);
      ui[i].assign(set_dim(sets[i]), 0.0);
    }

    DualField x = z;
    auto gather = [&](const Set& s, const DualField& f, std::vector<double>& out) {
      if (s.kind == 0) {
        out[0] = f.s[s.node];
      } else if (s.kind == 1) {
        out[0] = f.x1[s.node];
        out[1] = f.x2[s.node];
      } else {
        int at = 0;
        for (int l = s.l1; l <= s.l2; ++l) {
          const std::size_t q = static_cast<std::size_t>(l) * C + s.col;
          out[at++] = f.x1[q];
          out[at++] = f.x2[q];
        }
      }
    };
    auto project_set = [&](const Set& s, std::vector<double>& v) {
      if (s.kind == 0) {
        v[0] = std::max(v[0], 0.0);
      } else if (s.kind == 1) {
        const double nrm = std::sqrt(v[0] * v[0] + v[1] * v[1]);
        if (nrm > s.bound) {
          const double r = s.bound / nrm;
          v[0] *= r;
          v[1] *= r;
        }
      } else {
        const int k = s.l2 - s.l1 + 1;
        Vec2 S{0, 0};
        for (int l = 0; l < k; ++l) S += g.hs * Vec2{v[2 * l], v[2 * l + 1]};
        const double nrm = norm(S);
        if (nrm > s.bound) {
          const Vec2 shift = (1.0 / (g.hs * k)) * (S - (s.bound / nrm) * S);
          for (int l = 0; l < k; ++l) {
            v[2 * l] -= shift.x;
            v[2 * l + 1] -= shift.y;
          }
        }
      }
    };

    // membership counts for the averaged x-update
    std::vector<double> mult_s(g.nnodes(), 0.0), mult_x(g.nnodes(), 0.0);
    for (const auto& s : sets) {
      if (s.kind == 0) mult_s[s.node] += 1.0;
      if (s.kind == 1) mult_x[s.node] += 1.0;
      if (s.kind == 2)
        for (int l = s.l1; l <= s.l2; ++l)
          mult_x[static_cast<std::size_t>(l) * C + s.col] += 1.0;
    }

    std::vector<double> buf;
    for (int it = 0; it < max_iters; ++it) {
      // x-update: (z + rho * sum_i (z_i - u_i)) / (1 + rho * count)
      DualField acc = DualField::zeros(g);
      for (std::size_t i = 0; i < M; ++i) {
        const Set& s = sets[i];
        if (s.kind == 0) {
          acc.s[s.node] += zi[i][0] - ui[i][0];
        } else if (s.kind == 1) {
          acc.x1[s.node] += zi[i][0] - ui[i][0];
          acc.x2[s.node] += zi[i][1] - ui[i][1];
        } else {
          int at = 0;
          for (int l = s.l1; l <= s.l2; ++l) {
            const std::size_t q = static_cast<std::size_t>(l) * C + s.col;
            acc.x1[q] += zi[i][at] - ui[i][at];
            ++at;
            acc.x2[q] += zi[i][at] - ui[i][at];
            ++at;
          }
        }
      }
      double change = 0.0;
      for (std::size_t q = 0; q < g.nnodes(); ++q) {
        const double ns = (z.s[q] + rho * acc.s[q]) / (1.0 + rho * mult_s[q]);
        const double n1 = (z.x1[q] + rho * acc.x1[q]) / (1.0 + rho * mult_x[q]);
        const double n2 = (z.x2[q] + rho * acc.x2[q]) / (1.0 + rho * mult_x[q]);
        change = std::max({change, std::abs(ns - x.s[q]), std::abs(n1 - x.x1[q]),
                           std::abs(n2 - x.x2[q])});
        x.s[q] = ns;
        x.x1[q] = n1;
        x.x2[q] = n2;
      }
      for (std::size_t i = 0; i < M; ++i) {
        const Set& s = sets[i];
        buf.assign(zi[i].size(), 0.0);
        gather(s, x, buf);
        for (std::size_t d = 0; d < buf.size(); ++d) {
          const double over = relax * buf[d] + (1.0 - relax) * zi[i][d];
          buf[d] = over + ui[i][d];
        }
        std::vector<double> proj = buf;
        project_set(s, proj);
        for (std::size_t d = 0; d < buf.size(); ++d) {
          ui[i][d] = buf[d] - proj[d];
          zi[i][d] = proj[d];
        }
      }
      if (change < change_tol && it > 50) break;
    }
    return x;
  }
};

inline double field_distance(const DualField& a, const DualField& b) {
  double acc = 0.0;
  for (std::size_t q = 0; q < a.s.size(); ++q) {
    acc += (a.s[q] - b.s[q]) * (a.s[q] - b.s[q]);
    acc += (a.x1[q] - b.x1[q]) * (a.x1[q] - b.x1[q]);
    acc += (a.x2[q] - b.x2[q]) * (a.x2[q] - b.x2[q]);
  }
  return std::sqrt(acc);
}

}  // namespace netlift::testutil

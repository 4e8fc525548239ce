#include "netlift/extract.hpp"

#include <algorithm>
#include <cmath>

namespace netlift {

namespace {

GridImage image_shell(const Grid3& g) {
  GridImage u;
  u.nx = g.nx();
  u.ny = g.ny();
  u.h1 = g.h1;
  u.h2 = g.h2;
  u.origin = g.origin;
  u.band = g.band;
  u.u.assign(static_cast<std::size_t>(u.nx) * u.ny, 0.0);
  return u;
}

double face_cost(double jump, const TransportModel& model) {
  const double d = std::abs(jump);
  if (model.kind == ModelKind::Urban) return std::min(model.a * d, d + model.eps);
  return d > 0.0 ? std::pow(d, 1.0 - model.eps) : 0.0;
}

}  // namespace

CollapseResult collapse(const LiftedField& f, const Grid3& g) {
  CollapseResult out;
  out.u = image_shell(g);
  const int C = g.ncols();
  std::size_t free_nodes = 0, fractional = 0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.col(i, j);
      int count = 0;
      for (int l = 0; l <= g.p; ++l) {
        const std::size_t q = static_cast<std::size_t>(l) * C + c;
        if (f.v[q] > 0.5) ++count;
        if (!f.state[q]) {
          ++free_nodes;
          if (f.v[q] >= 0.05 && f.v[q] <= 0.95) ++fractional;
        }
      }
      out.u.at(i, j) = g.s0 + g.hs * count;
    }
  }
  out.binarity_score =
      free_nodes > 0 ? static_cast<double>(fractional) / static_cast<double>(free_nodes) : 0.0;
  return out;
}

GridImage collapse_soft(const LiftedField& f, const Grid3& g) {
  GridImage u = image_shell(g);
  const int C = g.ncols();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.col(i, j);
      double acc = 0.0;
      for (int l = 0; l <= g.p; ++l) acc += f.v[static_cast<std::size_t>(l) * C + c];
      u.at(i, j) = g.s0 + g.hs * acc;
    }
  }
  return u;
}

FluxField flux(const GridImage& u) {
  FluxField f;
  f.nx = u.nx;
  f.ny = u.ny;
  f.h1 = u.h1;
  f.h2 = u.h2;
  f.origin = u.origin;
  f.fx.assign(static_cast<std::size_t>(u.nx) * (u.ny - 1), 0.0);
  f.fy.assign(static_cast<std::size_t>(u.nx - 1) * u.ny, 0.0);
  for (int j = 0; j + 1 < u.ny; ++j)
    for (int i = 0; i < u.nx; ++i)
      f.fx[static_cast<std::size_t>(j) * u.nx + i] = -(u.at(i, j + 1) - u.at(i, j)) / u.h2;
  for (int j = 0; j < u.ny; ++j)
    for (int i = 0; i + 1 < u.nx; ++i)
      f.fy[static_cast<std::size_t>(j) * (u.nx - 1) + i] = (u.at(i + 1, j) - u.at(i, j)) / u.h1;
  return f;
}

double flux_divergence(const FluxField& f) {
  // net outflow of the cell with corners (i,j)..(i+1,j+1)
  double worst = 0.0;
  for (int j = 0; j + 1 < f.ny; ++j) {
    for (int i = 0; i + 1 < f.nx; ++i) {
      const double left = f.fx[static_cast<std::size_t>(j) * f.nx + i];
      const double right = f.fx[static_cast<std::size_t>(j) * f.nx + i + 1];
      const double bottom = f.fy[static_cast<std::size_t>(j) * (f.nx - 1) + i];
      const double top = f.fy[static_cast<std::size_t>(j + 1) * (f.nx - 1) + i];
      const double net = (right - left) * f.h2 + (top - bottom) * f.h1;
      worst = std::max(worst, std::abs(net));
    }
  }
  return worst;
}

double grid_energy(const GridImage& u, const TransportModel& model) {
  // transverse boundary weights mirror the saddle-value quadrature: faces on
  // the domain edge lines represent half a cell of jump length
  const int ilo = u.band, ihi = u.nx - 1 - u.band;
  const int jlo = u.band, jhi = u.ny - 1 - u.band;
  auto wx = [&](int i) { return (i == ilo || i == ihi) ? 0.5 : 1.0; };
  auto wy = [&](int j) { return (j == jlo || j == jhi) ? 0.5 : 1.0; };
  double total = 0.0;
  // vertical faces between horizontally adjacent cells, length h2
  for (int j = 0; j < u.ny; ++j) {
    for (int i = 0; i + 1 < u.nx; ++i) {
      if (!(u.in_domain(i, j) || u.in_domain(i + 1, j))) continue;
      total += wy(j) * face_cost(u.at(i + 1, j) - u.at(i, j), model) * u.h2;
    }
  }
  // horizontal faces, length h1
  for (int j = 0; j + 1 < u.ny; ++j) {
    for (int i = 0; i < u.nx; ++i) {
      if (!(u.in_domain(i, j) || u.in_domain(i, j + 1))) continue;
      total += wx(i) * face_cost(u.at(i, j + 1) - u.at(i, j), model) * u.h1;
    }
  }
  return total;
}

NetworkSegments extract_network(const GridImage& u, double mass_tol) {
  if (!(mass_tol > 0.0)) throw invalid_parameter("extract_network: mass_tol must be > 0");
  NetworkSegments segs;
  for (int j = 0; j < u.ny; ++j) {
    for (int i = 0; i + 1 < u.nx; ++i) {
      if (!(u.in_domain(i, j) || u.in_domain(i + 1, j))) continue;
      const double jump = std::abs(u.at(i + 1, j) - u.at(i, j));
      if (jump <= mass_tol) continue;
      const double xm = 0.5 * (u.x(i) + u.x(i + 1));
      segs.push_back({{xm, u.y(j) - 0.5 * u.h2}, {xm, u.y(j) + 0.5 * u.h2}, jump});
    }
  }
  for (int j = 0; j + 1 < u.ny; ++j) {
    for (int i = 0; i < u.nx; ++i) {
      if (!(u.in_domain(i, j) || u.in_domain(i, j + 1))) continue;
      const double jump = std::abs(u.at(i, j + 1) - u.at(i, j));
      if (jump <= mass_tol) continue;
      const double ym = 0.5 * (u.y(j) + u.y(j + 1));
      segs.push_back({{u.x(i) - 0.5 * u.h1, ym}, {u.x(i) + 0.5 * u.h1, ym}, jump});
    }
  }
  return segs;
}

int count_strands(const GridImage& u, double y, double mass_tol) {
  int j = static_cast<int>(std::lround((y - u.origin.y) / u.h2));
  j = std::clamp(j, u.band, u.ny - 1 - u.band);
  int strands = 0;
  bool in_run = false;
  for (int i = 0; i + 1 < u.nx; ++i) {
    const bool jumping = std::abs(u.at(i + 1, j) - u.at(i, j)) > mass_tol;
    if (jumping && !in_run) ++strands;
    in_run = jumping;
  }
  return strands;
}

}  // namespace netlift

#pragma once

#include <vector>

#include "netlift/lift.hpp"

namespace netlift {

// Scalar image on the 2D grid footprint (one value per node column).
struct GridImage {
  int nx = 0, ny = 0;
  double h1 = 0.0, h2 = 0.0;
  Vec2 origin;
  int band = 1;
  std::vector<double> u;  // row-major, u[j*nx + i]

  double& at(int i, int j) { return u[static_cast<std::size_t>(j) * nx + i]; }
  double at(int i, int j) const { return u[static_cast<std::size_t>(j) * nx + i]; }
  double x(int i) const { return origin.x + i * h1; }
  double y(int j) const { return origin.y + j * h2; }
  bool in_domain(int i, int j) const {
    return i >= band && i <= nx - 1 - band && j >= band && j <= ny - 1 - band;
  }
};

struct CollapseResult {
  GridImage u;
  double binarity_score = 0.0;  // fraction of free nodes with v in [0.05, 0.95]
};

// Height recovery by layer counting: u = s0 + hs * #{l : v > 1/2}.
CollapseResult collapse(const LiftedField& v, const Grid3& g);

// Alternative soft reading u = s0 + hs * sum_l v (not used by the solver path).
GridImage collapse_soft(const LiftedField& v, const Grid3& g);

// Rotated gradient of the image on staggered faces:
//   fx sits on vertical node edges (i, j+1/2), fy on horizontal edges (i+1/2, j).
struct FluxField {
  int nx = 0, ny = 0;
  double h1 = 0.0, h2 = 0.0;
  Vec2 origin;
  std::vector<double> fx;  // nx * (ny-1), fx[j*nx + i] = -(u(i,j+1)-u(i,j))/h2
  std::vector<double> fy;  // (nx-1) * ny, fy[j*(nx-1) + i] = (u(i+1,j)-u(i,j))/h1
};

FluxField flux(const GridImage& u);

// Max absolute net outflow over all grid cells; identically ~0 for any image.
double flux_divergence(const FluxField& f);

struct NetworkSegment {
  Vec2 a, b;
  double mass = 0.0;
};
using NetworkSegments = std::vector<NetworkSegment>;

// Jump energy of the piecewise-constant image over cell faces inside the
// closed domain: a face contributes min(a*d, d+eps) (urban) or d^(1-eps)
// (branched) times its length, d the absolute jump across it.
double grid_energy(const GridImage& u, const TransportModel& model);

// One segment per face whose jump exceeds mass_tol.
NetworkSegments extract_network(const GridImage& u, double mass_tol);

// Number of jump clusters (maximal runs of consecutive above-threshold faces)
// crossing the horizontal line at height y inside the domain.
int count_strands(const GridImage& u, double y, double mass_tol);

}  // namespace netlift

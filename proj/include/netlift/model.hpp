#pragma once

#include <optional>
#include <vector>

#include "netlift/errors.hpp"
#include "netlift/geometry.hpp"

namespace netlift {

// Non-negative atomic measure on the domain boundary, atoms addressed by
// counterclockwise arclength from the origin corner.
struct BoundaryMeasure {
  struct Atom {
    double t = 0.0;  // arclength position in [0, perimeter)
    double w = 0.0;  // mass, > 0
  };
  std::vector<Atom> atoms;

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.w;
    return s;
  }
};

// Sorts by position, merges coincident atoms, drops zero-mass atoms.
BoundaryMeasure canonical(BoundaryMeasure m, double perimeter);

void validate(const BoundaryMeasure& m, double perimeter);

enum class ModelKind { Urban, Branched };

struct TransportModel {
  ModelKind kind = ModelKind::Urban;
  double a = 0.0;    // urban only, > 1
  double eps = 0.0;  // urban: > 0, branched: in (0,1)

  static TransportModel urban(double a, double eps);
  static TransportModel branched(double eps);

  // per-edge cost of carrying weight w over unit length
  double edge_rate(double w) const;
};

struct Scenario {
  double width = 0.0;   // domain is [0,width] x [0,height]
  double height = 0.0;
  BoundaryMeasure sources;
  BoundaryMeasure sinks;
  TransportModel model;

  double perimeter() const { return 2.0 * (width + height); }
  Vec2 boundary_point(double t) const;   // gamma(t), counterclockwise from (0,0)
  double boundary_arclength(Vec2 p) const;  // gamma^{-1} of the closest boundary point
};

// Throws unless masses balance to relative 1e-12 and parameters are in range.
void validate(const Scenario& sc);

struct TransportGraph {
  struct Edge {
    int tail = 0;
    int head = 0;
    double weight = 0.0;
  };
  std::vector<Vec2> vertices;
  std::vector<Edge> edges;

  double edge_length(const Edge& e) const { return dist(vertices[e.tail], vertices[e.head]); }
};

// Merges vertices closer than tol, drops self-loops and zero-weight edges,
// sums weights of parallel edges (orientation-aware).
TransportGraph canonical(const TransportGraph& g, double tol = 1e-9);

struct SignedAtomMeasure {
  struct PointMass {
    Vec2 p;
    double value = 0.0;
  };
  std::vector<PointMass> atoms;

  double total() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.value;
    return s;
  }
};

// Merges atoms at coincident points (within tol), drops zero values.
SignedAtomMeasure canonical(SignedAtomMeasure m, double tol = 1e-9);

double graph_cost_urban(const TransportGraph& g, double eps, double a);
double graph_cost_branched(const TransportGraph& g, double eps);
double graph_cost(const TransportGraph& g, const TransportModel& model);

// Net outflow per vertex as an atomic measure (exact bookkeeping).
SignedAtomMeasure net_divergence(const TransportGraph& g);

// Max absolute mismatch between the graph's vertex divergences and the target
// atoms (position match tolerance 1e-9).
double divergence_residual(const TransportGraph& g, const SignedAtomMeasure& target);

}  // namespace netlift

#include "netlift/model.hpp"

#include <algorithm>
#include <cmath>

namespace netlift {

BoundaryMeasure canonical(BoundaryMeasure m, double perimeter) {
  std::sort(m.atoms.begin(), m.atoms.end(),
            [](const auto& a, const auto& b) { return a.t < b.t; });
  BoundaryMeasure out;
  for (const auto& a : m.atoms) {
    if (a.w == 0.0) continue;
    if (!out.atoms.empty() && a.t == out.atoms.back().t)
      out.atoms.back().w += a.w;
    else
      out.atoms.push_back(a);
  }
  validate(out, perimeter);
  return out;
}

void validate(const BoundaryMeasure& m, double perimeter) {
  double prev = -1.0;
  for (const auto& a : m.atoms) {
    if (!(a.t >= 0.0 && a.t < perimeter))
      throw invalid_parameter("boundary atom position outside [0, perimeter)");
    if (!(a.w > 0.0)) throw invalid_parameter("boundary atom mass must be positive");
    if (!(a.t > prev)) throw invalid_parameter("boundary atom positions must be strictly increasing");
    prev = a.t;
  }
}

TransportModel TransportModel::urban(double a, double eps) {
  if (!(a > 1.0)) throw invalid_parameter("urban model requires a > 1");
  if (!(eps > 0.0)) throw invalid_parameter("urban model requires eps > 0");
  return {ModelKind::Urban, a, eps};
}

TransportModel TransportModel::branched(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameter("branched model requires eps in (0,1)");
  return {ModelKind::Branched, 0.0, eps};
}

double TransportModel::edge_rate(double w) const {
  if (kind == ModelKind::Urban) return std::min(a * w, w + eps);
  return w > 0.0 ? std::pow(w, 1.0 - eps) : 0.0;
}

Vec2 Scenario::boundary_point(double t) const {
  const double per = perimeter();
  t = std::fmod(t, per);
  if (t < 0.0) t += per;
  if (t < width) return {t, 0.0};
  t -= width;
  if (t < height) return {width, t};
  t -= height;
  if (t < width) return {width - t, height};
  t -= width;
  return {0.0, height - t};
}

double Scenario::boundary_arclength(Vec2 p) const {
  // distances to the four edges of [0,width] x [0,height]
  const double clx = std::clamp(p.x, 0.0, width);
  const double cly = std::clamp(p.y, 0.0, height);
  struct Cand {
    double d;
    double t;
  };
  const Cand cand[4] = {
      {std::hypot(p.x - clx, p.y - 0.0), clx},
      {std::hypot(p.x - width, p.y - cly), width + cly},
      {std::hypot(p.x - clx, p.y - height), width + height + (width - clx)},
      {std::hypot(p.x - 0.0, p.y - cly), 2.0 * width + height + (height - cly)},
  };
  // closest boundary point; ties resolved by the smallest arclength
  double best_d = cand[0].d, best_t = cand[0].t;
  for (int i = 1; i < 4; ++i) {
    if (cand[i].d < best_d - 1e-15 ||
        (std::abs(cand[i].d - best_d) <= 1e-15 && cand[i].t < best_t)) {
      best_d = cand[i].d;
      best_t = cand[i].t;
    }
  }
  const double per = perimeter();
  if (best_t >= per) best_t -= per;  // top-left corner wraps to t = 0 side
  return best_t;
}

void validate(const Scenario& sc) {
  if (!(sc.width > 0.0 && sc.height > 0.0))
    throw invalid_parameter("scenario domain must have positive extent");
  validate(sc.sources, sc.perimeter());
  validate(sc.sinks, sc.perimeter());
  if (sc.model.kind == ModelKind::Urban)
    TransportModel::urban(sc.model.a, sc.model.eps);
  else
    TransportModel::branched(sc.model.eps);
  const double mp = sc.sources.total_mass();
  const double mm = sc.sinks.total_mass();
  const double scale = std::max({mp, mm, 1e-300});
  if (std::abs(mp - mm) > 1e-12 * scale)
    throw infeasible_error("source and sink masses do not balance");
}

TransportGraph canonical(const TransportGraph& g, double tol) {
  TransportGraph out;
  std::vector<int> remap(g.vertices.size(), -1);
  for (size_t i = 0; i < g.vertices.size(); ++i) {
    for (size_t j = 0; j < out.vertices.size(); ++j) {
      if (dist(g.vertices[i], out.vertices[j]) <= tol) {
        remap[i] = static_cast<int>(j);
        break;
      }
    }
    if (remap[i] < 0) {
      remap[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(g.vertices[i]);
    }
  }
  for (const auto& e : g.edges) {
    int t = remap[e.tail], h = remap[e.head];
    if (t == h || e.weight == 0.0) continue;
    bool merged = false;
    for (auto& oe : out.edges) {
      if (oe.tail == t && oe.head == h) {
        oe.weight += e.weight;
        merged = true;
        break;
      }
      if (oe.tail == h && oe.head == t) {
        oe.weight -= e.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.edges.push_back({t, h, e.weight});
  }
  // reorient negative weights, drop cancelled edges
  std::vector<TransportGraph::Edge> kept;
  for (auto e : out.edges) {
    if (e.weight < 0.0) {
      std::swap(e.tail, e.head);
      e.weight = -e.weight;
    }
    if (e.weight > 0.0) kept.push_back(e);
  }
  out.edges = std::move(kept);
  return out;
}

SignedAtomMeasure canonical(SignedAtomMeasure m, double tol) {
  SignedAtomMeasure out;
  for (const auto& a : m.atoms) {
    bool merged = false;
    for (auto& o : out.atoms) {
      if (dist(o.p, a.p) <= tol) {
        o.value += a.value;
        merged = true;
        break;
      }
    }
    if (!merged) out.atoms.push_back(a);
  }
  std::erase_if(out.atoms, [](const auto& a) { return a.value == 0.0; });
  return out;
}

double graph_cost_urban(const TransportGraph& g, double eps, double a) {
  if (!(a > 1.0) || !(eps > 0.0)) throw invalid_parameter("graph_cost_urban: need a > 1, eps > 0");
  double total = 0.0;
  for (const auto& e : g.edges) {
    if (e.weight < 0.0) throw invalid_parameter("graph_cost_urban: negative edge weight");
    total += std::min(a * e.weight, e.weight + eps) * g.edge_length(e);
  }
  return total;
}

double graph_cost_branched(const TransportGraph& g, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw invalid_parameter("graph_cost_branched: need eps in (0,1)");
  double total = 0.0;
  for (const auto& e : g.edges) {
    if (e.weight < 0.0) throw invalid_parameter("graph_cost_branched: negative edge weight");
    if (e.weight > 0.0) total += std::pow(e.weight, 1.0 - eps) * g.edge_length(e);
  }
  return total;
}

double graph_cost(const TransportGraph& g, const TransportModel& model) {
  return model.kind == ModelKind::Urban ? graph_cost_urban(g, model.eps, model.a)
                                        : graph_cost_branched(g, model.eps);
}

SignedAtomMeasure net_divergence(const TransportGraph& g) {
  std::vector<double> net(g.vertices.size(), 0.0);
  for (const auto& e : g.edges) {
    net[e.tail] += e.weight;
    net[e.head] -= e.weight;
  }
  SignedAtomMeasure out;
  for (size_t i = 0; i < net.size(); ++i)
    if (net[i] != 0.0) out.atoms.push_back({g.vertices[i], net[i]});
  return out;
}

double divergence_residual(const TransportGraph& g, const SignedAtomMeasure& target) {
  constexpr double match_tol = 1e-9;
  std::vector<double> net(g.vertices.size(), 0.0);
  for (const auto& e : g.edges) {
    net[e.tail] += e.weight;
    net[e.head] -= e.weight;
  }
  std::vector<bool> used(target.atoms.size(), false);
  double residual = 0.0;
  for (size_t i = 0; i < g.vertices.size(); ++i) {
    double want = 0.0;
    for (size_t k = 0; k < target.atoms.size(); ++k) {
      if (!used[k] && dist(target.atoms[k].p, g.vertices[i]) <= match_tol) {
        want += target.atoms[k].value;
        used[k] = true;
      }
    }
    residual = std::max(residual, std::abs(net[i] - want));
  }
  for (size_t k = 0; k < target.atoms.size(); ++k)
    if (!used[k]) residual = std::max(residual, std::abs(target.atoms[k].value));
  return residual;
}

}  // namespace netlift

#pragma once

#include <string>
#include <vector>

#include "netlift/extract.hpp"
#include "netlift/model.hpp"

namespace netlift {

// Rooted merge/split tree over an ordered run of terminals. Leaves are
// terminal indices; internal nodes become Steiner points.
struct TreeNode {
  int leaf = -1;  // >= 0: terminal index
  std::vector<TreeNode> kids;

  bool is_leaf() const { return leaf >= 0; }
  int internal_count() const {
    if (is_leaf()) return 0;
    int c = 1;
    for (const auto& k : kids) c += k.internal_count();
    return c;
  }
};

// Order-respecting merge/split forest: contiguous source blocks map to
// contiguous sink blocks in order, each pair connected by a trunk between the
// merge root and the split root.
struct Topology {
  struct Component {
    int src_lo = 0, src_hi = 0;  // inclusive terminal ranges
    int snk_lo = 0, snk_hi = 0;
    TreeNode merge;  // over sources
    TreeNode split;  // over sinks
  };
  std::vector<Component> comps;
  int steiner_count = 0;
  std::string id;
};

std::vector<Topology> enumerate_topologies(int k_sources, int k_sinks, int max_steiner);

// Terminals of a scenario, sorted left to right (sources then sinks).
struct OracleTerminals {
  std::vector<Vec2> src_pts, snk_pts;
  std::vector<double> src_mass, snk_mass;
};
OracleTerminals oracle_terminals(const Scenario& sc);

// Mass conservation requires every component's source and sink blocks to
// balance; infeasible topologies are skipped by the oracle.
bool topology_feasible(const Topology& t, const OracleTerminals& term);

struct OptimizedTopology {
  TransportGraph graph;
  double energy = 0.0;
};

// Coordinate descent with golden-section line search over the Steiner
// coordinates, five deterministic restarts.
OptimizedTopology optimize_vertices(const Topology& t, const Scenario& sc);

struct OracleResult {
  TransportGraph graph;
  double energy = 0.0;
  std::string topology_id;
  int steiner_count = 0;
  Topology topology;
};

// Minimum over the enumerated topologies plus the W1-optimal-plan graph
// (candidate id "zz-w1-plan"); ties broken by fewer Steiner points, then id.
OracleResult oracle_min_energy(const Scenario& sc, int max_steiner);

enum class TopologyFamily { Pipes, PairwiseTrees, DoubleTree, SingleTrunk, Other };
TopologyFamily classify_family(const Topology& t);
std::string family_name(TopologyFamily f);

// Number of graph edges crossing the horizontal line at height y.
int crossing_count(const TransportGraph& g, double y);

// Sorted x positions where edges cross the horizontal line at height y.
std::vector<double> crossing_positions(const TransportGraph& g, double y);

// Heights probing every constant-crossing interval of the graph: midpoints
// between consecutive distinct vertex heights strictly inside (0, height).
std::vector<double> probe_heights(const TransportGraph& g, double height);

// The extracted image matches the oracle network when strand counts agree
// with edge crossings at every probe height.
bool topology_matches(const TransportGraph& oracle_graph, const GridImage& u, double height,
                      double mass_tol);

}  // namespace netlift

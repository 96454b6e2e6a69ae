#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dokl {

// Both rules map a pairwise distance to gamma = exp(-dist / scale). They
// differ only by convention: Correlation expects scale to be the side length
// of the deployment square, so the exponent is the distance on positions
// normalized to the unit square; ExpDistance uses the scale directly (e.g.
// 1000 km for geographic graphs).
enum class GammaRule { Correlation, ExpDistance };

enum class DistanceMetric { Euclidean, Haversine };

// Undirected connected agent graph with one tolerance gamma_ij and one dual
// variable mu_ij per DIRECTED edge. Every undirected edge {i, j} induces the
// two directed entries (i->j) and (j->i): each direction is driven by its
// owner's samples, so the duals evolve independently even though gamma is
// symmetric. Directed edges are indexed owner-major, neighbors ascending;
// that fixed layout is the coordinate system of the dual vector.
struct Topology {
  int V = 0;
  std::vector<std::pair<int, int>> edges;     // undirected, first < second
  std::vector<std::vector<int>> adjacency;    // sorted neighbor lists
  std::vector<int> edge_offset;               // per-agent start into duals
  std::vector<double> gamma;                  // per directed edge, >= 0
  std::vector<double> duals;                  // per directed edge, >= 0

  // Index of directed edge (i -> j) in gamma/duals. Throws on non-edges.
  int directed_index(int i, int j) const;
  int directed_edge_count() const { return static_cast<int>(gamma.size()); }
  double dual_norm() const;
};

// positions is 2 x V, one column per agent. Connects {i, j} iff their
// distance is strictly below connect_radius, sets gamma from the rule, and
// zero-initializes the duals. Haversine treats rows as (longitude, latitude)
// in degrees and measures distance in kilometers. Throws
// std::invalid_argument if the resulting graph is disconnected, naming an
// isolated component.
Topology build_geometric(const Eigen::MatrixXd& positions,
                         double connect_radius, GammaRule rule, double scale,
                         DistanceMetric metric = DistanceMetric::Euclidean);

// Sorted neighbor list. Bad ids throw std::invalid_argument.
const std::vector<int>& neighbors(const Topology& t, int i);

// Pairwise distance used by build_geometric, exposed for the data recipes.
double pair_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     DistanceMetric metric);

}  // namespace dokl

#include "dokl/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <string>

namespace dokl {

namespace {
constexpr double kEarthRadiusKm = 6371.0;
}

double pair_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     DistanceMetric metric) {
  if (metric == DistanceMetric::Euclidean) return (a - b).norm();
  // Haversine on (longitude, latitude) degrees.
  const double deg = std::numbers::pi / 180.0;
  const double dlat = (b.y() - a.y()) * deg;
  const double dlon = (b.x() - a.x()) * deg;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.y() * deg) * std::cos(b.y() * deg) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

int Topology::directed_index(int i, int j) const {
  if (i < 0 || i >= V || j < 0 || j >= V) {
    throw std::invalid_argument("directed_index: agent id out of range");
  }
  const auto& nb = adjacency[static_cast<std::size_t>(i)];
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) {
    throw std::invalid_argument("directed_index: (" + std::to_string(i) +
                                " -> " + std::to_string(j) +
                                ") is not an edge");
  }
  return edge_offset[static_cast<std::size_t>(i)] +
         static_cast<int>(it - nb.begin());
}

double Topology::dual_norm() const {
  double s = 0.0;
  for (double m : duals) s += m * m;
  return std::sqrt(s);
}

Topology build_geometric(const Eigen::MatrixXd& positions,
                         double connect_radius, GammaRule rule, double scale,
                         DistanceMetric metric) {
  const int V = static_cast<int>(positions.cols());
  if (positions.rows() != 2) {
    throw std::invalid_argument("build_geometric: positions must be 2 x V");
  }
  if (V < 2) {
    throw std::invalid_argument("build_geometric: need at least 2 agents");
  }
  if (!(connect_radius > 0.0)) {
    throw std::invalid_argument("build_geometric: radius must be positive");
  }
  if (!(scale > 0.0)) {
    throw std::invalid_argument("build_geometric: gamma scale must be positive");
  }

  Topology t;
  t.V = V;
  t.adjacency.assign(static_cast<std::size_t>(V), {});
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(V, V);
  for (int i = 0; i < V; ++i) {
    for (int j = i + 1; j < V; ++j) {
      const double d =
          pair_distance(positions.col(i), positions.col(j), metric);
      dist(i, j) = dist(j, i) = d;
      if (d < connect_radius) {
        t.edges.emplace_back(i, j);
        t.adjacency[static_cast<std::size_t>(i)].push_back(j);
        t.adjacency[static_cast<std::size_t>(j)].push_back(i);
      }
    }
  }
  // Neighbor lists are built in ascending order by the loop above.

  // Connectivity: BFS from node 0 must reach everyone.
  std::vector<char> seen(static_cast<std::size_t>(V), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : t.adjacency[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  if (reached != V) {
    std::string isolated;
    int listed = 0;
    for (int v = 0; v < V && listed < 10; ++v) {
      if (!seen[static_cast<std::size_t>(v)]) {
        isolated += (listed ? ", " : "") + std::to_string(v);
        ++listed;
      }
    }
    throw std::invalid_argument(
        "build_geometric: graph disconnected at radius " +
        std::to_string(connect_radius) + "; component not reachable from 0: {" +
        isolated + (reached + listed < V ? ", ..." : "") + "}");
  }

  t.edge_offset.resize(static_cast<std::size_t>(V));
  int off = 0;
  for (int i = 0; i < V; ++i) {
    t.edge_offset[static_cast<std::size_t>(i)] = off;
    off += static_cast<int>(t.adjacency[static_cast<std::size_t>(i)].size());
  }
  t.gamma.resize(static_cast<std::size_t>(off));
  t.duals.assign(static_cast<std::size_t>(off), 0.0);
  for (int i = 0; i < V; ++i) {
    for (int j : t.adjacency[static_cast<std::size_t>(i)]) {
      t.gamma[static_cast<std::size_t>(t.directed_index(i, j))] =
          std::exp(-dist(i, j) / scale);
    }
  }
  (void)rule;  // both rules share the exp(-dist / scale) form; see header
  return t;
}

const std::vector<int>& neighbors(const Topology& t, int i) {
  if (i < 0 || i >= t.V) {
    throw std::invalid_argument("neighbors: agent id out of range");
  }
  return t.adjacency[static_cast<std::size_t>(i)];
}

}  // namespace dokl

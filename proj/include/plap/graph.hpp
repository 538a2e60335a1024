#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace plap {

using Index = Eigen::Index;

struct LatticeSpec {
  int dim = 1;
  int radius = 1;
  double weight = 1.0;
  /// Builds larger than this are rejected before allocating.
  std::size_t max_vertices = 20'000'000;
};

struct Neighbor {
  Index vertex;
  double weight;
};

/// Finite truncation of an infinite, symmetric, locally finite weighted graph.
///
/// Vertices are numbered in BFS order from the root, so vertex 0 is the root
/// and depth() is the combinatorial distance to it. Edges that were cut off by
/// the truncation are kept only as ghost_measure: their weight still counts in
/// m(x), and the far endpoint is treated as a vertex pinned at value 0.
///
/// Immutable after construction.
class WeightedGraph {
 public:
  struct Edge {
    std::int64_t x;
    std::int64_t y;
    double w;
  };

  /// Builds from undirected edges over arbitrary integer labels. Each edge is
  /// stored in both directions. Throws std::invalid_argument on self-loops,
  /// nonpositive weights, duplicate edges, or a disconnected vertex set.
  /// A graph with a single vertex and no edges gets m = 1.
  static WeightedGraph from_edges(std::int64_t root_label,
                                  std::span<const Edge> edges,
                                  std::span<const std::pair<std::int64_t, double>> ghosts = {},
                                  std::span<const std::int64_t> extra_vertices = {});

  /// One vertex, no edges, unit measure. Used as the ODE oracle u' = -q u^r.
  static WeightedGraph isolated_vertex();

  Index size() const { return static_cast<Index>(depth_.size()); }
  Index root() const { return 0; }

  std::span<const Neighbor> neighbors(Index x) const {
    return {adjacency_.data() + offsets_[x], adjacency_.data() + offsets_[x + 1]};
  }

  const Eigen::VectorXd& measure() const { return measure_; }
  const Eigen::VectorXd& ghost_measure() const { return ghost_; }
  double measure(Index x) const { return measure_[x]; }
  double ghost_measure(Index x) const { return ghost_[x]; }

  /// Distance to the root.
  int depth(Index x) const { return depth_[x]; }
  const std::vector<int>& depths() const { return depth_; }

  /// Largest root distance present; balls beyond it are not represented.
  int truncation_radius() const { return depth_.empty() ? 0 : depth_.back(); }

  /// Original label of a vertex (edge-list id, or encoded lattice point).
  std::int64_t label(Index x) const { return labels_[x]; }
  /// Throws std::out_of_range for an unknown label.
  Index index_of(std::int64_t label) const;

  /// Lattice coordinates (size() x dim); empty for non-lattice graphs.
  const Eigen::MatrixXi& coordinates() const { return coords_; }
  /// Throws std::out_of_range if the point is outside the truncation.
  Index index_of_point(std::span<const int> point) const;

  std::size_t edge_count() const { return adjacency_.size() / 2; }

  /// Throws std::logic_error describing the first broken structural invariant.
  void check_invariants() const;

 private:
  friend WeightedGraph build_lattice(const LatticeSpec&);
  void index_labels();

  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  Eigen::VectorXd measure_;
  Eigen::VectorXd ghost_;
  std::vector<int> depth_;
  std::vector<std::int64_t> labels_;
  Eigen::MatrixXi coords_;
  std::unordered_map<std::int64_t, Index> index_;
};

/// Number of points of Z^dim within L1 distance `radius` of the origin.
std::size_t l1_ball_count(int dim, int radius);

/// Induced subgraph of Z^dim on the L1 ball of the spec's radius. Every vertex
/// carries the full lattice measure 2*dim*weight; links leaving the ball are
/// ghost measure. Throws std::invalid_argument for an invalid spec and
/// std::length_error when the ball exceeds max_vertices.
WeightedGraph build_lattice(const LatticeSpec& spec);

/// Reads the edge-list text format:
///
///   root <label>
///   <x> <y> <w>            one undirected edge per line
///   ghost <x> <g>          optional ghost measure at x
///   vertex <x>             optional, declares an isolated vertex
///
/// Blank lines and lines starting with '#' are ignored. Errors carry the line
/// number.
WeightedGraph load_edge_list(const std::filesystem::path& path);
WeightedGraph parse_edge_list(std::istream& in);

/// Shortest edge-path length between two vertices. Throws std::logic_error
/// if y is unreachable from x.
int distance(const WeightedGraph& g, Index x, Index y);

/// mu(B(R)): total measure of vertices within distance R of the root.
/// Throws std::out_of_range if R exceeds the truncation radius.
double ball_volume(const WeightedGraph& g, int R);

/// Smallest C with mu(B(R)) <= C R^N over the sampled radii.
double volume_growth_constant(const WeightedGraph& g, int N, std::span<const int> radii);

}  // namespace plap

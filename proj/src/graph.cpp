#include "plap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>

namespace plap {

namespace {

std::vector<int> bfs_depths(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                            std::size_t source, std::vector<std::size_t>* order) {
  std::vector<int> depth(n, -1);
  std::queue<std::size_t> queue;
  depth[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop();
    if (order) order->push_back(x);
    for (auto y : adj[x]) {
      if (depth[y] < 0) {
        depth[y] = depth[x] + 1;
        queue.push(y);
      }
    }
  }
  return depth;
}

std::string line_error(int line, const std::string& what) {
  return "edge list line " + std::to_string(line) + ": " + what;
}

}  // namespace

WeightedGraph WeightedGraph::from_edges(std::int64_t root_label, std::span<const Edge> edges,
                                        std::span<const std::pair<std::int64_t, double>> ghosts,
                                        std::span<const std::int64_t> extra_vertices) {
  std::map<std::int64_t, std::size_t> local;
  auto intern = [&](std::int64_t label) {
    auto [it, inserted] = local.try_emplace(label, local.size());
    return it->second;
  };
  intern(root_label);
  for (const auto& e : edges) {
    if (e.x == e.y) {
      throw std::invalid_argument("self-loop at vertex " + std::to_string(e.x));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      throw std::invalid_argument("edge " + std::to_string(e.x) + "-" + std::to_string(e.y) +
                                  " has non-positive or non-finite weight");
    }
    intern(e.x);
    intern(e.y);
  }
  for (const auto& [label, g] : ghosts) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("ghost measure at vertex " + std::to_string(label) +
                                  " must be finite and nonnegative");
    }
    intern(label);
  }
  for (auto label : extra_vertices) intern(label);

  const std::size_t n = local.size();
  std::vector<std::int64_t> label_of(n);
  for (const auto& [label, id] : local) label_of[id] = label;

  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::vector<double>> wts(n);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges) {
    auto a = local.at(e.x);
    auto b = local.at(e.y);
    if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
      throw std::invalid_argument("duplicate edge " + std::to_string(e.x) + "-" +
                                  std::to_string(e.y));
    }
    adj[a].push_back(b);
    wts[a].push_back(e.w);
    adj[b].push_back(a);
    wts[b].push_back(e.w);
  }

  std::vector<std::size_t> order;
  const auto depth = bfs_depths(n, adj, 0, &order);
  if (order.size() != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (depth[i] < 0) {
        throw std::invalid_argument("graph is not connected: vertex " +
                                    std::to_string(label_of[i]) + " is unreachable from root");
      }
    }
  }

  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  WeightedGraph g;
  g.offsets_.assign(1, 0);
  g.depth_.resize(n);
  g.labels_.resize(n);
  g.measure_ = Eigen::VectorXd::Zero(static_cast<Index>(n));
  g.ghost_ = Eigen::VectorXd::Zero(static_cast<Index>(n));
  for (const auto& [label, ghost] : ghosts) g.ghost_[static_cast<Index>(rank[local.at(label)])] += ghost;

  for (std::size_t i = 0; i < n; ++i) {
    const auto old = order[i];
    std::vector<Neighbor> row;
    for (std::size_t k = 0; k < adj[old].size(); ++k) {
      row.push_back({static_cast<Index>(rank[adj[old][k]]), wts[old][k]});
    }
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    double m = g.ghost_[static_cast<Index>(i)];
    for (const auto& nb : row) m += nb.weight;
    g.adjacency_.insert(g.adjacency_.end(), row.begin(), row.end());
    g.offsets_.push_back(g.adjacency_.size());
    g.depth_[i] = depth[old];
    g.labels_[i] = label_of[old];
    g.measure_[static_cast<Index>(i)] = m;
  }

  if (n == 1 && g.measure_[0] == 0.0) {
    g.measure_[0] = 1.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(g.measure_[static_cast<Index>(i)] > 0.0)) {
      throw std::invalid_argument("vertex " + std::to_string(g.labels_[i]) + " has zero measure");
    }
  }
  g.index_labels();
  return g;
}

WeightedGraph WeightedGraph::isolated_vertex() {
  const std::int64_t root = 0;
  return from_edges(root, {});
}

void WeightedGraph::index_labels() {
  index_.clear();
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], static_cast<Index>(i));
}

Index WeightedGraph::index_of(std::int64_t label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw std::out_of_range("no vertex labelled " + std::to_string(label));
  return it->second;
}

namespace {

std::int64_t encode_point(std::span<const int> point, int radius) {
  const std::int64_t base = 2 * static_cast<std::int64_t>(radius) + 1;
  std::int64_t label = 0;
  for (auto it = point.rbegin(); it != point.rend(); ++it) label = label * base + (*it + radius);
  return label;
}

}  // namespace

Index WeightedGraph::index_of_point(std::span<const int> point) const {
  if (coords_.size() == 0 || static_cast<Index>(point.size()) != coords_.cols()) {
    throw std::out_of_range("point does not match the lattice dimension");
  }
  const int radius = truncation_radius();
  long l1 = 0;
  for (int c : point) l1 += std::abs(c);
  if (l1 > radius) throw std::out_of_range("point lies outside the truncated lattice");
  return index_of(encode_point(point, radius));
}

void WeightedGraph::check_invariants() const {
  const Index n = size();
  if (n == 0) throw std::logic_error("empty graph");
  for (Index x = 0; x < n; ++x) {
    double sum = ghost_[x];
    for (const auto& nb : neighbors(x)) {
      if (nb.vertex == x) throw std::logic_error("self-loop at " + std::to_string(x));
      if (!(nb.weight > 0.0)) throw std::logic_error("non-positive weight at " + std::to_string(x));
      const auto back = neighbors(nb.vertex);
      const bool mirrored = std::any_of(back.begin(), back.end(), [&](const Neighbor& r) {
        return r.vertex == x && r.weight == nb.weight;
      });
      if (!mirrored) {
        throw std::logic_error("edge " + std::to_string(x) + "->" + std::to_string(nb.vertex) +
                               " has no symmetric partner");
      }
      sum += nb.weight;
    }
    if (!(measure_[x] > 0.0)) throw std::logic_error("non-positive measure at " + std::to_string(x));
    const bool isolated = n == 1 && sum == 0.0;
    if (!isolated && std::abs(sum - measure_[x]) > 1e-12 * measure_[x]) {
      throw std::logic_error("measure mismatch at " + std::to_string(x));
    }
  }
  std::vector<std::vector<std::size_t>> adj(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x) {
    for (const auto& nb : neighbors(x)) adj[static_cast<std::size_t>(x)].push_back(static_cast<std::size_t>(nb.vertex));
  }
  const auto depth = bfs_depths(static_cast<std::size_t>(n), adj, 0, nullptr);
  if (depth != depth_) throw std::logic_error("stored depths disagree with BFS from the root");
}

std::size_t l1_ball_count(int dim, int radius) {
  if (dim < 1 || radius < 0) throw std::invalid_argument("l1_ball_count: dim >= 1, radius >= 0");
  // sum_k 2^k C(dim,k) C(radius,k)
  long double total = 0;
  long double choose_d = 1, choose_r = 1, pow2 = 1;
  for (int k = 0; k <= std::min(dim, radius); ++k) {
    if (k > 0) {
      choose_d = choose_d * (dim - k + 1) / k;
      choose_r = choose_r * (radius - k + 1) / k;
      pow2 *= 2;
    }
    total += pow2 * choose_d * choose_r;
  }
  if (total >= static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(total)));
}

WeightedGraph build_lattice(const LatticeSpec& spec) {
  if (spec.dim < 1) throw std::invalid_argument("lattice dim must be >= 1");
  if (spec.radius < 1) throw std::invalid_argument("lattice radius must be >= 1");
  if (!(spec.weight > 0.0) || !std::isfinite(spec.weight)) {
    throw std::invalid_argument("lattice weight must be positive and finite");
  }
  const auto count = l1_ball_count(spec.dim, spec.radius);
  const long double label_space =
      std::pow(2.0L * spec.radius + 1.0L, static_cast<long double>(spec.dim));
  if (count > spec.max_vertices ||
      label_space > static_cast<long double>(std::numeric_limits<std::int64_t>::max())) {
    throw std::length_error("lattice ball of dim " + std::to_string(spec.dim) + " radius " +
                            std::to_string(spec.radius) + " exceeds the vertex cap of " +
                            std::to_string(spec.max_vertices));
  }

  const int dim = spec.dim;
  const int R = spec.radius;
  const auto n = static_cast<Index>(count);

  WeightedGraph g;
  g.coords_.resize(n, dim);
  g.labels_.reserve(count);
  g.depth_.reserve(count);
  g.offsets_.reserve(count + 1);
  g.offsets_.push_back(0);
  g.adjacency_.reserve(count * 2 * static_cast<std::size_t>(dim));
  g.measure_ = Eigen::VectorXd::Constant(n, 2.0 * dim * spec.weight);
  g.ghost_ = Eigen::VectorXd::Zero(n);
  g.index_.reserve(count);

  std::vector<int> point(static_cast<std::size_t>(dim), 0);
  auto discover = [&](std::span<const int> p, int depth) {
    const auto label = encode_point(p, R);
    auto [it, inserted] = g.index_.try_emplace(label, static_cast<Index>(g.labels_.size()));
    if (inserted) {
      const Index id = it->second;
      for (int k = 0; k < dim; ++k) g.coords_(id, k) = p[static_cast<std::size_t>(k)];
      g.labels_.push_back(label);
      g.depth_.push_back(depth);
    }
    return it->second;
  };
  discover(point, 0);

  // Vertices are appended in discovery order, so scanning them in index order
  // is the BFS queue.
  for (Index x = 0; x < n; ++x) {
    for (int k = 0; k < dim; ++k) point[static_cast<std::size_t>(k)] = g.coords_(x, k);
    const int depth = g.depth_[static_cast<std::size_t>(x)];
    std::vector<Neighbor> row;
    for (int k = 0; k < dim; ++k) {
      for (int step : {-1, 1}) {
        auto& c = point[static_cast<std::size_t>(k)];
        const int before = c;
        c += step;
        const int l1 = depth - std::abs(before) + std::abs(c);
        if (l1 <= R) {
          row.push_back({discover(point, l1), spec.weight});
        } else {
          g.ghost_[x] += spec.weight;
        }
        c = before;
      }
    }
    std::sort(row.begin(), row.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
    g.adjacency_.insert(g.adjacency_.end(), row.begin(), row.end());
    g.offsets_.push_back(g.adjacency_.size());
  }
  return g;
}

WeightedGraph parse_edge_list(std::istream& in) {
  std::vector<WeightedGraph::Edge> edges;
  std::vector<std::pair<std::int64_t, double>> ghosts;
  std::vector<std::int64_t> vertices;
  std::optional<std::int64_t> root;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    auto read_label = [&](std::int64_t& out) {
      if (!(ss >> out)) throw std::runtime_error(line_error(line_no, "expected an integer vertex id"));
    };
    auto expect_end = [&] {
      std::string rest;
      if (ss >> rest) throw std::runtime_error(line_error(line_no, "trailing token '" + rest + "'"));
    };
    if (head == "root") {
      if (root) throw std::runtime_error(line_error(line_no, "root declared twice"));
      std::int64_t r = 0;
      read_label(r);
      expect_end();
      root = r;
    } else if (head == "ghost") {
      std::int64_t x = 0;
      double gm = 0.0;
      read_label(x);
      if (!(ss >> gm)) throw std::runtime_error(line_error(line_no, "expected ghost measure"));
      expect_end();
      ghosts.emplace_back(x, gm);
    } else if (head == "vertex") {
      std::int64_t x = 0;
      read_label(x);
      expect_end();
      vertices.push_back(x);
    } else {
      WeightedGraph::Edge e{};
      std::istringstream full(line);
      if (!(full >> e.x >> e.y >> e.w)) {
        throw std::runtime_error(line_error(line_no, "expected 'x y w', 'root x' or 'ghost x g'"));
      }
      std::string rest;
      if (full >> rest) throw std::runtime_error(line_error(line_no, "trailing token '" + rest + "'"));
      edges.push_back(e);
    }
  }
  if (!root) throw std::runtime_error("edge list has no 'root' line");
  return WeightedGraph::from_edges(*root, edges, ghosts, vertices);
}

WeightedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list " + path.string());
  try {
    return parse_edge_list(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

int distance(const WeightedGraph& g, Index x, Index y) {
  if (x < 0 || y < 0 || x >= g.size() || y >= g.size()) {
    throw std::out_of_range("distance: vertex index out of range");
  }
  if (x == y) return 0;
  if (x == g.root()) return g.depth(y);
  if (y == g.root()) return g.depth(x);
  std::vector<int> depth(static_cast<std::size_t>(g.size()), -1);
  std::queue<Index> queue;
  depth[static_cast<std::size_t>(x)] = 0;
  queue.push(x);
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop();
    for (const auto& nb : g.neighbors(v)) {
      auto& d = depth[static_cast<std::size_t>(nb.vertex)];
      if (d < 0) {
        d = depth[static_cast<std::size_t>(v)] + 1;
        if (nb.vertex == y) return d;
        queue.push(nb.vertex);
      }
    }
  }
  throw std::logic_error("vertex " + std::to_string(y) + " unreachable from " + std::to_string(x) +
                         ": graph is not connected");
}

double ball_volume(const WeightedGraph& g, int R) {
  if (R < 0) throw std::invalid_argument("ball_volume: negative radius");
  if (R > g.truncation_radius()) {
    throw std::out_of_range("ball_volume: radius " + std::to_string(R) +
                            " exceeds truncation radius " + std::to_string(g.truncation_radius()));
  }
  const auto& depths = g.depths();
  const auto end = std::upper_bound(depths.begin(), depths.end(), R) - depths.begin();
  return g.measure().head(end).sum();
}

double volume_growth_constant(const WeightedGraph& g, int N, std::span<const int> radii) {
  if (radii.empty()) throw std::invalid_argument("volume_growth_constant: no radii to audit");
  double c = 0.0;
  for (int R : radii) {
    if (R < 1) throw std::invalid_argument("volume_growth_constant: radii must be >= 1");
    c = std::max(c, ball_volume(g, R) / std::pow(static_cast<double>(R), N));
  }
  return c;
}

}  // namespace plap

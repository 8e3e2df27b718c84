#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace slp {

using NodeId = std::size_t;
using EdgeId = std::size_t;

/// Undirected weighted edge. Inside a DataGraph, i < j always holds.
struct WeightedEdge {
  NodeId i = 0;
  NodeId j = 0;
  double w = 0.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Undirected weighted simple graph on the dense node range [0, N).
///
/// Edges are stored in canonical order, sorted by (min(i,j), max(i,j)), so an
/// EdgeId is stable for a given edge set regardless of input order. The
/// graph is immutable once built and safe to share between threads.
class DataGraph {
 public:
  DataGraph() = default;

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const WeightedEdge> edges() const noexcept { return edges_; }
  const WeightedEdge& edge(EdgeId e) const { return edges_.at(e); }

  /// Edges touching node i, in increasing EdgeId order. Because of the
  /// canonical edge order this is also increasing neighbor order.
  std::span<const EdgeId> incident_edges(NodeId i) const;

  NodeId other_end(EdgeId e, NodeId i) const {
    const auto& ed = edges_[e];
    return ed.i == i ? ed.j : ed.i;
  }

  /// Weighted degree, precomputed by summing incident weights in EdgeId order.
  double degree(NodeId i) const;

  /// Weight of edge {i,j}, or 0 when the nodes are not adjacent.
  double weight_between(NodeId i, NodeId j) const;

 private:
  friend DataGraph build_graph(std::size_t, std::vector<WeightedEdge>);

  std::size_t node_count_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<EdgeId> incident_;
  std::vector<double> degree_;
};

/// Validates and canonicalizes an edge list. Throws slp::Error with
/// SelfLoop, NonPositiveWeight, DuplicateEdge, NodeOutOfRange or
/// InvalidArgument (node_count == 0).
DataGraph build_graph(std::size_t node_count, std::vector<WeightedEdge> edges);

std::vector<NodeId> neighborhood(const DataGraph& g, NodeId i);
double degree(const DataGraph& g, NodeId i);
double max_degree(const DataGraph& g);

/// Maximal connected node sets, each sorted, ordered by smallest member.
std::vector<std::vector<NodeId>> connected_components(const DataGraph& g);

/// Edge orientation over a DataGraph. The default rule makes the smaller
/// node id the head e+ and the larger one the tail e-.
///
/// Holds a pointer to its base graph, which must outlive it.
class OrientedGraph {
 public:
  explicit OrientedGraph(const DataGraph& base);

  const DataGraph& base() const noexcept { return *base_; }
  std::size_t node_count() const noexcept { return base_->node_count(); }
  std::size_t edge_count() const noexcept { return base_->edge_count(); }

  NodeId head(EdgeId e) const { return head_[e]; }
  NodeId tail(EdgeId e) const { return tail_[e]; }
  double weight(EdgeId e) const { return base_->edges()[e].w; }

  /// Edges with head(e) == i, increasing EdgeId.
  std::span<const EdgeId> out_edges(NodeId i) const;
  /// Edges with tail(e) == i, increasing EdgeId.
  std::span<const EdgeId> in_edges(NodeId i) const;

  /// Same graph with every edge flipped.
  OrientedGraph reversed() const;

 private:
  OrientedGraph(const DataGraph& base, bool flipped);
  void index();

  const DataGraph* base_;
  std::vector<NodeId> head_;
  std::vector<NodeId> tail_;
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<EdgeId> out_, in_;
};

OrientedGraph orient(const DataGraph& g);

struct OrientedNeighborhoods {
  std::vector<NodeId> plus;   // neighbors j reached by edges with e+ = i
  std::vector<NodeId> minus;  // neighbors j reached by edges with e- = i
};

OrientedNeighborhoods oriented_neighborhoods(const OrientedGraph& og, NodeId i);

/// Matrix-free weighted incidence operator D: (Dx)[e] = W_e (x[e+] - x[e-]).
///
/// The transpose is evaluated per node with two accumulators, one over
/// out-edges and one over in-edges, each summed in EdgeId order, then
/// subtracted. Results therefore do not depend on the thread count.
class IncidenceOperator {
 public:
  explicit IncidenceOperator(const OrientedGraph& og) : og_(&og) {}

  const OrientedGraph& graph() const noexcept { return *og_; }

  void apply(std::span<const double> x, std::span<double> out,
             unsigned threads = 1) const;
  void apply_transpose(std::span<const double> y, std::span<double> out,
                       unsigned threads = 1) const;

 private:
  const OrientedGraph* og_;
};

std::vector<double> apply_incidence(const IncidenceOperator& op,
                                    std::span<const double> x);
std::vector<double> apply_incidence_transpose(const IncidenceOperator& op,
                                              std::span<const double> y);

}  // namespace slp

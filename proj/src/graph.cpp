#include "slp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "parallel.hpp"
#include "slp/error.hpp"

namespace slp {

namespace {

void check_node(const DataGraph& g, NodeId i) {
  if (i >= g.node_count()) {
    fail(ErrorCode::NodeOutOfRange,
         "node " + std::to_string(i) + " out of range [0, " +
             std::to_string(g.node_count()) + ")");
  }
}

void check_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": expected length " + std::to_string(want) +
             ", got " + std::to_string(got));
  }
}

}  // namespace

DataGraph build_graph(std::size_t node_count, std::vector<WeightedEdge> edges) {
  if (node_count == 0) {
    fail(ErrorCode::InvalidArgument, "graph needs at least one node");
  }
  for (auto& e : edges) {
    if (e.i >= node_count || e.j >= node_count) {
      fail(ErrorCode::NodeOutOfRange,
           "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
               ") references a node outside [0, " + std::to_string(node_count) +
               ")");
    }
    if (e.i == e.j) {
      fail(ErrorCode::SelfLoop, "self-loop at node " + std::to_string(e.i));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      fail(ErrorCode::NonPositiveWeight,
           "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
               ") has non-positive or non-finite weight " + std::to_string(e.w));
    }
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      fail(ErrorCode::DuplicateEdge, "duplicate edge {" +
                                         std::to_string(edges[k].i) + "," +
                                         std::to_string(edges[k].j) + "}");
    }
  }

  DataGraph g;
  g.node_count_ = node_count;
  g.edges_ = std::move(edges);

  std::vector<std::size_t> counts(node_count, 0);
  for (const auto& e : g.edges_) {
    ++counts[e.i];
    ++counts[e.j];
  }
  g.offsets_.assign(node_count + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), g.offsets_.begin() + 1);
  g.incident_.resize(g.offsets_.back());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (EdgeId e = 0; e < g.edges_.size(); ++e) {
    g.incident_[cursor[g.edges_[e].i]++] = e;
    g.incident_[cursor[g.edges_[e].j]++] = e;
  }
  g.degree_.assign(node_count, 0.0);
  for (NodeId i = 0; i < node_count; ++i) {
    double d = 0.0;
    for (std::size_t k = g.offsets_[i]; k < g.offsets_[i + 1]; ++k) {
      d += g.edges_[g.incident_[k]].w;
    }
    g.degree_[i] = d;
  }
  return g;
}

std::span<const EdgeId> DataGraph::incident_edges(NodeId i) const {
  check_node(*this, i);
  return std::span<const EdgeId>(incident_).subspan(
      offsets_[i], offsets_[i + 1] - offsets_[i]);
}

double DataGraph::degree(NodeId i) const {
  check_node(*this, i);
  return degree_[i];
}

double DataGraph::weight_between(NodeId i, NodeId j) const {
  check_node(*this, i);
  check_node(*this, j);
  for (EdgeId e : incident_edges(i)) {
    if (other_end(e, i) == j) return edges_[e].w;
  }
  return 0.0;
}

std::vector<NodeId> neighborhood(const DataGraph& g, NodeId i) {
  std::vector<NodeId> out;
  for (EdgeId e : g.incident_edges(i)) out.push_back(g.other_end(e, i));
  return out;
}

double degree(const DataGraph& g, NodeId i) { return g.degree(i); }

double max_degree(const DataGraph& g) {
  double best = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) best = std::max(best, g.degree(i));
  return best;
}

std::vector<std::vector<NodeId>> connected_components(const DataGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<NodeId>> out;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (EdgeId e : g.incident_edges(v)) {
        const NodeId u = g.other_end(e, v);
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

// --- OrientedGraph ---------------------------------------------------------

OrientedGraph::OrientedGraph(const DataGraph& base) : OrientedGraph(base, false) {}

OrientedGraph::OrientedGraph(const DataGraph& base, bool flipped) : base_(&base) {
  const auto edges = base.edges();
  head_.resize(edges.size());
  tail_.resize(edges.size());
  for (EdgeId e = 0; e < edges.size(); ++e) {
    head_[e] = flipped ? edges[e].j : edges[e].i;
    tail_[e] = flipped ? edges[e].i : edges[e].j;
  }
  index();
}

void OrientedGraph::index() {
  const std::size_t n = node_count();
  std::vector<std::size_t> oc(n, 0), ic(n, 0);
  for (EdgeId e = 0; e < head_.size(); ++e) {
    ++oc[head_[e]];
    ++ic[tail_[e]];
  }
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  std::partial_sum(oc.begin(), oc.end(), out_offsets_.begin() + 1);
  std::partial_sum(ic.begin(), ic.end(), in_offsets_.begin() + 1);
  out_.resize(head_.size());
  in_.resize(head_.size());
  std::vector<std::size_t> oq(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> iq(in_offsets_.begin(), in_offsets_.end() - 1);
  for (EdgeId e = 0; e < head_.size(); ++e) {
    out_[oq[head_[e]]++] = e;
    in_[iq[tail_[e]]++] = e;
  }
}

std::span<const EdgeId> OrientedGraph::out_edges(NodeId i) const {
  check_node(*base_, i);
  return std::span<const EdgeId>(out_).subspan(out_offsets_[i],
                                               out_offsets_[i + 1] - out_offsets_[i]);
}

std::span<const EdgeId> OrientedGraph::in_edges(NodeId i) const {
  check_node(*base_, i);
  return std::span<const EdgeId>(in_).subspan(in_offsets_[i],
                                              in_offsets_[i + 1] - in_offsets_[i]);
}

OrientedGraph OrientedGraph::reversed() const {
  OrientedGraph r(*base_, false);
  r.head_ = tail_;
  r.tail_ = head_;
  r.index();
  return r;
}

OrientedGraph orient(const DataGraph& g) { return OrientedGraph(g); }

OrientedNeighborhoods oriented_neighborhoods(const OrientedGraph& og, NodeId i) {
  OrientedNeighborhoods nb;
  for (EdgeId e : og.out_edges(i)) nb.plus.push_back(og.tail(e));
  for (EdgeId e : og.in_edges(i)) nb.minus.push_back(og.head(e));
  return nb;
}

// --- IncidenceOperator -----------------------------------------------------

void IncidenceOperator::apply(std::span<const double> x, std::span<double> out,
                              unsigned threads) const {
  check_length(x.size(), og_->node_count(), "apply_incidence input");
  check_length(out.size(), og_->edge_count(), "apply_incidence output");
  const OrientedGraph& og = *og_;
  detail::parallel_for(og.edge_count(), threads, [&](std::size_t b, std::size_t e) {
    for (EdgeId k = b; k < e; ++k) {
      out[k] = og.weight(k) * (x[og.head(k)] - x[og.tail(k)]);
    }
  });
}

void IncidenceOperator::apply_transpose(std::span<const double> y,
                                        std::span<double> out,
                                        unsigned threads) const {
  check_length(y.size(), og_->edge_count(), "apply_incidence_transpose input");
  check_length(out.size(), og_->node_count(), "apply_incidence_transpose output");
  const OrientedGraph& og = *og_;
  detail::parallel_for(og.node_count(), threads, [&](std::size_t b, std::size_t e) {
    for (NodeId i = b; i < e; ++i) {
      double pos = 0.0;
      double neg = 0.0;
      for (EdgeId k : og.out_edges(i)) pos += og.weight(k) * y[k];
      for (EdgeId k : og.in_edges(i)) neg += og.weight(k) * y[k];
      out[i] = pos - neg;
    }
  });
}

std::vector<double> apply_incidence(const IncidenceOperator& op,
                                    std::span<const double> x) {
  std::vector<double> out(op.graph().edge_count());
  op.apply(x, out);
  return out;
}

std::vector<double> apply_incidence_transpose(const IncidenceOperator& op,
                                              std::span<const double> y) {
  std::vector<double> out(op.graph().node_count());
  op.apply_transpose(y, out);
  return out;
}

}  // namespace slp

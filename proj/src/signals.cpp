#include "slp/signals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slp/error.hpp"

namespace slp {

namespace {

void check_partition(const DataGraph& g, const Partition& f) {
  if (f.node_count() != g.node_count()) {
    fail(ErrorCode::PartitionMismatch,
         "partition covers " + std::to_string(f.node_count()) +
             " nodes, graph has " + std::to_string(g.node_count()));
  }
}

}  // namespace

Partition Partition::from_assignment(std::vector<std::size_t> cluster_of) {
  Partition p;
  std::size_t k = 0;
  for (std::size_t c : cluster_of) k = std::max(k, c + 1);
  p.clusters_.resize(k);
  for (NodeId i = 0; i < cluster_of.size(); ++i) p.clusters_[cluster_of[i]].push_back(i);
  for (std::size_t l = 0; l < k; ++l) {
    if (p.clusters_[l].empty()) {
      fail(ErrorCode::InvalidArgument,
           "cluster ids must be contiguous; cluster " + std::to_string(l) + " is empty");
    }
  }
  p.cluster_of_ = std::move(cluster_of);
  return p;
}

SamplingSet SamplingSet::create(std::vector<Sample> samples) {
  if (samples.empty()) fail(ErrorCode::EmptySamplingSet, "sampling set is empty");
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.node < b.node; });
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!std::isfinite(samples[k].label)) {
      fail(ErrorCode::InvalidArgument,
           "non-finite label at node " + std::to_string(samples[k].node));
    }
    if (k > 0 && samples[k].node == samples[k - 1].node) {
      fail(ErrorCode::InvalidArgument,
           "node " + std::to_string(samples[k].node) + " sampled twice");
    }
  }
  SamplingSet s;
  s.samples_ = std::move(samples);
  return s;
}

SamplingSet SamplingSet::from_signal(std::span<const NodeId> nodes,
                                     std::span<const double> truth) {
  std::vector<Sample> samples;
  samples.reserve(nodes.size());
  for (NodeId i : nodes) {
    if (i >= truth.size()) {
      fail(ErrorCode::NodeOutOfRange, "sample node " + std::to_string(i) +
                                          " outside signal of length " +
                                          std::to_string(truth.size()));
    }
    samples.push_back({i, truth[i]});
  }
  return create(std::move(samples));
}

bool SamplingSet::contains(NodeId i) const {
  auto it = std::lower_bound(samples_.begin(), samples_.end(), i,
                             [](const Sample& s, NodeId v) { return s.node < v; });
  return it != samples_.end() && it->node == i;
}

std::vector<NodeId> SamplingSet::nodes() const {
  std::vector<NodeId> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.node);
  return out;
}

void SamplingSet::check_range(std::size_t node_count) const {
  if (!samples_.empty() && samples_.back().node >= node_count) {
    fail(ErrorCode::NodeOutOfRange,
         "sampled node " + std::to_string(samples_.back().node) +
             " out of range [0, " + std::to_string(node_count) + ")");
  }
}

std::vector<char> SamplingSet::mask(std::size_t node_count) const {
  check_range(node_count);
  std::vector<char> m(node_count, 0);
  for (const auto& s : samples_) m[s.node] = 1;
  return m;
}

double tv(const DataGraph& g, std::span<const double> x) {
  if (x.size() != g.node_count()) {
    fail(ErrorCode::DimensionMismatch, "tv: signal length " + std::to_string(x.size()) +
                                           " != node count " +
                                           std::to_string(g.node_count()));
  }
  double sum = 0.0;
  for (const auto& e : g.edges()) sum += e.w * std::abs(x[e.j] - x[e.i]);
  return sum;
}

std::vector<EdgeId> boundary(const DataGraph& g, const Partition& f) {
  check_partition(g, f);
  std::vector<EdgeId> out;
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    if (f.cluster_of(edges[e].i) != f.cluster_of(edges[e].j)) out.push_back(e);
  }
  return out;
}

GraphSignal clustered_signal(const Partition& f, std::span<const double> coeffs) {
  if (coeffs.size() != f.cluster_count()) {
    fail(ErrorCode::CoefficientCountMismatch,
         "expected " + std::to_string(f.cluster_count()) + " coefficients, got " +
             std::to_string(coeffs.size()));
  }
  GraphSignal x(f.node_count());
  for (NodeId i = 0; i < x.size(); ++i) x[i] = coeffs[f.cluster_of(i)];
  return x;
}

ClusteredTvBound tv_clustered_bound(const DataGraph& g, const Partition& f,
                                    std::span<const double> coeffs) {
  const GraphSignal x = clustered_signal(f, coeffs);
  ClusteredTvBound out;
  double amax = 0.0;
  for (double a : coeffs) amax = std::max(amax, std::abs(a));
  double boundary_weight = 0.0;
  for (EdgeId e : boundary(g, f)) {
    const auto& ed = g.edges()[e];
    out.exact_tv += ed.w * std::abs(x[ed.i] - x[ed.j]);
    boundary_weight += ed.w;
  }
  out.bound = 2.0 * amax * boundary_weight;
  return out;
}

double nmse(std::span<const double> x_hat, std::span<const double> x_true) {
  if (x_hat.size() != x_true.size()) {
    fail(ErrorCode::DimensionMismatch, "nmse: lengths " + std::to_string(x_hat.size()) +
                                           " and " + std::to_string(x_true.size()));
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    const double d = x_hat[i] - x_true[i];
    num += d * d;
    den += x_true[i] * x_true[i];
  }
  if (den == 0.0) fail(ErrorCode::ZeroReference, "nmse: reference signal is zero");
  return num / den;
}

}  // namespace slp

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slp/graph.hpp"

namespace slp {

/// Real value per node, indexed by NodeId.
using GraphSignal = std::vector<double>;
/// Real value per edge, indexed by canonical EdgeId.
using EdgeSignal = std::vector<double>;

/// Disjoint cover of the nodes by nonempty clusters 0..K-1.
class Partition {
 public:
  Partition() = default;

  /// Throws InvalidArgument if cluster ids are not exactly {0..K-1}.
  static Partition from_assignment(std::vector<std::size_t> cluster_of);

  std::size_t node_count() const noexcept { return cluster_of_.size(); }
  std::size_t cluster_count() const noexcept { return clusters_.size(); }
  std::size_t cluster_of(NodeId i) const { return cluster_of_.at(i); }
  std::span<const std::size_t> assignment() const noexcept { return cluster_of_; }
  std::span<const NodeId> cluster(std::size_t l) const { return clusters_.at(l); }

 private:
  std::vector<std::size_t> cluster_of_;
  std::vector<std::vector<NodeId>> clusters_;
};

/// Labeled nodes, kept sorted by node id.
class SamplingSet {
 public:
  struct Sample {
    NodeId node = 0;
    double label = 0.0;
  };

  SamplingSet() = default;

  /// Throws EmptySamplingSet, InvalidArgument (duplicate node) or
  /// InvalidArgument (non-finite label).
  static SamplingSet create(std::vector<Sample> samples);

  /// Samples `truth` at the given nodes.
  static SamplingSet from_signal(std::span<const NodeId> nodes,
                                 std::span<const double> truth);

  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  std::span<const Sample> samples() const noexcept { return samples_; }
  bool contains(NodeId i) const;
  std::vector<NodeId> nodes() const;

  /// Throws NodeOutOfRange if any sample lies outside [0, node_count).
  void check_range(std::size_t node_count) const;

  /// mask[i] != 0 iff i is sampled.
  std::vector<char> mask(std::size_t node_count) const;

 private:
  std::vector<Sample> samples_;
};

/// Weighted total variation sum_{ {i,j} } W_ij |x[j] - x[i]|.
double tv(const DataGraph& g, std::span<const double> x);

/// Edges whose endpoints lie in different clusters, increasing EdgeId.
std::vector<EdgeId> boundary(const DataGraph& g, const Partition& f);

/// x[i] = coeffs[cluster_of(i)].
GraphSignal clustered_signal(const Partition& f, std::span<const double> coeffs);

struct ClusteredTvBound {
  double exact_tv = 0.0;  // sum over the boundary of W_ij |a_c(i) - a_c(j)|
  double bound = 0.0;     // 2 max_l |a_l| * sum over the boundary of W_ij
};

ClusteredTvBound tv_clustered_bound(const DataGraph& g, const Partition& f,
                                    std::span<const double> coeffs);

/// ||x_hat - x_true||^2 / ||x_true||^2. Throws ZeroReference if x_true = 0.
double nmse(std::span<const double> x_hat, std::span<const double> x_true);

}  // namespace slp

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "slp/graph.hpp"
#include "slp/signals.hpp"

namespace slp {

/// Samples the last node of cluster 2l and the first node of cluster 2l+1,
/// so that every other boundary edge has both endpoints sampled.
struct BoundaryAdjacent {};
/// Samples the middle node of every cluster.
struct ClusterCenter {};
/// Samples one uniformly chosen node per cluster.
struct RandomPlacement {
  std::uint64_t seed = 0;
};

using Placement = std::variant<BoundaryAdjacent, ClusterCenter, RandomPlacement>;

struct ChainSpec {
  std::size_t n = 10;
  std::size_t cluster_size = 5;
  double w_intra = 2.0;
  double w_inter = 1.0;
  double coeff_low = 1.0;
  double coeff_high = 5.0;
  Placement placement = BoundaryAdjacent{};

  /// Throws InvalidSpec.
  void validate() const;
};

struct ChainInstance {
  DataGraph graph;
  Partition partition;
  GraphSignal truth;
  SamplingSet samples;
};

/// Path graph 0 - 1 - ... - (n-1) cut into consecutive clusters of
/// `cluster_size` nodes; cluster l carries coeff_low for even l and
/// coeff_high for odd l. One sample per cluster.
ChainInstance chain_instance(const ChainSpec& spec);

struct PlantedPartitionSpec {
  std::size_t n = 30;
  std::size_t clusters = 4;
  double p_in = 1.0;
  double p_out = 0.17;
  double w_lo = 1.0;
  double w_hi = 2.0;
  std::uint64_t seed = 0;
  std::size_t max_retries = 1000;

  /// Throws InvalidSpec.
  void validate() const;
};

struct PlantedInstance {
  DataGraph graph;
  Partition partition;
  GraphSignal truth;  // cluster index + 1
  std::size_t attempts = 1;

  /// `count` distinct nodes drawn uniformly, labeled from the truth.
  /// Throws InvalidArgument when count is 0 or exceeds the node count.
  SamplingSet draw_samples(std::size_t count, std::uint64_t seed) const;
};

/// Balanced clusters (sizes differ by at most one, node ids contiguous),
/// independent Bernoulli edges, uniform weights. Redraws until connected.
/// Throws ConnectivityRetryExhausted.
PlantedInstance planted_partition_instance(const PlantedPartitionSpec& spec);

enum class Region : std::uint8_t { R1, R2, R3 };

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ImageGridSpec {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rgb> pixels;     // row-major
  std::vector<Region> trimap;  // row-major; R1 foreground seeds, R3 background seeds
};

struct GridGraph {
  DataGraph graph;
  SamplingSet samples;  // +1 on R1, -1 on R3
  double sigma = 0.0;
};

/// Smallest weight a grid edge may take; keeps very dissimilar neighbors
/// connected when the exponential underflows.
inline constexpr double kMinGridWeight = 1e-300;

/// 4-neighbor grid, pixel (r, c) -> node r * width + c. Weights
/// exp(-||v_i - v_j||^2 / sigma) with sigma the median edge color distance,
/// all 1 when sigma is 0. Throws DegenerateImage, EmptyRegion,
/// DimensionMismatch.
GridGraph image_grid_graph(const ImageGridSpec& spec);

/// true = foreground. R2 pixels are foreground iff labels > 0; R1 and R3
/// keep their seed region. Throws DimensionMismatch.
std::vector<bool> segment(std::span<const double> labels, std::span<const Region> trimap);

struct SyntheticImage {
  ImageGridSpec spec;
  std::vector<bool> foreground;
};

/// Two-tone test image: a centered disc on a flat background, both tones
/// jittered by small integer noise. The trimap marks a band of `band`
/// pixels on each side of the disc edge as R2.
SyntheticImage synthetic_two_tone(std::size_t width, std::size_t height, std::size_t band,
                                  std::uint64_t seed);

struct ClusteredInstance {
  DataGraph graph;
  Partition partition;
  GraphSignal truth;
  std::vector<NodeId> sample_nodes;
};

/// Random clustered graph whose sample set resolves the partition in the
/// node-wise aggregate sense: 2 to 4 clusters of 3 to 8 nodes with
/// connected intra-cluster edges, light boundary edges, and for every
/// boundary endpoint a sampled neighbor joined by a heavy edge.
ClusteredInstance resolved_random_instance(std::uint64_t seed);

/// Two 4-cliques of weight 2 joined by a single edge {3, 4} of weight 1,
/// sampled at 0 and 7. Truth 0 on the first clique, 1 on the second.
ClusteredInstance two_clique_instance();

}  // namespace slp

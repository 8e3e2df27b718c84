#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slp/graph.hpp"
#include "slp/signals.hpp"

namespace slp {

/// How one endpoint of a boundary edge is covered.
struct SideWitness {
  NodeId endpoint = 0;
  /// Sampled neighbor m with W(m, endpoint) >= 2 W(boundary edge).
  std::optional<NodeId> witness;
  /// The endpoint is itself sampled.
  bool self_witness = false;

  bool covered() const noexcept { return self_witness || witness.has_value(); }
};

struct BoundaryWitness {
  EdgeId edge = 0;
  double weight = 0.0;
  SideWitness side_i;
  SideWitness side_j;

  bool covered() const noexcept { return side_i.covered() && side_j.covered(); }
};

struct ResolveReport {
  /// Every boundary edge has a witness on both sides.
  bool resolved = false;
  /// One record per boundary edge, in EdgeId order.
  std::vector<BoundaryWitness> boundary;
  /// Boundary edges lacking a witness on at least one side.
  std::vector<EdgeId> violations;
  /// Stronger, node-wise form: every unsampled boundary endpoint i has
  ///   sum over sampled m ~ i via non-boundary edges of W_mi
  ///     >= 2 * sum over boundary edges at i of W.
  /// This is what makes the boundary satisfy the nullspace property when
  /// several boundary edges share an endpoint.
  bool aggregate_resolved = false;
};

/// Checks whether the sampling set resolves the partition: for each boundary
/// edge {i,j}, sampled m, n with W_mi >= 2 W_ij and W_nj >= 2 W_ij. A sampled
/// endpoint counts as its own witness (reported as self_witness).
/// Throws PartitionMismatch.
ResolveReport resolves(const DataGraph& g, const Partition& f, const SamplingSet& m);

/// u[i] == 0 for every sampled i. Throws DimensionMismatch if a sampled
/// node lies outside u.
bool kernel_contains(const SamplingSet& m, std::span<const double> u);

/// ||(Du) off S||_1 / ||(Du) on S||_1, +infinity when the denominator is 0.
double nnsp_ratio(const DataGraph& g, std::span<const EdgeId> edge_set,
                  std::span<const double> u);

struct NnspBudget {
  std::size_t restarts = 100;
  std::size_t steps = 200;
  std::uint64_t seed = 0;
};

struct NnspEstimate {
  std::vector<EdgeId> edge_set;
  double best_ratio = 0.0;
  GraphSignal witness;
  std::size_t best_restart = 0;
  /// best_ratio < 2 (with a 1e-9 relative guard against rounding).
  bool certified_violation = false;
};

/// Multi-start projected subgradient search for the smallest ratio over
/// kernel signals of the sampling set, each restart finished by a level-set
/// sweep of its iterate. A ratio below 2 certifies that the nullspace
/// property fails for `edge_set`; a ratio of 2 or more is evidence only.
/// Throws DegenerateEdgeSet when no kernel signal has (Du) on S nonzero,
/// and InvalidArgument for out-of-range or repeated edge ids.
NnspEstimate nnsp_ratio_estimate(const DataGraph& g, const SamplingSet& m,
                                 std::span<const EdgeId> edge_set,
                                 const NnspBudget& budget = {});

struct RecoveryCheck {
  bool recovered = false;
  double max_abs_error = 0.0;
  GraphSignal labels;
};

/// Builds the clustered truth, samples it at `sample_nodes`, runs the SLP
/// solver for `iterations` and compares. Throws NotResolved when the
/// sampling does not resolve the partition.
RecoveryCheck verify_exact_recovery(const DataGraph& g, const Partition& f,
                                    std::span<const double> coeffs,
                                    std::span<const NodeId> sample_nodes,
                                    std::size_t iterations, double tol);

struct ClusteredFit {
  /// min over a of ||x - sum_l a_l 1_{C_l}||_TV
  double value = 0.0;
  std::vector<double> coeffs;
};

/// Minimizes the residual TV over per-cluster offsets by coordinate descent
/// with exact weighted-median line searches, alternating single-cluster
/// moves with moves of clusters fused by tight boundary edges. Multi-start.
ClusteredFit min_clustered_residual_tv(const DataGraph& g, const Partition& f,
                                       std::span<const double> x,
                                       std::size_t restarts = 8, std::uint64_t seed = 0);

struct ApproxBoundCheck {
  double lhs = 0.0;  // ||D(x_hat - x_true)||_1
  double rhs = 0.0;  // 6 * min_a ||x_true - sum_l a_l 1_{C_l}||_TV
  bool holds = false;
  ClusteredFit fit;
  GraphSignal labels;
};

/// lhs <= rhs * (1 + slack) after `iterations` solver steps on samples of
/// x_true. Throws NotResolved.
ApproxBoundCheck verify_approx_bound(const DataGraph& g, const Partition& f,
                                     std::span<const NodeId> sample_nodes,
                                     std::span<const double> x_true,
                                     std::size_t iterations, double slack = 0.05);

}  // namespace slp

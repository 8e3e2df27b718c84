#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "slp/graph.hpp"
#include "slp/signals.hpp"

namespace slp {

struct FixedIterations {};

/// Stop once |tv(k - window) - tv(k)| <= tol * tv(k - window).
struct ObjectiveDecrease {
  double tol = 1e-6;
  std::size_t window = 10;
};

using StoppingRule = std::variant<FixedIterations, ObjectiveDecrease>;

struct SolverConfig {
  std::size_t max_iterations = 200;
  std::size_t history_stride = 1;
  StoppingRule stopping = FixedIterations{};
  /// Forces a single thread. Outputs are bit-identical across thread
  /// counts anyway; the flag pins the traversal order explicitly.
  bool deterministic = true;
  unsigned threads = 1;
  /// Allow graphs with several components. Each component must hold at
  /// least one sample; the iteration then decouples per component.
  bool split_components = false;

  /// Throws InvalidArgument on zero iterations/stride or a bad rule.
  void validate() const;
};

/// Diagonal step sizes gamma_i = 1/d_i (nodes) and lambda_e = 1/(2 W_e) (edges).
struct Preconditioners {
  std::vector<double> gamma;
  std::vector<double> lambda;
};

/// Throws IsolatedNode if some node has zero degree.
Preconditioners preconditioners(const DataGraph& g);

struct PowerIterationOptions {
  std::size_t min_iterations = 100;
  std::size_t max_iterations = 20000;
  double rel_tol = 1e-10;
};

struct ConvergenceCheck {
  double norm_estimate = 0.0;  // estimate of ||Gamma^1/2 D^T Lambda^1/2||_2
  bool satisfied = false;      // the norm is strictly below 1
  /// Some component with an edge is 2-colorable. The squared norm is half the
  /// largest normalized-Laplacian eigenvalue, which is 2 exactly then.
  bool bipartite_component = false;
  std::size_t iterations = 0;
};

/// Matrix-free power iteration on Lambda^1/2 D Gamma D^T Lambda^1/2.
/// The Rayleigh quotient approaches the squared norm from below and can
/// stall just under 1 on bipartite graphs, so those are detected by
/// 2-coloring and reported with norm_estimate = 1.
ConvergenceCheck check_convergence_condition(const DataGraph& g,
                                             const PowerIterationOptions& opts = {});

struct SlpState {
  GraphSignal x_hat;
  EdgeSignal y_hat;
  GraphSignal x_prev;
  std::size_t k = 0;
};

struct HistoryEntry {
  std::size_t k = 0;
  double tv = 0.0;
  std::optional<double> nmse;
  double max_abs_dual = 0.0;
};

struct SolveReport {
  GraphSignal labels;
  EdgeSignal dual;  // empty for label propagation
  std::size_t iterations_run = 0;
  std::vector<HistoryEntry> history;
};

using IterationObserver = std::function<void(const SlpState&)>;

/// One primal-dual step per call, in matrix form:
///   x <- x - Gamma D^T y;  x[M] <- labels;  x~ <- 2x - x_prev;
///   y <- y + Lambda D x~;  y[e] <- y[e] / max(1, |y[e]|).
class SlpIteration {
 public:
  SlpIteration(const OrientedGraph& og, const SamplingSet& m, unsigned threads = 1);

  const SlpState& state() const noexcept { return state_; }
  /// Restart from (x, y). Sampled coordinates of x are overwritten.
  void reset(GraphSignal x, EdgeSignal y);
  void step();

 private:
  const OrientedGraph* og_;
  IncidenceOperator op_;
  const SamplingSet* samples_;
  std::vector<double> gamma_, lambda_;
  unsigned threads_;
  SlpState state_;
  GraphSignal x_tilde_, node_buf_;
  EdgeSignal edge_buf_;
};

/// Optional hooks reporting every read a local update performs.
struct AccessTrace {
  std::function<void(NodeId node, EdgeId edge)> node_reads_edge;
  std::function<void(EdgeId edge, NodeId node)> edge_reads_node;
};

/// The same step written as local node and edge updates over the oriented
/// neighborhoods. Performs the identical floating-point operations in the
/// identical order as SlpIteration.
class MessagePassingIteration {
 public:
  MessagePassingIteration(const OrientedGraph& og, const SamplingSet& m,
                          unsigned threads = 1, const AccessTrace* trace = nullptr);

  const SlpState& state() const noexcept { return state_; }
  void reset(GraphSignal x, EdgeSignal y);
  void step();

 private:
  void update_node(NodeId i);
  void update_edge(EdgeId e);

  const OrientedGraph* og_;
  const SamplingSet* samples_;
  std::vector<double> gamma_, lambda_;
  std::vector<char> sampled_;
  std::vector<double> sample_label_;
  unsigned threads_;
  const AccessTrace* trace_;
  SlpState state_;
  GraphSignal x_tilde_;
};

/// Runs the primal-dual iteration from x = labels on M (0 elsewhere), y = 0.
/// `truth`, when nonempty, adds NMSE to the history. Throws
/// DisconnectedGraph, EmptySamplingSet, IsolatedNode, NonFiniteIterate.
SolveReport slp_solve(const DataGraph& g, const SamplingSet& m, const SolverConfig& cfg,
                      std::span<const double> truth = {},
                      const IterationObserver& observer = {});

/// As above on an explicit orientation.
SolveReport slp_solve(const OrientedGraph& og, const SamplingSet& m,
                      const SolverConfig& cfg, std::span<const double> truth = {},
                      const IterationObserver& observer = {});

SolveReport slp_solve_message_passing(const DataGraph& g, const SamplingSet& m,
                                      const SolverConfig& cfg,
                                      std::span<const double> truth = {},
                                      const IterationObserver& observer = {});

/// (k, tv(x^(k)) - tv_star) for every history entry with k >= 1.
std::vector<std::pair<std::size_t, double>> suboptimality_trace(const SolveReport& report,
                                                                double tv_star);

struct InverseKEnvelope {
  double c1 = 0.0;          // max over the first fit points of k * subopt(k)
  double worst_ratio = 0.0; // max over later points of k * subopt(k) / c1
  bool holds = false;       // worst_ratio <= 1 + slack
};

/// Fits c1 on the first `fit_points` trace entries and checks that every
/// later entry satisfies subopt(k) <= (1 + slack) c1 / k.
InverseKEnvelope fit_inverse_k_envelope(
    std::span<const std::pair<std::size_t, double>> trace, std::size_t fit_points = 10,
    double slack = 0.1);

}  // namespace slp

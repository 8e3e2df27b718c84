#pragma once

#include <cstddef>
#include <span>

#include "slp/graph.hpp"
#include "slp/signals.hpp"
#include "slp/solver.hpp"

namespace slp {

struct LpConfig {
  std::size_t max_iterations = 200;
  /// Sweeps stop once the sup-norm change of one sweep is <= tol.
  double tol = 1e-9;
  std::size_t history_stride = 1;
  bool split_components = false;

  void validate() const;
};

/// Ordinary label propagation: minimizes sum W_ij (x_i - x_j)^2 with x
/// clamped on the sampling set, by synchronous Jacobi sweeps
///   x_i <- (sum_j W_ij x_j) / d_i   for unlabeled i,
/// starting from 0 on unlabeled nodes. The report's dual is empty.
SolveReport lp_solve(const DataGraph& g, const SamplingSet& m, const LpConfig& cfg,
                     std::span<const double> truth = {});

/// max over unlabeled i of |x_i - (sum_j W_ij x_j) / d_i|.
double harmonic_residual(const DataGraph& g, const SamplingSet& m,
                         std::span<const double> x);

}  // namespace slp

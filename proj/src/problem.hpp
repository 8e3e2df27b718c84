#pragma once

#include <span>

#include "slp/graph.hpp"
#include "slp/signals.hpp"

namespace slp::detail {

// Shared precondition checks for the iterative solvers: nonempty in-range
// sampling set, matching truth length, connectivity (or one sample per
// component when splitting), and no unsampled isolated node.
void validate_problem(const DataGraph& g, const SamplingSet& m, bool split_components,
                      std::span<const double> truth);

}  // namespace slp::detail

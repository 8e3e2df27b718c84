#include "slp/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "problem.hpp"
#include "slp/error.hpp"

namespace slp {

void LpConfig::validate() const {
  if (max_iterations == 0) fail(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be > 0");
  if (history_stride == 0) fail(ErrorCode::InvalidArgument, "history_stride must be >= 1");
}

namespace {

double neighbor_average(const DataGraph& g, NodeId i, std::span<const double> x) {
  double s = 0.0;
  for (EdgeId e : g.incident_edges(i)) s += g.edges()[e].w * x[g.other_end(e, i)];
  return s / g.degree(i);
}

}  // namespace

SolveReport lp_solve(const DataGraph& g, const SamplingSet& m, const LpConfig& cfg,
                     std::span<const double> truth) {
  cfg.validate();
  detail::validate_problem(g, m, cfg.split_components, truth);
  const std::size_t n = g.node_count();
  const std::vector<char> sampled = m.mask(n);

  GraphSignal x(n, 0.0);
  for (const auto& s : m.samples()) x[s.node] = s.label;
  GraphSignal next = x;

  SolveReport report;
  auto record = [&](std::size_t k) {
    HistoryEntry h;
    h.k = k;
    h.tv = tv(g, x);
    if (!truth.empty()) h.nmse = nmse(x, truth);
    report.history.push_back(h);
  };
  record(0);

  std::size_t k = 0;
  while (k < cfg.max_iterations) {
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      if (sampled[i]) continue;
      next[i] = neighbor_average(g, i, x);
      change = std::max(change, std::abs(next[i] - x[i]));
    }
    x.swap(next);
    ++k;
    if (k % cfg.history_stride == 0) record(k);
    if (change <= cfg.tol) break;
  }
  if (report.history.back().k != k) record(k);
  report.labels = std::move(x);
  report.iterations_run = k;
  return report;
}

double harmonic_residual(const DataGraph& g, const SamplingSet& m,
                         std::span<const double> x) {
  if (x.size() != g.node_count()) {
    fail(ErrorCode::DimensionMismatch, "harmonic_residual: signal length mismatch");
  }
  const std::vector<char> sampled = m.mask(g.node_count());
  double worst = 0.0;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (sampled[i] || g.degree(i) == 0.0) continue;
    worst = std::max(worst, std::abs(x[i] - neighbor_average(g, i, x)));
  }
  return worst;
}

}  // namespace slp

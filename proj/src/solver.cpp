#include "slp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "problem.hpp"
#include "slp/error.hpp"

namespace slp {

void SolverConfig::validate() const {
  if (max_iterations == 0) fail(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  if (history_stride == 0) fail(ErrorCode::InvalidArgument, "history_stride must be >= 1");
  if (const auto* rule = std::get_if<ObjectiveDecrease>(&stopping)) {
    if (!(rule->tol > 0.0)) fail(ErrorCode::InvalidArgument, "stopping tol must be > 0");
    if (rule->window == 0) fail(ErrorCode::InvalidArgument, "stopping window must be >= 1");
  }
}

Preconditioners preconditioners(const DataGraph& g) {
  Preconditioners p;
  p.gamma.resize(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const double d = g.degree(i);
    if (!(d > 0.0)) fail(ErrorCode::IsolatedNode, "node " + std::to_string(i) + " is isolated");
    p.gamma[i] = 1.0 / d;
  }
  p.lambda.reserve(g.edge_count());
  for (const auto& e : g.edges()) p.lambda.push_back(1.0 / (2.0 * e.w));
  return p;
}

namespace {

bool has_bipartite_component(const DataGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<signed char> color(n, -1);
  std::vector<NodeId> stack;
  for (NodeId root = 0; root < n; ++root) {
    if (color[root] >= 0 || g.incident_edges(root).empty()) continue;
    bool two_colorable = true;
    color[root] = 0;
    stack.assign(1, root);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (EdgeId e : g.incident_edges(v)) {
        const NodeId u = g.other_end(e, v);
        if (color[u] < 0) {
          color[u] = static_cast<signed char>(1 - color[v]);
          stack.push_back(u);
        } else if (color[u] == color[v]) {
          two_colorable = false;
        }
      }
    }
    if (two_colorable) return true;
  }
  return false;
}

}  // namespace

ConvergenceCheck check_convergence_condition(const DataGraph& g,
                                             const PowerIterationOptions& opts) {
  const Preconditioners p = preconditioners(g);
  ConvergenceCheck out;
  const std::size_t m = g.edge_count();
  if (m == 0) {
    out.satisfied = true;
    return out;
  }
  const OrientedGraph og(g);
  const IncidenceOperator op(og);
  std::vector<double> sqrt_gamma(p.gamma.size()), sqrt_lambda(m);
  for (std::size_t i = 0; i < p.gamma.size(); ++i) sqrt_gamma[i] = std::sqrt(p.gamma[i]);
  for (std::size_t e = 0; e < m; ++e) sqrt_lambda[e] = std::sqrt(p.lambda[e]);

  // Fixed, non-degenerate start vector.
  std::vector<double> v(m), scaled(m), w(g.node_count());
  for (std::size_t e = 0; e < m; ++e) v[e] = 1.0 + 0.5 * std::sin(1.0 + 7.0 * double(e));
  auto normalize = [](std::vector<double>& a) {
    double s = 0.0;
    for (double t : a) s += t * t;
    s = std::sqrt(s);
    for (double& t : a) t /= s;
    return s;
  };
  normalize(v);

  double prev = 0.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    // w = Gamma^1/2 D^T Lambda^1/2 v; ||w||^2 is the Rayleigh quotient.
    for (std::size_t e = 0; e < m; ++e) scaled[e] = sqrt_lambda[e] * v[e];
    op.apply_transpose(scaled, w);
    double q = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] *= sqrt_gamma[i];
      q += w[i] * w[i];
    }
    const double est = std::sqrt(q);
    out.norm_estimate = est;
    out.iterations = it;
    if (it >= opts.min_iterations && std::abs(est - prev) <= opts.rel_tol * est) break;
    prev = est;
    // v = Lambda^1/2 D Gamma^1/2 w
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= sqrt_gamma[i];
    op.apply(w, v);
    for (std::size_t e = 0; e < m; ++e) v[e] *= sqrt_lambda[e];
    if (normalize(v) == 0.0) break;
  }
  out.bipartite_component = has_bipartite_component(g);
  if (out.bipartite_component) out.norm_estimate = 1.0;
  out.satisfied = !out.bipartite_component && out.norm_estimate < 1.0;
  return out;
}

namespace {

// Step sizes for a validated problem. Zero-degree nodes are sampled (checked
// by validate_problem), so their gamma never matters; it is set to 0.
void step_sizes(const DataGraph& g, std::vector<double>& gamma, std::vector<double>& lambda) {
  gamma.resize(g.node_count());
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const double d = g.degree(i);
    gamma[i] = d > 0.0 ? 1.0 / d : 0.0;
  }
  lambda.clear();
  lambda.reserve(g.edge_count());
  for (const auto& e : g.edges()) lambda.push_back(1.0 / (2.0 * e.w));
}

void initial_state(SlpState& s, const SamplingSet& m, std::size_t n, std::size_t edges) {
  s.x_hat.assign(n, 0.0);
  for (const auto& smp : m.samples()) s.x_hat[smp.node] = smp.label;
  s.x_prev = s.x_hat;
  s.y_hat.assign(edges, 0.0);
  s.k = 0;
}

void check_reset(const OrientedGraph& og, const GraphSignal& x, const EdgeSignal& y) {
  if (x.size() != og.node_count() || y.size() != og.edge_count()) {
    fail(ErrorCode::DimensionMismatch, "reset: state does not match graph dimensions");
  }
}

}  // namespace

// --- SlpIteration ----------------------------------------------------------

SlpIteration::SlpIteration(const OrientedGraph& og, const SamplingSet& m, unsigned threads)
    : og_(&og), op_(og), samples_(&m), threads_(threads) {
  m.check_range(og.node_count());
  step_sizes(og.base(), gamma_, lambda_);
  initial_state(state_, m, og.node_count(), og.edge_count());
  x_tilde_.resize(og.node_count());
  node_buf_.resize(og.node_count());
  edge_buf_.resize(og.edge_count());
}

void SlpIteration::reset(GraphSignal x, EdgeSignal y) {
  check_reset(*og_, x, y);
  for (const auto& smp : samples_->samples()) x[smp.node] = smp.label;
  state_.x_hat = std::move(x);
  state_.x_prev = state_.x_hat;
  state_.y_hat = std::move(y);
  state_.k = 0;
}

void SlpIteration::step() {
  SlpState& s = state_;
  std::swap(s.x_prev, s.x_hat);
  const std::size_t n = og_->node_count();
  const std::size_t m = og_->edge_count();

  op_.apply_transpose(s.y_hat, node_buf_, threads_);
  detail::parallel_for(n, threads_, [&](std::size_t b, std::size_t e) {
    for (NodeId i = b; i < e; ++i) s.x_hat[i] = s.x_prev[i] - gamma_[i] * node_buf_[i];
  });
  for (const auto& smp : samples_->samples()) s.x_hat[smp.node] = smp.label;
  detail::parallel_for(n, threads_, [&](std::size_t b, std::size_t e) {
    for (NodeId i = b; i < e; ++i) x_tilde_[i] = 2.0 * s.x_hat[i] - s.x_prev[i];
  });

  op_.apply(x_tilde_, edge_buf_, threads_);
  detail::parallel_for(m, threads_, [&](std::size_t b, std::size_t e) {
    for (EdgeId k = b; k < e; ++k) {
      const double y = s.y_hat[k] + lambda_[k] * edge_buf_[k];
      s.y_hat[k] = y / std::max(1.0, std::abs(y));
    }
  });
  ++s.k;
}

// --- MessagePassingIteration -----------------------------------------------

MessagePassingIteration::MessagePassingIteration(const OrientedGraph& og,
                                                 const SamplingSet& m, unsigned threads,
                                                 const AccessTrace* trace)
    : og_(&og), samples_(&m), threads_(trace ? 1 : threads), trace_(trace) {
  step_sizes(og.base(), gamma_, lambda_);
  sampled_ = m.mask(og.node_count());
  sample_label_.assign(og.node_count(), 0.0);
  for (const auto& smp : m.samples()) sample_label_[smp.node] = smp.label;
  initial_state(state_, m, og.node_count(), og.edge_count());
  x_tilde_.resize(og.node_count());
}

void MessagePassingIteration::reset(GraphSignal x, EdgeSignal y) {
  check_reset(*og_, x, y);
  for (const auto& smp : samples_->samples()) x[smp.node] = smp.label;
  state_.x_hat = std::move(x);
  state_.x_prev = state_.x_hat;
  state_.y_hat = std::move(y);
  state_.k = 0;
}

void MessagePassingIteration::update_node(NodeId i) {
  // Messages from edges oriented away from i and towards i.
  double pos = 0.0;
  double neg = 0.0;
  for (EdgeId e : og_->out_edges(i)) {
    if (trace_ && trace_->node_reads_edge) trace_->node_reads_edge(i, e);
    pos += og_->weight(e) * state_.y_hat[e];
  }
  for (EdgeId e : og_->in_edges(i)) {
    if (trace_ && trace_->node_reads_edge) trace_->node_reads_edge(i, e);
    neg += og_->weight(e) * state_.y_hat[e];
  }
  double x = state_.x_prev[i] - gamma_[i] * (pos - neg);
  if (sampled_[i]) x = sample_label_[i];
  state_.x_hat[i] = x;
  x_tilde_[i] = 2.0 * x - state_.x_prev[i];
}

void MessagePassingIteration::update_edge(EdgeId e) {
  const NodeId h = og_->head(e);
  const NodeId t = og_->tail(e);
  if (trace_ && trace_->edge_reads_node) {
    trace_->edge_reads_node(e, h);
    trace_->edge_reads_node(e, t);
  }
  const double d = og_->weight(e) * (x_tilde_[h] - x_tilde_[t]);
  const double y = state_.y_hat[e] + lambda_[e] * d;
  state_.y_hat[e] = y / std::max(1.0, std::abs(y));
}

void MessagePassingIteration::step() {
  std::swap(state_.x_prev, state_.x_hat);
  detail::parallel_for(og_->node_count(), threads_, [&](std::size_t b, std::size_t e) {
    for (NodeId i = b; i < e; ++i) update_node(i);
  });
  detail::parallel_for(og_->edge_count(), threads_, [&](std::size_t b, std::size_t e) {
    for (EdgeId k = b; k < e; ++k) update_edge(k);
  });
  ++state_.k;
}

// --- drivers ---------------------------------------------------------------

namespace detail {

void validate_problem(const DataGraph& g, const SamplingSet& m, bool split_components,
                      std::span<const double> truth) {
  if (m.empty()) fail(ErrorCode::EmptySamplingSet, "sampling set is empty");
  m.check_range(g.node_count());
  if (!truth.empty() && truth.size() != g.node_count()) {
    fail(ErrorCode::DimensionMismatch, "truth length " + std::to_string(truth.size()) +
                                           " != node count " +
                                           std::to_string(g.node_count()));
  }
  const auto comps = connected_components(g);
  if (comps.size() > 1 && !split_components) {
    std::ostringstream os;
    os << "graph has " << comps.size() << " connected components (";
    for (std::size_t c = 0; c < comps.size() && c < 8; ++c) {
      os << (c ? ", " : "") << "{node " << comps[c].front() << ", size "
         << comps[c].size() << "}";
    }
    if (comps.size() > 8) os << ", ...";
    os << "); split the graph or enable per-component solving";
    fail(ErrorCode::DisconnectedGraph, os.str());
  }
  for (const auto& comp : comps) {
    const bool has_sample = std::any_of(comp.begin(), comp.end(),
                                        [&](NodeId i) { return m.contains(i); });
    if (!has_sample) {
      if (comp.size() == 1) {
        fail(ErrorCode::IsolatedNode,
             "node " + std::to_string(comp.front()) + " is isolated and unsampled");
      }
      fail(ErrorCode::EmptySamplingSet, "component containing node " +
                                            std::to_string(comp.front()) +
                                            " has no sampled node");
    }
  }
}

}  // namespace detail


namespace {

double max_abs(const std::vector<double>& v) {
  double best = 0.0;
  for (double t : v) best = std::max(best, std::abs(t));
  return best;
}

void check_finite(const SlpState& s) {
  for (NodeId i = 0; i < s.x_hat.size(); ++i) {
    if (!std::isfinite(s.x_hat[i])) {
      fail(ErrorCode::NonFiniteIterate, "non-finite primal value at node " +
                                            std::to_string(i) + " in iteration " +
                                            std::to_string(s.k));
    }
  }
  for (EdgeId e = 0; e < s.y_hat.size(); ++e) {
    if (!std::isfinite(s.y_hat[e])) {
      fail(ErrorCode::NonFiniteIterate, "non-finite dual value at edge " +
                                            std::to_string(e) + " in iteration " +
                                            std::to_string(s.k));
    }
  }
}

template <typename Iteration>
SolveReport drive(Iteration& it, const DataGraph& g, const SolverConfig& cfg,
                  std::span<const double> truth, const IterationObserver& observer) {
  SolveReport report;
  auto record = [&](const SlpState& s, double tv_value) {
    HistoryEntry h;
    h.k = s.k;
    h.tv = tv_value;
    if (!truth.empty()) h.nmse = nmse(s.x_hat, truth);
    h.max_abs_dual = max_abs(s.y_hat);
    report.history.push_back(h);
  };

  const auto* decrease = std::get_if<ObjectiveDecrease>(&cfg.stopping);
  std::deque<double> window;
  const double tv0 = tv(g, it.state().x_hat);
  record(it.state(), tv0);
  if (decrease) window.push_back(tv0);

  for (std::size_t k = 1; k <= cfg.max_iterations; ++k) {
    it.step();
    const SlpState& s = it.state();
    check_finite(s);
    if (observer) observer(s);
    const bool on_stride = k % cfg.history_stride == 0;
    double tv_k = 0.0;
    if (on_stride || decrease) tv_k = tv(g, s.x_hat);
    if (on_stride) record(s, tv_k);
    if (decrease) {
      window.push_back(tv_k);
      if (window.size() > decrease->window + 1) window.pop_front();
      if (window.size() == decrease->window + 1) {
        const double ref = window.front();
        if (std::abs(ref - tv_k) <= decrease->tol * ref) break;
      }
    }
  }
  const SlpState& s = it.state();
  if (report.history.back().k != s.k) record(s, tv(g, s.x_hat));
  report.labels = s.x_hat;
  report.dual = s.y_hat;
  report.iterations_run = s.k;
  return report;
}

unsigned effective_threads(const SolverConfig& cfg) {
  return cfg.deterministic ? 1u : std::max(1u, cfg.threads);
}

}  // namespace

SolveReport slp_solve(const OrientedGraph& og, const SamplingSet& m, const SolverConfig& cfg,
                      std::span<const double> truth, const IterationObserver& observer) {
  cfg.validate();
  detail::validate_problem(og.base(), m, cfg.split_components, truth);
  SlpIteration it(og, m, effective_threads(cfg));
  return drive(it, og.base(), cfg, truth, observer);
}

SolveReport slp_solve(const DataGraph& g, const SamplingSet& m, const SolverConfig& cfg,
                      std::span<const double> truth, const IterationObserver& observer) {
  const OrientedGraph og(g);
  return slp_solve(og, m, cfg, truth, observer);
}

SolveReport slp_solve_message_passing(const DataGraph& g, const SamplingSet& m,
                                      const SolverConfig& cfg,
                                      std::span<const double> truth,
                                      const IterationObserver& observer) {
  cfg.validate();
  detail::validate_problem(g, m, cfg.split_components, truth);
  const OrientedGraph og(g);
  MessagePassingIteration it(og, m, effective_threads(cfg));
  return drive(it, g, cfg, truth, observer);
}

std::vector<std::pair<std::size_t, double>> suboptimality_trace(const SolveReport& report,
                                                                double tv_star) {
  std::vector<std::pair<std::size_t, double>> out;
  for (const auto& h : report.history) {
    if (h.k >= 1) out.emplace_back(h.k, h.tv - tv_star);
  }
  return out;
}

InverseKEnvelope fit_inverse_k_envelope(
    std::span<const std::pair<std::size_t, double>> trace, std::size_t fit_points,
    double slack) {
  InverseKEnvelope env;
  const std::size_t fit = std::min(fit_points, trace.size());
  for (std::size_t t = 0; t < fit; ++t) {
    env.c1 = std::max(env.c1, double(trace[t].first) * trace[t].second);
  }
  for (std::size_t t = fit; t < trace.size(); ++t) {
    const double scaled = double(trace[t].first) * trace[t].second;
    if (env.c1 > 0.0) {
      env.worst_ratio = std::max(env.worst_ratio, scaled / env.c1);
    } else if (scaled > 0.0) {
      env.worst_ratio = std::numeric_limits<double>::infinity();
    }
  }
  env.holds = env.worst_ratio <= 1.0 + slack;
  return env;
}

}  // namespace slp

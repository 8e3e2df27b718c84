#include "slp/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "slp/error.hpp"
#include "slp/random.hpp"
#include "slp/solver.hpp"

namespace slp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SideWitness find_witness(const DataGraph& g, const SamplingSet& m, NodeId endpoint,
                         double boundary_weight) {
  SideWitness side;
  side.endpoint = endpoint;
  if (m.contains(endpoint)) {
    side.self_witness = true;
    return side;
  }
  double best = 0.0;
  for (EdgeId e : g.incident_edges(endpoint)) {
    const NodeId nb = g.other_end(e, endpoint);
    const double w = g.edges()[e].w;
    if (w >= 2.0 * boundary_weight && m.contains(nb) && w > best) {
      best = w;
      side.witness = nb;
    }
  }
  return side;
}

std::vector<char> edge_set_mask(const DataGraph& g, std::span<const EdgeId> edge_set) {
  std::vector<char> in(g.edge_count(), 0);
  for (EdgeId e : edge_set) {
    if (e >= g.edge_count()) {
      fail(ErrorCode::InvalidArgument, "edge id " + std::to_string(e) + " out of range");
    }
    if (in[e]) fail(ErrorCode::InvalidArgument, "edge id " + std::to_string(e) + " repeated");
    in[e] = 1;
  }
  return in;
}

struct RatioParts {
  double off = 0.0;  // ||(Du) off S||_1
  double on = 0.0;   // ||(Du) on S||_1
  double ratio() const { return on > 0.0 ? off / on : kInf; }
};

RatioParts ratio_parts(const DataGraph& g, const std::vector<char>& in_s,
                       std::span<const double> u) {
  RatioParts p;
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const double v = edges[e].w * std::abs(u[edges[e].i] - u[edges[e].j]);
    (in_s[e] ? p.on : p.off) += v;
  }
  return p;
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

// Best indicator signal among the level sets of u. By the coarea formula the
// ratio of u is at least the smallest ratio over these sets.
struct SweepResult {
  double ratio = kInf;
  GraphSignal indicator;
};

SweepResult level_set_sweep(const DataGraph& g, const std::vector<char>& in_s,
                            const std::vector<char>& sampled, std::span<const double> u) {
  SweepResult best;
  const std::size_t n = g.node_count();
  std::vector<NodeId> pos, neg;
  for (NodeId i = 0; i < n; ++i) {
    if (sampled[i]) continue;
    if (u[i] > 0.0) pos.push_back(i);
    if (u[i] < 0.0) neg.push_back(i);
  }
  std::sort(pos.begin(), pos.end(), [&](NodeId a, NodeId b) { return u[a] > u[b]; });
  std::sort(neg.begin(), neg.end(), [&](NodeId a, NodeId b) { return u[a] < u[b]; });

  std::vector<char> in_set(n, 0);
  for (const auto* order : {&pos, &neg}) {
    std::fill(in_set.begin(), in_set.end(), 0);
    RatioParts parts;
    std::size_t best_prefix = 0;
    double best_here = kInf;
    for (std::size_t k = 0; k < order->size(); ++k) {
      const NodeId v = (*order)[k];
      for (EdgeId e : g.incident_edges(v)) {
        const double w = g.edges()[e].w;
        double& bucket = in_s[e] ? parts.on : parts.off;
        bucket += in_set[g.other_end(e, v)] ? -w : w;
      }
      in_set[v] = 1;
      // Guard the incremental sums against cancellation drift.
      parts.on = std::max(parts.on, 0.0);
      parts.off = std::max(parts.off, 0.0);
      const double r = parts.ratio();
      if (r < best_here) {
        best_here = r;
        best_prefix = k + 1;
      }
    }
    if (best_prefix > 0) {
      GraphSignal ind(n, 0.0);
      for (std::size_t k = 0; k < best_prefix; ++k) ind[(*order)[k]] = 1.0;
      const double exact = ratio_parts(g, in_s, ind).ratio();
      if (exact < best.ratio) {
        best.ratio = exact;
        best.indicator = std::move(ind);
      }
    }
  }
  return best;
}

void weighted_median_into(std::vector<std::pair<double, double>>& pts, double& out) {
  if (pts.empty()) return;
  std::sort(pts.begin(), pts.end());
  double total = 0.0;
  for (const auto& p : pts) total += p.second;
  double acc = 0.0;
  for (const auto& p : pts) {
    acc += p.second;
    if (acc >= 0.5 * total) {
      out = p.first;
      return;
    }
  }
  out = pts.back().first;
}

struct BoundaryTerm {
  std::size_t ci, cj;
  double r;  // x_i - x_j
  double w;
};

double fit_objective(double intra, const std::vector<BoundaryTerm>& terms,
                     const std::vector<double>& a) {
  double s = intra;
  for (const auto& t : terms) s += t.w * std::abs(t.r - (a[t.ci] - a[t.cj]));
  return s;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

void descend(double intra, const std::vector<BoundaryTerm>& terms, std::size_t k,
             std::vector<double>& a) {
  std::vector<std::pair<double, double>> pts;
  double value = fit_objective(intra, terms, a);
  for (int round = 0; round < 1000; ++round) {
    const double before = value;
    // Single-cluster moves.
    for (std::size_t l = 0; l < k; ++l) {
      pts.clear();
      for (const auto& t : terms) {
        if (t.ci == l && t.cj != l) pts.emplace_back(t.r + a[t.cj], t.w);
        if (t.cj == l && t.ci != l) pts.emplace_back(a[t.ci] - t.r, t.w);
      }
      const double old = a[l];
      weighted_median_into(pts, a[l]);
      const double v = fit_objective(intra, terms, a);
      if (v <= value) value = v; else a[l] = old;
    }
    // Moves of clusters fused by tight boundary terms.
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& t : terms) {
      if (std::abs(t.r - (a[t.ci] - a[t.cj])) <= 1e-12 * (1.0 + std::abs(t.r))) {
        parent[find_root(parent, t.ci)] = find_root(parent, t.cj);
      }
    }
    for (std::size_t root = 0; root < k; ++root) {
      if (find_root(parent, root) != root) continue;
      std::vector<char> in_group(k, 0);
      std::size_t size = 0;
      for (std::size_t l = 0; l < k; ++l) {
        if (find_root(parent, l) == root) {
          in_group[l] = 1;
          ++size;
        }
      }
      if (size < 2 || size == k) continue;
      pts.clear();
      for (const auto& t : terms) {
        if (in_group[t.ci] && !in_group[t.cj]) pts.emplace_back(t.r - a[t.ci] + a[t.cj], t.w);
        if (in_group[t.cj] && !in_group[t.ci]) pts.emplace_back(a[t.ci] - a[t.cj] - t.r, t.w);
      }
      double shift = 0.0;
      weighted_median_into(pts, shift);
      std::vector<double> trial = a;
      for (std::size_t l = 0; l < k; ++l) {
        if (in_group[l]) trial[l] += shift;
      }
      const double v = fit_objective(intra, terms, trial);
      if (v < value) {
        value = v;
        a = std::move(trial);
      }
    }
    if (before - value <= 1e-15 * (1.0 + std::abs(before))) break;
  }
}

}  // namespace

ResolveReport resolves(const DataGraph& g, const Partition& f, const SamplingSet& m) {
  m.check_range(g.node_count());
  const std::vector<EdgeId> bnd = boundary(g, f);
  ResolveReport report;
  std::vector<char> is_boundary(g.edge_count(), 0);
  for (EdgeId e : bnd) is_boundary[e] = 1;

  for (EdgeId e : bnd) {
    const auto& ed = g.edges()[e];
    BoundaryWitness bw;
    bw.edge = e;
    bw.weight = ed.w;
    bw.side_i = find_witness(g, m, ed.i, ed.w);
    bw.side_j = find_witness(g, m, ed.j, ed.w);
    if (!bw.covered()) report.violations.push_back(e);
    report.boundary.push_back(bw);
  }
  report.resolved = report.violations.empty();

  std::vector<double> load(g.node_count(), 0.0);
  for (EdgeId e : bnd) {
    load[g.edges()[e].i] += g.edges()[e].w;
    load[g.edges()[e].j] += g.edges()[e].w;
  }
  report.aggregate_resolved = true;
  for (NodeId p = 0; p < g.node_count(); ++p) {
    if (load[p] == 0.0 || m.contains(p)) continue;
    double capacity = 0.0;
    for (EdgeId e : g.incident_edges(p)) {
      if (!is_boundary[e] && m.contains(g.other_end(e, p))) capacity += g.edges()[e].w;
    }
    if (capacity < 2.0 * load[p]) {
      report.aggregate_resolved = false;
      break;
    }
  }
  return report;
}

bool kernel_contains(const SamplingSet& m, std::span<const double> u) {
  bool inside = true;
  for (const auto& s : m.samples()) {
    if (s.node >= u.size()) {
      fail(ErrorCode::DimensionMismatch, "sampled node " + std::to_string(s.node) +
                                             " outside signal of length " +
                                             std::to_string(u.size()));
    }
    if (u[s.node] != 0.0) inside = false;
  }
  return inside;
}

double nnsp_ratio(const DataGraph& g, std::span<const EdgeId> edge_set,
                  std::span<const double> u) {
  if (u.size() != g.node_count()) {
    fail(ErrorCode::DimensionMismatch, "nnsp_ratio: signal length mismatch");
  }
  return ratio_parts(g, edge_set_mask(g, edge_set), u).ratio();
}

NnspEstimate nnsp_ratio_estimate(const DataGraph& g, const SamplingSet& m,
                                 std::span<const EdgeId> edge_set,
                                 const NnspBudget& budget) {
  const std::size_t n = g.node_count();
  const std::vector<char> in_s = edge_set_mask(g, edge_set);
  const std::vector<char> sampled = m.mask(n);

  std::vector<NodeId> free_nodes, active;  // active: free endpoints of S edges
  for (NodeId i = 0; i < n; ++i) {
    if (!sampled[i]) free_nodes.push_back(i);
  }
  if (free_nodes.empty()) {
    fail(ErrorCode::DegenerateEdgeSet, "every node is sampled; the kernel is {0}");
  }
  for (EdgeId e : edge_set) {
    for (NodeId v : {g.edges()[e].i, g.edges()[e].j}) {
      if (!sampled[v]) active.push_back(v);
    }
  }
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  if (active.empty()) {
    fail(ErrorCode::DegenerateEdgeSet,
         "no kernel signal varies across the edge set (all its endpoints are sampled)");
  }

  NnspEstimate est;
  est.edge_set.assign(edge_set.begin(), edge_set.end());
  est.best_ratio = kInf;

  std::vector<double> grad(n);
  for (std::size_t r = 0; r < std::max<std::size_t>(budget.restarts, 1); ++r) {
    Rng rng(budget.seed, r);
    GraphSignal u(n, 0.0);
    if (r % 2 == 0) {
      for (NodeId i : free_nodes) u[i] = rng.normal();
    } else {
      // Indicator of a small free-node ball around an active endpoint.
      const NodeId start = active[rng.below(active.size())];
      const std::size_t radius = rng.below(4);
      std::vector<NodeId> frontier{start};
      u[start] = 1.0;
      for (std::size_t d = 0; d < radius; ++d) {
        std::vector<NodeId> next;
        for (NodeId v : frontier) {
          for (EdgeId e : g.incident_edges(v)) {
            const NodeId w = g.other_end(e, v);
            if (!sampled[w] && u[w] == 0.0) {
              u[w] = 1.0;
              next.push_back(w);
            }
          }
        }
        frontier = std::move(next);
      }
      for (NodeId i : free_nodes) u[i] += 0.05 * rng.normal();
    }

    double best_here = kInf;
    GraphSignal best_u;
    for (std::size_t t = 0; t < budget.steps; ++t) {
      const double un = norm2(u);
      if (un == 0.0) break;
      for (double& v : u) v /= un;
      const RatioParts parts = ratio_parts(g, in_s, u);
      if (parts.on == 0.0) {
        for (NodeId i : active) u[i] += 0.1 * rng.normal();
        continue;
      }
      const double ratio = parts.ratio();
      if (ratio < best_here) {
        best_here = ratio;
        best_u = u;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      const auto edges = g.edges();
      for (EdgeId e = 0; e < edges.size(); ++e) {
        const double s = edges[e].w * sign(u[edges[e].i] - u[edges[e].j]);
        const double c = in_s[e] ? -ratio * s : s;
        grad[edges[e].i] += c;
        grad[edges[e].j] -= c;
      }
      for (NodeId i = 0; i < n; ++i) {
        if (sampled[i]) grad[i] = 0.0;
      }
      const double gn = norm2(grad);
      if (gn == 0.0) break;
      const double step = 0.3 / std::sqrt(1.0 + double(t));
      for (NodeId i = 0; i < n; ++i) u[i] -= step * grad[i] / gn;
    }
    if (best_u.empty()) continue;

    SweepResult sweep = level_set_sweep(g, in_s, sampled, best_u);
    if (sweep.ratio < best_here) {
      best_here = sweep.ratio;
      best_u = std::move(sweep.indicator);
    }
    // Strict comparison keeps the lowest restart index on ties.
    if (best_here < est.best_ratio) {
      est.best_ratio = best_here;
      est.witness = std::move(best_u);
      est.best_restart = r;
    }
  }
  if (est.witness.empty()) {
    fail(ErrorCode::DegenerateEdgeSet, "search found no kernel signal active on the edge set");
  }
  est.best_ratio = ratio_parts(g, in_s, est.witness).ratio();
  est.certified_violation = est.best_ratio < 2.0 * (1.0 - 1e-9);
  return est;
}

RecoveryCheck verify_exact_recovery(const DataGraph& g, const Partition& f,
                                    std::span<const double> coeffs,
                                    std::span<const NodeId> sample_nodes,
                                    std::size_t iterations, double tol) {
  const GraphSignal truth = clustered_signal(f, coeffs);
  const SamplingSet m = SamplingSet::from_signal(sample_nodes, truth);
  const ResolveReport rr = resolves(g, f, m);
  if (!rr.resolved) {
    fail(ErrorCode::NotResolved, "sampling set does not resolve the partition (boundary edge " +
                                     std::to_string(rr.violations.front()) +
                                     " has no witness)");
  }
  SolverConfig cfg;
  cfg.max_iterations = iterations;
  cfg.history_stride = iterations;
  const SolveReport rep = slp_solve(g, m, cfg);
  RecoveryCheck out;
  for (NodeId i = 0; i < truth.size(); ++i) {
    out.max_abs_error = std::max(out.max_abs_error, std::abs(rep.labels[i] - truth[i]));
  }
  out.recovered = out.max_abs_error <= tol;
  out.labels = rep.labels;
  return out;
}

ClusteredFit min_clustered_residual_tv(const DataGraph& g, const Partition& f,
                                       std::span<const double> x, std::size_t restarts,
                                       std::uint64_t seed) {
  if (x.size() != g.node_count()) {
    fail(ErrorCode::DimensionMismatch, "min_clustered_residual_tv: signal length mismatch");
  }
  const std::vector<EdgeId> bnd = boundary(g, f);
  const std::size_t k = f.cluster_count();
  std::vector<char> is_boundary(g.edge_count(), 0);
  for (EdgeId e : bnd) is_boundary[e] = 1;

  double intra = 0.0;
  std::vector<BoundaryTerm> terms;
  const auto edges = g.edges();
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    if (is_boundary[e]) {
      terms.push_back({f.cluster_of(ed.i), f.cluster_of(ed.j), x[ed.i] - x[ed.j], ed.w});
    } else {
      intra += ed.w * std::abs(x[ed.i] - x[ed.j]);
    }
  }

  std::vector<double> means(k, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    for (NodeId i : f.cluster(l)) means[l] += x[i];
    means[l] /= double(f.cluster(l).size());
  }
  ClusteredFit best{fit_objective(intra, terms, means), means};
  if (terms.empty()) return best;

  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  for (std::size_t r = 0; r < std::max<std::size_t>(restarts, 1); ++r) {
    std::vector<double> a = means;
    if (r > 0) {
      Rng rng(seed, r);
      for (double& v : a) v = rng.uniform(lo, hi);
    }
    descend(intra, terms, k, a);
    const double v = fit_objective(intra, terms, a);
    if (v < best.value) best = {v, a};
  }
  return best;
}

ApproxBoundCheck verify_approx_bound(const DataGraph& g, const Partition& f,
                                     std::span<const NodeId> sample_nodes,
                                     std::span<const double> x_true, std::size_t iterations,
                                     double slack) {
  const SamplingSet m = SamplingSet::from_signal(sample_nodes, x_true);
  const ResolveReport rr = resolves(g, f, m);
  if (!rr.resolved) {
    fail(ErrorCode::NotResolved, "sampling set does not resolve the partition (boundary edge " +
                                     std::to_string(rr.violations.front()) +
                                     " has no witness)");
  }
  SolverConfig cfg;
  cfg.max_iterations = iterations;
  cfg.history_stride = iterations;
  const SolveReport rep = slp_solve(g, m, cfg, x_true);

  ApproxBoundCheck out;
  GraphSignal diff(x_true.size());
  for (NodeId i = 0; i < diff.size(); ++i) diff[i] = rep.labels[i] - x_true[i];
  out.lhs = tv(g, diff);
  out.fit = min_clustered_residual_tv(g, f, x_true);
  out.rhs = 6.0 * out.fit.value;
  out.holds = out.lhs <= out.rhs * (1.0 + slack);
  out.labels = rep.labels;
  return out;
}

}  // namespace slp

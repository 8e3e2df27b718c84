#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "slp/error.hpp"
#include "slp/generators.hpp"
#include "slp/graph.hpp"
#include "slp/random.hpp"
#include "slp/solver.hpp"

using namespace slp;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected slp::Error");
  return ErrorCode::InvalidArgument;
}

DataGraph chain(std::size_t n, double w = 1.0) {
  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return build_graph(n, edges);
}

DataGraph random_connected(Rng& rng, std::size_t n, double p) {
  std::vector<WeightedEdge> edges;
  for (NodeId i = 1; i < n; ++i) edges.push_back({rng.below(i), i, rng.uniform(0.2, 3.0)});
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      bool dup = false;
      for (const auto& e : edges) dup |= (e.i == i && e.j == j) || (e.i == j && e.j == i);
      if (!dup && rng.bernoulli(p)) edges.push_back({i, j, rng.uniform(0.2, 3.0)});
    }
  }
  return build_graph(n, edges);
}

SolverConfig iterations(std::size_t k) {
  SolverConfig cfg;
  cfg.max_iterations = k;
  return cfg;
}

}  // namespace

TEST_CASE("preconditioner examples") {
  const Preconditioners p = preconditioners(chain(3));
  CHECK(p.gamma == std::vector<double>{1.0, 0.5, 1.0});
  CHECK(p.lambda == std::vector<double>{0.5, 0.5});

  const Preconditioners q = preconditioners(build_graph(2, {{0, 1, 2.0}}));
  CHECK(q.lambda == std::vector<double>{0.25});
  CHECK(q.gamma == std::vector<double>{0.5, 0.5});

  CHECK(code_of([] { preconditioners(build_graph(3, {{0, 1, 1.0}})); }) ==
        ErrorCode::IsolatedNode);
}

TEST_CASE("convergence norm matches a dense SVD") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const DataGraph g = random_connected(rng, 3 + rng.below(48), 0.15);
    const ConvergenceCheck c = check_convergence_condition(g);
    const double dense = oracle::convergence_norm(g);
    CHECK(c.norm_estimate == doctest::Approx(dense).epsilon(1e-6));
    CHECK(c.norm_estimate <= 1.0 + 1e-12);
  }
}

TEST_CASE("convergence norm is exactly one on bipartite examples") {
  // The preconditioned operator has squared norm lambda_max(normalized
  // Laplacian) / 2, which reaches 1 on every bipartite graph.
  const ConvergenceCheck single = check_convergence_condition(build_graph(2, {{0, 1, 3.0}}));
  CHECK(single.norm_estimate == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(oracle::convergence_norm(build_graph(2, {{0, 1, 3.0}})) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const ConvergenceCheck c3 = check_convergence_condition(chain(3));
  CHECK(c3.norm_estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(single.satisfied);
  CHECK_FALSE(c3.satisfied);
  CHECK(c3.bipartite_component);
  CHECK(c3.norm_estimate == 1.0);
  std::vector<WeightedEdge> long_chain;
  for (NodeId i = 0; i + 1 < 2000; ++i) long_chain.push_back({i, i + 1, 1.0 + (i % 3)});
  CHECK_FALSE(check_convergence_condition(build_graph(2000, long_chain)).satisfied);
  CHECK(oracle::convergence_norm(chain(3)) == doctest::Approx(1.0).epsilon(1e-12));

  // An odd cycle is not bipartite and stays strictly below 1.
  const DataGraph triangle = build_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const ConvergenceCheck t = check_convergence_condition(triangle);
  CHECK(t.satisfied);
  CHECK_FALSE(t.bipartite_component);
  CHECK(t.norm_estimate == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));
}

TEST_CASE("all nodes sampled returns the labels") {
  const DataGraph g = chain(4);
  const SamplingSet m = SamplingSet::create({{0, 1.0}, {1, -2.0}, {2, 0.5}, {3, 7.0}});
  const SolveReport r = slp_solve(g, m, iterations(5));
  CHECK(r.labels == std::vector<double>{1.0, -2.0, 0.5, 7.0});
  CHECK(r.iterations_run == 5);
}

TEST_CASE("two cliques are recovered") {
  const ClusteredInstance inst = two_clique_instance();
  std::vector<SamplingSet::Sample> smp;
  for (NodeId i : inst.sample_nodes) smp.push_back({i, inst.truth[i]});
  const SamplingSet m = SamplingSet::create(smp);
  const SolveReport r = slp_solve(inst.graph, m, iterations(2000), inst.truth);
  for (NodeId i = 0; i < 8; ++i) CHECK(std::abs(r.labels[i] - inst.truth[i]) <= 1e-3);
  REQUIRE(r.history.back().nmse.has_value());
  CHECK(*r.history.back().nmse < 1e-6);
}

TEST_CASE("hand trace of two iterations on a unit chain") {
  const DataGraph g = chain(3);
  const OrientedGraph og = orient(g);
  const SamplingSet m = SamplingSet::create({{0, 1.0}});
  SlpIteration it(og, m);
  CHECK(it.state().x_hat == std::vector<double>{1, 0, 0});
  it.step();
  CHECK(it.state().x_hat == std::vector<double>{1, 0, 0});
  CHECK(it.state().y_hat == std::vector<double>{0.5, 0});
  it.step();
  CHECK(it.state().x_hat == std::vector<double>{1, 0.25, 0});
  CHECK(it.state().y_hat == std::vector<double>{0.75, 0.25});
  CHECK(it.state().k == 2);
}

TEST_CASE("message passing is bit-identical to the matrix form") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const DataGraph g = random_connected(rng, 5 + rng.below(60), 0.08);
    std::vector<SamplingSet::Sample> smp;
    for (NodeId i = 0; i < g.node_count(); ++i) {
      if (rng.bernoulli(0.2) || i == 0) smp.push_back({i, rng.normal()});
    }
    const SamplingSet m = SamplingSet::create(smp);
    const SolveReport a = slp_solve(g, m, iterations(150));
    const SolveReport b = slp_solve_message_passing(g, m, iterations(150));
    CHECK(a.labels == b.labels);
    CHECK(a.dual == b.dual);
  }
}

TEST_CASE("message passing only reads local data") {
  Rng rng(4);
  const DataGraph g = random_connected(rng, 30, 0.1);
  const OrientedGraph og = orient(g);
  const SamplingSet m = SamplingSet::create({{0, 1.0}, {7, -1.0}});
  std::size_t reads = 0, bad = 0;
  AccessTrace trace;
  trace.node_reads_edge = [&](NodeId i, EdgeId e) {
    ++reads;
    if (og.head(e) != i && og.tail(e) != i) ++bad;
  };
  trace.edge_reads_node = [&](EdgeId e, NodeId i) {
    ++reads;
    if (og.head(e) != i && og.tail(e) != i) ++bad;
  };
  MessagePassingIteration it(og, m, 4, &trace);
  for (int k = 0; k < 5; ++k) it.step();
  CHECK(reads == 5 * 4 * g.edge_count());
  CHECK(bad == 0);
}

TEST_CASE("flipping every edge orientation leaves the labels unchanged") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const DataGraph g = random_connected(rng, 10 + rng.below(40), 0.1);
    const SamplingSet m = SamplingSet::create({{0, 2.0}, {g.node_count() - 1, -1.0}});
    const OrientedGraph og = orient(g);
    const SolveReport a = slp_solve(og, m, iterations(100));
    const SolveReport b = slp_solve(og.reversed(), m, iterations(100));
    CHECK(a.labels == b.labels);
    for (std::size_t e = 0; e < a.dual.size(); ++e) CHECK(a.dual[e] == -b.dual[e]);
  }
}

TEST_CASE("iterates stay dual feasible and clamped on the samples") {
  const PlantedInstance inst = planted_partition_instance({});
  const SamplingSet m = inst.draw_samples(9, 3);
  std::size_t calls = 0;
  bool feasible = true, clamped = true;
  slp_solve(inst.graph, m, iterations(300), {}, [&](const SlpState& s) {
    ++calls;
    for (double y : s.y_hat) feasible &= std::abs(y) <= 1.0;
    for (const auto& smp : m.samples()) clamped &= s.x_hat[smp.node] == smp.label;
  });
  CHECK(calls == 300);
  CHECK(feasible);
  CHECK(clamped);
}

TEST_CASE("a primal-dual optimum is a fixed point") {
  const DataGraph g = chain(3);
  const OrientedGraph og = orient(g);
  const SamplingSet m = SamplingSet::create({{0, 1.0}, {2, 1.0}});
  SlpIteration it(og, m);
  it.reset({1.0, 1.0, 1.0}, {0.0, 0.0});
  for (int k = 0; k < 10; ++k) it.step();
  CHECK(it.state().x_hat == std::vector<double>{1, 1, 1});
  CHECK(it.state().y_hat == std::vector<double>{0, 0});
  CHECK(code_of([&] { it.reset({1.0}, {0.0, 0.0}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("objective decrease stops early") {
  const ClusteredInstance inst = two_clique_instance();
  const SamplingSet m = SamplingSet::create({{0, 0.0}, {7, 1.0}});
  SolverConfig cfg = iterations(100000);
  cfg.stopping = ObjectiveDecrease{1e-9, 10};
  const SolveReport r = slp_solve(inst.graph, m, cfg);
  CHECK(r.iterations_run < 100000);
  CHECK(r.history.back().k == r.iterations_run);

  SolverConfig bad = cfg;
  bad.stopping = ObjectiveDecrease{0.0, 10};
  CHECK(code_of([&] { slp_solve(inst.graph, m, bad); }) == ErrorCode::InvalidArgument);
  bad.stopping = ObjectiveDecrease{1e-6, 0};
  CHECK(code_of([&] { slp_solve(inst.graph, m, bad); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("history stride") {
  const DataGraph g = chain(10);
  const SamplingSet m = SamplingSet::create({{0, 1.0}});
  SolverConfig cfg = iterations(25);
  cfg.history_stride = 10;
  const SolveReport r = slp_solve(g, m, cfg, std::vector<double>(10, 1.0));
  REQUIRE(r.history.size() == 4);
  CHECK(r.history[0].k == 0);
  CHECK(r.history[1].k == 10);
  CHECK(r.history[2].k == 20);
  CHECK(r.history[3].k == 25);
  CHECK(r.history[0].nmse.has_value());
}

TEST_CASE("solver errors") {
  const DataGraph g = chain(4);
  const SamplingSet m = SamplingSet::create({{0, 1.0}});
  CHECK(code_of([&] { slp_solve(g, m, iterations(0)); }) == ErrorCode::InvalidArgument);
  SolverConfig stride0 = iterations(5);
  stride0.history_stride = 0;
  CHECK(code_of([&] { slp_solve(g, m, stride0); }) == ErrorCode::InvalidArgument);
  const SamplingSet far = SamplingSet::create({{9, 1.0}});
  CHECK(code_of([&] { slp_solve(g, far, iterations(5)); }) == ErrorCode::NodeOutOfRange);
  CHECK(code_of([&] { slp_solve(g, m, iterations(5), std::vector<double>{1, 2}); }) ==
        ErrorCode::DimensionMismatch);

  const DataGraph split = build_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(code_of([&] { slp_solve(split, m, iterations(5)); }) == ErrorCode::DisconnectedGraph);
  SolverConfig per_component = iterations(50);
  per_component.split_components = true;
  CHECK(code_of([&] { slp_solve(split, m, per_component); }) == ErrorCode::EmptySamplingSet);
  const SamplingSet both = SamplingSet::create({{0, 1.0}, {3, -1.0}});
  const SolveReport r = slp_solve(split, both, per_component);
  CHECK(r.labels[1] == doctest::Approx(1.0));
  CHECK(r.labels[2] == doctest::Approx(-1.0));

  const DataGraph iso = build_graph(3, {{0, 1, 1.0}});
  SolverConfig iso_cfg = iterations(5);
  iso_cfg.split_components = true;
  CHECK(code_of([&] { slp_solve(iso, m, iso_cfg); }) == ErrorCode::IsolatedNode);
}

TEST_CASE("thread count does not change the result") {
  Rng rng(2);
  const std::size_t n = 30000;
  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, rng.uniform(0.5, 2.0)});
  for (NodeId i = 0; i + 7 < n; i += 3) edges.push_back({i, i + 7, rng.uniform(0.5, 2.0)});
  const DataGraph g = build_graph(n, edges);
  std::vector<SamplingSet::Sample> smp;
  for (NodeId i = 0; i < n; i += 300) smp.push_back({i, rng.normal()});
  const SamplingSet m = SamplingSet::create(smp);
  SolverConfig one = iterations(50);
  SolverConfig many = one;
  many.deterministic = false;
  many.threads = 4;
  const SolveReport a = slp_solve(g, m, one);
  const SolveReport b = slp_solve(g, m, many);
  const SolveReport c = slp_solve_message_passing(g, m, many);
  CHECK(a.labels == b.labels);
  CHECK(a.dual == b.dual);
  CHECK(a.labels == c.labels);
}

TEST_CASE("suboptimality trace and inverse-k envelope") {
  SolveReport r;
  r.history = {{0, 5.0, {}, 0.0}, {1, 3.0, {}, 0.0}, {2, 2.0, {}, 0.0}};
  const auto trace = suboptimality_trace(r, 1.0);
  REQUIRE(trace.size() == 2);
  CHECK(trace[0] == std::pair<std::size_t, double>{1, 2.0});
  CHECK(trace[1] == std::pair<std::size_t, double>{2, 1.0});

  std::vector<std::pair<std::size_t, double>> exact;
  for (std::size_t k = 1; k <= 100; ++k) exact.emplace_back(k, 3.0 / double(k));
  const InverseKEnvelope env = fit_inverse_k_envelope(exact);
  CHECK(env.c1 == doctest::Approx(3.0));
  CHECK(env.holds);

  std::vector<std::pair<std::size_t, double>> slow;
  for (std::size_t k = 1; k <= 100; ++k) slow.emplace_back(k, 1.0 / std::sqrt(double(k)));
  CHECK_FALSE(fit_inverse_k_envelope(slow).holds);
}

TEST_CASE("suboptimality shrinks on the scaled chain") {
  ChainSpec spec;
  spec.n = 10000;
  const ChainInstance c = chain_instance(spec);
  const double tv_star = tv(c.graph, slp_solve(c.graph, c.samples, iterations(5000)).labels);
  const SolveReport r = slp_solve(c.graph, c.samples, iterations(1000));
  const auto trace = suboptimality_trace(r, tv_star);
  REQUIRE(trace.size() == 1000);
  CHECK(trace[999].second <= trace[99].second);
  CHECK(trace[999].second >= -1e-9 * tv_star);
}

TEST_CASE("all-sampled trace is identically zero") {
  const DataGraph g = chain(4);
  const std::vector<double> truth{1.0, 3.0, -2.0, 0.5};
  std::vector<SamplingSet::Sample> smp;
  for (NodeId i = 0; i < 4; ++i) smp.push_back({i, truth[i]});
  const SamplingSet m = SamplingSet::create(smp);
  bool exact_every_iteration = true;
  const SolveReport r = slp_solve(g, m, iterations(20), truth, [&](const SlpState& s) {
    exact_every_iteration &= s.x_hat == truth;
  });
  CHECK(exact_every_iteration);
  for (const auto& [k, sub] : suboptimality_trace(r, tv(g, truth))) CHECK(sub == 0.0);
}

#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "slp/error.hpp"
#include "slp/graph.hpp"
#include "slp/random.hpp"

using namespace slp;

namespace {

DataGraph chain3(double w12 = 1.0, double w23 = 1.0) {
  return build_graph(3, {{0, 1, w12}, {1, 2, w23}});
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected slp::Error");
  return ErrorCode::InvalidArgument;
}

DataGraph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (rng.bernoulli(p)) edges.push_back({j, i, rng.uniform(0.1, 3.0)});
    }
  }
  return build_graph(n, std::move(edges));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("build_graph validates and canonicalizes") {
  const DataGraph g = chain3(2.0, 1.0);
  CHECK(g.node_count() == 3);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0].i == 0);
  CHECK(g.edges()[0].j == 1);
  CHECK(g.edges()[0].w == 2.0);

  const DataGraph single = build_graph(1, {});
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);

  CHECK(code_of([] { build_graph(2, {{0, 0, 1.0}}); }) == ErrorCode::SelfLoop);
  CHECK(code_of([] { build_graph(2, {{0, 1, 0.0}}); }) == ErrorCode::NonPositiveWeight);
  CHECK(code_of([] { build_graph(2, {{0, 1, -1.0}}); }) == ErrorCode::NonPositiveWeight);
  CHECK(code_of([] { build_graph(2, {{0, 1, NAN}}); }) == ErrorCode::NonPositiveWeight);
  CHECK(code_of([] { build_graph(2, {{0, 1, 1.0}, {1, 0, 2.0}}); }) == ErrorCode::DuplicateEdge);
  CHECK(code_of([] { build_graph(2, {{0, 2, 1.0}}); }) == ErrorCode::NodeOutOfRange);
}

TEST_CASE("edges are sorted by (min, max) whatever the input order") {
  const DataGraph g = build_graph(4, {{3, 2, 1.0}, {1, 0, 2.0}, {2, 0, 3.0}});
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges()[0].i == 0);
  CHECK(g.edges()[0].j == 1);
  CHECK(g.edges()[1].i == 0);
  CHECK(g.edges()[1].j == 2);
  CHECK(g.edges()[2].i == 2);
  CHECK(g.edges()[2].j == 3);
}

TEST_CASE("neighborhood and degree") {
  const DataGraph g = chain3();
  CHECK(neighborhood(g, 1) == std::vector<NodeId>{0, 2});
  CHECK(neighborhood(g, 0) == std::vector<NodeId>{1});
  CHECK(degree(g, 1) == 2.0);
  CHECK(max_degree(g) == 2.0);

  const DataGraph iso = build_graph(2, {});
  CHECK(neighborhood(iso, 0).empty());
  CHECK(degree(iso, 0) == 0.0);
  CHECK(max_degree(build_graph(1, {})) == 0.0);

  CHECK(code_of([&] { neighborhood(g, 3); }) == ErrorCode::NodeOutOfRange);
  CHECK(code_of([&] { degree(g, 7); }) == ErrorCode::NodeOutOfRange);
}

TEST_CASE("chain degrees with intra weight 2 and inter weight 1") {
  // Clusters of five: node 4 (0-indexed) ends the first cluster.
  std::vector<WeightedEdge> edges;
  for (NodeId i = 0; i + 1 < 20; ++i) edges.push_back({i, i + 1, (i + 1) % 5 ? 2.0 : 1.0});
  const DataGraph g = build_graph(20, edges);
  CHECK(degree(g, 4) == 3.0);
  CHECK(max_degree(g) == 4.0);
  double brute = 0.0;
  for (NodeId i = 0; i < 20; ++i) brute = std::max(brute, degree(g, i));
  CHECK(brute == 4.0);
}

TEST_CASE("orientation puts the head at the smaller node") {
  const DataGraph g = chain3(2.0, 3.0);
  const OrientedGraph og = orient(g);
  CHECK(og.head(0) == 0);
  CHECK(og.tail(0) == 1);
  const Eigen::MatrixXd d = oracle::incidence(og);
  Eigen::MatrixXd expected(2, 3);
  expected << 2, -2, 0, 0, 3, -3;
  CHECK(d == expected);

  const DataGraph reversed_input = build_graph(6, {{5, 2, 1.5}});
  const OrientedGraph o2 = orient(reversed_input);
  CHECK(o2.head(0) == 2);
  CHECK(o2.tail(0) == 5);

  const OrientedGraph flipped = og.reversed();
  CHECK(flipped.head(0) == 1);
  CHECK(flipped.tail(0) == 0);
}

TEST_CASE("oriented neighborhoods") {
  const DataGraph g = chain3();
  const OrientedGraph og = orient(g);
  auto n1 = oriented_neighborhoods(og, 1);
  CHECK(n1.plus == std::vector<NodeId>{2});
  CHECK(n1.minus == std::vector<NodeId>{0});
  auto n0 = oriented_neighborhoods(og, 0);
  CHECK(n0.plus == std::vector<NodeId>{1});
  CHECK(n0.minus.empty());

  const DataGraph iso = build_graph(3, {{0, 1, 1.0}});
  const OrientedGraph oi = orient(iso);
  auto n2 = oriented_neighborhoods(oi, 2);
  CHECK(n2.plus.empty());
  CHECK(n2.minus.empty());
  CHECK(code_of([&] { oriented_neighborhoods(oi, 3); }) == ErrorCode::NodeOutOfRange);
}

TEST_CASE("incidence operator examples") {
  const DataGraph unit = chain3();
  const OrientedGraph og = orient(unit);
  const IncidenceOperator op(og);
  CHECK(apply_incidence(op, std::vector<double>{1, 1, 1}) == std::vector<double>{0, 0});
  CHECK(apply_incidence_transpose(op, std::vector<double>{1, 0}) ==
        std::vector<double>{1, -1, 0});
  CHECK(apply_incidence_transpose(op, std::vector<double>{0, 0}) ==
        std::vector<double>{0, 0, 0});

  const DataGraph g = chain3(2.0, 1.0);
  const OrientedGraph og2 = orient(g);
  const IncidenceOperator op2(og2);
  CHECK(apply_incidence(op2, std::vector<double>{1, 0, 0}) == std::vector<double>{2, 0});
  CHECK(apply_incidence(op2, std::vector<double>{0, 0, 0}) == std::vector<double>{0, 0});

  CHECK(code_of([&] { apply_incidence(op, std::vector<double>{1, 2}); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { apply_incidence_transpose(op, std::vector<double>{1}); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("incidence operator agrees with the dense matrix and is adjoint") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng.below(49);
    const DataGraph g = random_graph(rng, n, 0.2);
    const OrientedGraph og = orient(g);
    const IncidenceOperator op(og);
    const Eigen::MatrixXd d = oracle::incidence(og);

    for (Eigen::Index e = 0; e < d.rows(); ++e) {
      int nonzeros = 0;
      double sum = 0.0;
      for (Eigen::Index i = 0; i < d.cols(); ++i) {
        if (d(e, i) != 0.0) ++nonzeros;
        sum += d(e, i);
      }
      CHECK(nonzeros == 2);
      CHECK(sum == 0.0);
    }

    std::vector<double> x(n), y(g.edge_count());
    for (double& v : x) v = rng.normal();
    for (double& v : y) v = rng.normal();
    const auto dx = apply_incidence(op, x);
    const auto dty = apply_incidence_transpose(op, y);
    const Eigen::VectorXd dx_dense = d * Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    for (std::size_t e = 0; e < dx.size(); ++e) CHECK(dx[e] == doctest::Approx(dx_dense[e]).epsilon(1e-12));

    double nx = 0.0, ny = 0.0;
    for (double v : x) nx += v * v;
    for (double v : y) ny += v * v;
    CHECK(std::abs(dot(dx, y) - dot(x, dty)) <= 1e-12 * (std::sqrt(nx * ny) + 1.0));

    // Constants lie in the kernel of D.
    const std::vector<double> c(n, 3.25);
    for (double v : apply_incidence_transpose(op, apply_incidence(op, c))) CHECK(v == 0.0);

    // Degrees match the dense row sums.
    const Eigen::VectorXd rows = oracle::weights(g).rowwise().sum();
    for (NodeId i = 0; i < n; ++i) CHECK(degree(g, i) == doctest::Approx(rows[i]).epsilon(1e-14));
  }
}

TEST_CASE("parallel application is bit-identical to serial") {
  Rng rng(5);
  std::vector<WeightedEdge> edges;
  const std::size_t n = 40000;
  for (NodeId i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, rng.uniform(0.5, 2.0)});
  for (int k = 0; k < 20000; ++k) {
    const NodeId a = rng.below(n), b = rng.below(n);
    if (a != b && std::max(a, b) - std::min(a, b) > 1) edges.push_back({a, b, rng.uniform(0.5, 2.0)});
  }
  std::sort(edges.begin(), edges.end(), [](const auto& p, const auto& q) {
    return std::pair(std::min(p.i, p.j), std::max(p.i, p.j)) < std::pair(std::min(q.i, q.j), std::max(q.i, q.j));
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const auto& p, const auto& q) {
                            return std::min(p.i, p.j) == std::min(q.i, q.j) &&
                                   std::max(p.i, p.j) == std::max(q.i, q.j);
                          }),
              edges.end());
  const DataGraph g = build_graph(n, edges);
  const OrientedGraph og = orient(g);
  const IncidenceOperator op(og);
  std::vector<double> x(n), y(g.edge_count());
  for (double& v : x) v = rng.normal();
  for (double& v : y) v = rng.normal();
  std::vector<double> a(g.edge_count()), b(g.edge_count()), c(n), d(n);
  op.apply(x, a, 1);
  op.apply(x, b, 4);
  op.apply_transpose(y, c, 1);
  op.apply_transpose(y, d, 4);
  CHECK(a == b);
  CHECK(c == d);
}

TEST_CASE("connected components") {
  std::vector<WeightedEdge> chain5;
  for (NodeId i = 0; i + 1 < 5; ++i) chain5.push_back({i, i + 1, 1.0});
  auto c5 = connected_components(build_graph(5, chain5));
  REQUIRE(c5.size() == 1);
  CHECK(c5[0].size() == 5);

  auto two = connected_components(build_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}}));
  CHECK(two.size() == 2);

  auto three = connected_components(build_graph(3, {}));
  CHECK(three.size() == 3);
  for (const auto& comp : three) CHECK(comp.size() == 1);
}

TEST_CASE("weight_between and incident edges") {
  const DataGraph g = chain3(2.0, 1.0);
  CHECK(g.weight_between(0, 1) == 2.0);
  CHECK(g.weight_between(1, 0) == 2.0);
  CHECK(g.weight_between(0, 2) == 0.0);
  CHECK(g.incident_edges(1).size() == 2);
  CHECK(g.other_end(0, 0) == 1);
}

#include <doctest.h>

#include <cmath>

#include "slp/error.hpp"
#include "slp/generators.hpp"
#include "slp/solver.hpp"
#include "slp/theory.hpp"

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

ImageGridSpec flat(std::size_t w, std::size_t h, Rgb color) {
  ImageGridSpec s;
  s.width = w;
  s.height = h;
  s.pixels.assign(w * h, color);
  s.trimap.assign(w * h, Region::R2);
  s.trimap.front() = Region::R1;
  s.trimap.back() = Region::R3;
  return s;
}

}  // namespace

TEST_CASE("chain instance of ten nodes") {
  const ChainInstance c = chain_instance({});
  CHECK(c.graph.node_count() == 10);
  REQUIRE(c.graph.edge_count() == 9);
  for (EdgeId e = 0; e < 9; ++e) CHECK(c.graph.edges()[e].w == (e == 4 ? 1.0 : 2.0));
  CHECK(c.truth == GraphSignal{1, 1, 1, 1, 1, 5, 5, 5, 5, 5});
  CHECK(c.samples.nodes() == std::vector<NodeId>{4, 5});
  CHECK(c.partition.cluster_count() == 2);

  ChainSpec center;
  center.placement = ClusterCenter{};
  CHECK(chain_instance(center).samples.nodes() == std::vector<NodeId>{2, 7});

  ChainSpec random;
  random.n = 50;
  random.placement = RandomPlacement{3};
  const ChainInstance r = chain_instance(random);
  CHECK(r.samples.size() == 10);
  for (std::size_t l = 0; l < 10; ++l) {
    int hits = 0;
    for (NodeId i : r.samples.nodes()) hits += i / 5 == l;
    CHECK(hits == 1);
  }
  CHECK(chain_instance(random).samples.nodes() == r.samples.nodes());
}

TEST_CASE("large chain") {
  ChainSpec spec;
  spec.n = 1000000;
  const ChainInstance c = chain_instance(spec);
  CHECK(c.graph.edge_count() == 999999);
  CHECK(c.samples.size() == 200000);
  CHECK(c.partition.cluster_count() == 200000);
}

TEST_CASE("chain spec validation") {
  ChainSpec s;
  s.n = 7;
  CHECK(code_of([&] { chain_instance(s); }) == ErrorCode::InvalidSpec);
  s = ChainSpec{};
  s.n = 5;
  CHECK(code_of([&] { chain_instance(s); }) == ErrorCode::InvalidSpec);
  s = ChainSpec{};
  s.cluster_size = 0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  s = ChainSpec{};
  s.w_inter = 0.0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  s = ChainSpec{};
  s.coeff_high = NAN;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("planted partition") {
  PlantedPartitionSpec spec;
  spec.seed = 7;
  const PlantedInstance a = planted_partition_instance(spec);
  const PlantedInstance b = planted_partition_instance(spec);
  REQUIRE(a.graph.edge_count() == b.graph.edge_count());
  for (EdgeId e = 0; e < a.graph.edge_count(); ++e) {
    CHECK(a.graph.edges()[e].i == b.graph.edges()[e].i);
    CHECK(a.graph.edges()[e].j == b.graph.edges()[e].j);
    CHECK(a.graph.edges()[e].w == b.graph.edges()[e].w);
  }
  CHECK(connected_components(a.graph).size() == 1);
  CHECK(a.partition.cluster_count() == 4);
  for (std::size_t l = 0; l < 4; ++l) {
    const auto c = a.partition.cluster(l);
    CHECK((c.size() == 7 || c.size() == 8));
    for (NodeId i : c) CHECK(a.truth[i] == double(l + 1));
  }
  for (const auto& e : a.graph.edges()) {
    CHECK(e.w >= 1.0);
    CHECK(e.w <= 2.0);
  }

  // p_in = 1 fills every cluster: 2*C(8,2) + 2*C(7,2) intra edges.
  std::size_t intra = 0;
  for (const auto& e : a.graph.edges()) intra += a.partition.cluster_of(e.i) == a.partition.cluster_of(e.j);
  CHECK(intra == 98);

  double mean_edges = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    spec.seed = seed;
    mean_edges += double(planted_partition_instance(spec).graph.edge_count());
  }
  mean_edges /= 200.0;
  CHECK(mean_edges == doctest::Approx(98.0 + 0.17 * 337.0).epsilon(0.03));

  const SamplingSet m = a.draw_samples(9, 1);
  CHECK(m.size() == 9);
  for (const auto& s : m.samples()) CHECK(s.label == a.truth[s.node]);
  CHECK(a.draw_samples(9, 1).nodes() == m.nodes());
  CHECK(code_of([&] { a.draw_samples(0, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { a.draw_samples(31, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("planted spec validation and retry exhaustion") {
  PlantedPartitionSpec s;
  s.p_out = 0.0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  s = PlantedPartitionSpec{};
  s.p_in = 0.1;
  s.p_out = 0.2;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  s = PlantedPartitionSpec{};
  s.clusters = 0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);
  s = PlantedPartitionSpec{};
  s.w_lo = 3.0;
  CHECK(code_of([&] { s.validate(); }) == ErrorCode::InvalidSpec);

  s = PlantedPartitionSpec{};
  s.n = 200;
  s.p_in = 0.002;
  s.p_out = 0.001;
  s.max_retries = 5;
  CHECK(code_of([&] { planted_partition_instance(s); }) ==
        ErrorCode::ConnectivityRetryExhausted);
}

TEST_CASE("image grid graph") {
  const ImageGridSpec s = flat(5, 4, {10, 20, 30});
  const GridGraph gg = image_grid_graph(s);
  CHECK(gg.graph.edge_count() == 4 * 4 + 5 * 3);
  CHECK(gg.sigma == 0.0);
  for (const auto& e : gg.graph.edges()) CHECK(e.w == 1.0);
  CHECK(gg.samples.size() == 2);
  CHECK(gg.samples.samples()[0].label == 1.0);
  CHECK(gg.samples.samples()[1].label == -1.0);

  ImageGridSpec two = flat(2, 1, {0, 0, 0});
  two.pixels[1] = {3, 4, 0};
  const GridGraph g2 = image_grid_graph(two);
  CHECK(g2.sigma == 5.0);
  CHECK(g2.graph.edges()[0].w == doctest::Approx(std::exp(-5.0)));

  ImageGridSpec three = flat(3, 1, {0, 0, 0});
  three.pixels[1] = {1, 0, 0};
  three.pixels[2] = {3, 0, 0};
  const GridGraph g3 = image_grid_graph(three);
  CHECK(g3.sigma == 1.5);
  CHECK(g3.graph.edges()[0].w == doctest::Approx(std::exp(-1.0 / 1.5)));
  CHECK(g3.graph.edges()[1].w == doctest::Approx(std::exp(-4.0 / 1.5)));

  const SyntheticImage img = synthetic_two_tone(40, 30, 3, 1);
  const GridGraph gi = image_grid_graph(img.spec);
  for (const auto& e : gi.graph.edges()) {
    CHECK(e.w > 0.0);
    CHECK(e.w <= 1.0);
  }
  CHECK(gi.sigma > 0.0);
}

TEST_CASE("image grid errors") {
  CHECK(code_of([] { image_grid_graph(flat(1, 1, {0, 0, 0})); }) == ErrorCode::DegenerateImage);
  ImageGridSpec no_bg = flat(3, 1, {0, 0, 0});
  no_bg.trimap.back() = Region::R2;
  CHECK(code_of([&] { image_grid_graph(no_bg); }) == ErrorCode::EmptyRegion);
  ImageGridSpec no_fg = flat(3, 1, {0, 0, 0});
  no_fg.trimap.front() = Region::R2;
  CHECK(code_of([&] { image_grid_graph(no_fg); }) == ErrorCode::EmptyRegion);
  ImageGridSpec short_pixels = flat(3, 2, {0, 0, 0});
  short_pixels.pixels.pop_back();
  CHECK(code_of([&] { image_grid_graph(short_pixels); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("segment") {
  const std::vector<Region> tri{Region::R1, Region::R2, Region::R2, Region::R3};
  CHECK(segment(std::vector<double>{-1.0, 0.2, -0.2, 1.0}, tri) ==
        std::vector<bool>{true, true, false, false});
  CHECK(segment(std::vector<double>{1, 0.0, 0.0, -1}, tri) ==
        std::vector<bool>{true, false, false, false});
  CHECK(code_of([&] { segment(std::vector<double>{1.0}, tri); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("synthetic two-tone image") {
  const SyntheticImage a = synthetic_two_tone(32, 32, 2, 5);
  const SyntheticImage b = synthetic_two_tone(32, 32, 2, 5);
  CHECK(a.spec.pixels == b.spec.pixels);
  CHECK(a.spec.trimap == b.spec.trimap);
  std::size_t r1 = 0, r2 = 0, r3 = 0;
  for (std::size_t i = 0; i < a.spec.trimap.size(); ++i) {
    switch (a.spec.trimap[i]) {
      case Region::R1: ++r1; CHECK(a.foreground[i]); break;
      case Region::R2: ++r2; break;
      case Region::R3: ++r3; CHECK_FALSE(a.foreground[i]); break;
    }
  }
  CHECK(r1 > 0);
  CHECK(r2 > 0);
  CHECK(r3 > 0);
}

TEST_CASE("random clustered instances") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ClusteredInstance inst = resolved_random_instance(seed);
    CHECK(connected_components(inst.graph).size() == 1);
    const std::size_t k = inst.partition.cluster_count();
    CHECK(k >= 2);
    CHECK(k <= 4);
    for (std::size_t l = 0; l < k; ++l) {
      CHECK(inst.partition.cluster(l).size() >= 3);
      CHECK(inst.partition.cluster(l).size() <= 7);
    }
    std::vector<SamplingSet::Sample> smp;
    for (NodeId i : inst.sample_nodes) smp.push_back({i, inst.truth[i]});
    const ResolveReport r = resolves(inst.graph, inst.partition, SamplingSet::create(smp));
    CHECK(r.aggregate_resolved);
  }
  const ClusteredInstance a = resolved_random_instance(9);
  const ClusteredInstance b = resolved_random_instance(9);
  CHECK(a.sample_nodes == b.sample_nodes);
  CHECK(a.truth == b.truth);
}

TEST_CASE("two clique instance") {
  const ClusteredInstance c = two_clique_instance();
  CHECK(c.graph.node_count() == 8);
  CHECK(c.graph.edge_count() == 13);
  CHECK(c.graph.weight_between(3, 4) == 1.0);
  CHECK(c.graph.weight_between(0, 3) == 2.0);
  CHECK(c.sample_nodes == std::vector<NodeId>{0, 7});
  CHECK(c.truth == GraphSignal{0, 0, 0, 0, 1, 1, 1, 1});
}

TEST_CASE("nearly empty boundary is recovered from one sample per cluster") {
  PlantedPartitionSpec spec;
  spec.p_out = 0.005;
  spec.seed = 4;
  const PlantedInstance p = planted_partition_instance(spec);
  std::vector<SamplingSet::Sample> smp;
  for (std::size_t l = 0; l < 4; ++l) {
    const NodeId i = p.partition.cluster(l)[0];
    smp.push_back({i, p.truth[i]});
  }
  SolverConfig cfg;
  cfg.max_iterations = 5000;
  const SolveReport r = slp_solve(p.graph, SamplingSet::create(smp), cfg, p.truth);
  CHECK(*r.history.back().nmse < 1e-6);
}

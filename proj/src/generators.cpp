#include "slp/generators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "slp/error.hpp"
#include "slp/random.hpp"

namespace slp {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<std::size_t> contiguous_assignment(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out(n);
  for (std::size_t l = 0; l < k; ++l) {
    for (std::size_t i = l * n / k; i < (l + 1) * n / k; ++i) out[i] = l;
  }
  return out;
}

}  // namespace

void ChainSpec::validate() const {
  if (cluster_size == 0) fail(ErrorCode::InvalidSpec, "cluster_size must be positive");
  if (n % cluster_size != 0) {
    fail(ErrorCode::InvalidSpec, "N=" + std::to_string(n) + " is not a multiple of cluster_size=" +
                                     std::to_string(cluster_size));
  }
  if (n < 2 * cluster_size) {
    fail(ErrorCode::InvalidSpec, "N=" + std::to_string(n) + " must be at least 2*cluster_size");
  }
  if (!positive(w_intra) || !positive(w_inter)) {
    fail(ErrorCode::InvalidSpec, "chain weights must be positive and finite");
  }
  if (!std::isfinite(coeff_low) || !std::isfinite(coeff_high)) {
    fail(ErrorCode::InvalidSpec, "chain coefficients must be finite");
  }
}

ChainInstance chain_instance(const ChainSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t cs = spec.cluster_size;
  const std::size_t k = n / cs;

  std::vector<WeightedEdge> edges;
  edges.reserve(n - 1);
  for (NodeId i = 0; i + 1 < n; ++i) {
    const bool inside = (i + 1) % cs != 0;
    edges.push_back({i, i + 1, inside ? spec.w_intra : spec.w_inter});
  }

  std::vector<std::size_t> assignment(n);
  GraphSignal truth(n);
  for (NodeId i = 0; i < n; ++i) {
    assignment[i] = i / cs;
    truth[i] = (i / cs) % 2 == 0 ? spec.coeff_low : spec.coeff_high;
  }

  std::vector<NodeId> picks(k);
  if (std::holds_alternative<BoundaryAdjacent>(spec.placement)) {
    for (std::size_t l = 0; l < k; ++l) picks[l] = l % 2 == 0 ? l * cs + cs - 1 : l * cs;
  } else if (std::holds_alternative<ClusterCenter>(spec.placement)) {
    for (std::size_t l = 0; l < k; ++l) picks[l] = l * cs + cs / 2;
  } else {
    Rng rng(std::get<RandomPlacement>(spec.placement).seed);
    for (std::size_t l = 0; l < k; ++l) picks[l] = l * cs + rng.below(cs);
  }

  return {build_graph(n, std::move(edges)), Partition::from_assignment(std::move(assignment)),
          truth, SamplingSet::from_signal(picks, truth)};
}

void PlantedPartitionSpec::validate() const {
  if (clusters == 0 || clusters > n) {
    fail(ErrorCode::InvalidSpec, "cluster count must lie in [1, N]");
  }
  auto prob = [](double p) { return std::isfinite(p) && p > 0.0 && p <= 1.0; };
  if (!prob(p_in) || !prob(p_out)) fail(ErrorCode::InvalidSpec, "p_in and p_out must lie in (0, 1]");
  if (!(p_in > p_out)) fail(ErrorCode::InvalidSpec, "p_in must exceed p_out");
  if (!positive(w_lo) || !positive(w_hi) || w_lo > w_hi) {
    fail(ErrorCode::InvalidSpec, "weight range must satisfy 0 < w_lo <= w_hi");
  }
  if (max_retries == 0) fail(ErrorCode::InvalidSpec, "max_retries must be positive");
}

PlantedInstance planted_partition_instance(const PlantedPartitionSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  std::vector<std::size_t> assignment = contiguous_assignment(n, spec.clusters);

  for (std::size_t attempt = 0; attempt < spec.max_retries; ++attempt) {
    Rng rng(spec.seed, attempt);
    std::vector<WeightedEdge> edges;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        const double p = assignment[i] == assignment[j] ? spec.p_in : spec.p_out;
        if (rng.bernoulli(p)) edges.push_back({i, j, rng.uniform(spec.w_lo, spec.w_hi)});
      }
    }
    DataGraph g = build_graph(n, std::move(edges));
    if (connected_components(g).size() != 1) continue;

    GraphSignal truth(n);
    for (NodeId i = 0; i < n; ++i) truth[i] = double(assignment[i] + 1);
    return {std::move(g), Partition::from_assignment(std::move(assignment)), std::move(truth),
            attempt + 1};
  }
  fail(ErrorCode::ConnectivityRetryExhausted,
       "no connected graph after " + std::to_string(spec.max_retries) + " attempts");
}

SamplingSet PlantedInstance::draw_samples(std::size_t count, std::uint64_t seed) const {
  const std::size_t n = graph.node_count();
  if (count == 0 || count > n) {
    fail(ErrorCode::InvalidArgument, "sample count must lie in [1, " + std::to_string(n) + "]");
  }
  Rng rng(seed);
  std::vector<NodeId> pool(n);
  for (NodeId i = 0; i < n; ++i) pool[i] = i;
  // Partial Fisher-Yates.
  for (std::size_t k = 0; k < count; ++k) {
    std::swap(pool[k], pool[k + rng.below(n - k)]);
  }
  pool.resize(count);
  return SamplingSet::from_signal(pool, truth);
}

GridGraph image_grid_graph(const ImageGridSpec& spec) {
  const std::size_t w = spec.width, h = spec.height, n = w * h;
  if (n < 2) fail(ErrorCode::DegenerateImage, "image needs at least 2 pixels");
  if (spec.pixels.size() != n || spec.trimap.size() != n) {
    fail(ErrorCode::DimensionMismatch,
         "image is " + std::to_string(w) + "x" + std::to_string(h) + " but has " +
             std::to_string(spec.pixels.size()) + " pixels and " +
             std::to_string(spec.trimap.size()) + " trimap entries");
  }

  std::vector<SamplingSet::Sample> seeds;
  bool any_fg = false, any_bg = false;
  for (NodeId i = 0; i < n; ++i) {
    if (spec.trimap[i] == Region::R1) {
      seeds.push_back({i, 1.0});
      any_fg = true;
    } else if (spec.trimap[i] == Region::R3) {
      seeds.push_back({i, -1.0});
      any_bg = true;
    }
  }
  if (!any_fg) fail(ErrorCode::EmptyRegion, "trimap has no foreground (R1) pixels");
  if (!any_bg) fail(ErrorCode::EmptyRegion, "trimap has no background (R3) pixels");

  auto sq_dist = [&](NodeId a, NodeId b) {
    const Rgb& p = spec.pixels[a];
    const Rgb& q = spec.pixels[b];
    const double dr = double(p.r) - q.r, dg = double(p.g) - q.g, db = double(p.b) - q.b;
    return dr * dr + dg * dg + db * db;
  };

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(w * (h - 1) + h * (w - 1));
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const NodeId i = r * w + c;
      if (c + 1 < w) pairs.emplace_back(i, i + 1);
      if (r + 1 < h) pairs.emplace_back(i, i + w);
    }
  }

  std::vector<double> dist(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    dist[e] = std::sqrt(sq_dist(pairs[e].first, pairs[e].second));
  }
  std::vector<double> sorted = dist;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double sigma = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  std::vector<WeightedEdge> edges;
  edges.reserve(pairs.size());
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    double wt = 1.0;
    if (sigma > 0.0) wt = std::max(std::exp(-dist[e] * dist[e] / sigma), kMinGridWeight);
    edges.push_back({pairs[e].first, pairs[e].second, wt});
  }
  return {build_graph(n, std::move(edges)), SamplingSet::create(std::move(seeds)), sigma};
}

std::vector<bool> segment(std::span<const double> labels, std::span<const Region> trimap) {
  if (labels.size() != trimap.size()) {
    fail(ErrorCode::DimensionMismatch, "segment: " + std::to_string(labels.size()) +
                                           " labels for " + std::to_string(trimap.size()) +
                                           " pixels");
  }
  std::vector<bool> fg(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (trimap[i]) {
      case Region::R1: fg[i] = true; break;
      case Region::R3: fg[i] = false; break;
      case Region::R2: fg[i] = labels[i] > 0.0; break;
    }
  }
  return fg;
}

SyntheticImage synthetic_two_tone(std::size_t width, std::size_t height, std::size_t band,
                                  std::uint64_t seed) {
  constexpr Rgb kFg{150, 100, 90};
  constexpr Rgb kBg{90, 120, 160};
  Rng rng(seed);
  SyntheticImage out;
  out.spec.width = width;
  out.spec.height = height;
  const double cx = 0.5 * double(width) - 0.5, cy = 0.5 * double(height) - 0.5;
  const double radius = 0.3 * double(std::min(width, height));
  auto jitter = [&](std::uint8_t v) {
    return std::uint8_t(int(v) + int(rng.below(5)) - 2);
  };
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const double d = std::hypot(double(c) - cx, double(r) - cy);
      const bool fg = d <= radius;
      const Rgb base = fg ? kFg : kBg;
      out.spec.pixels.push_back({jitter(base.r), jitter(base.g), jitter(base.b)});
      out.foreground.push_back(fg);
      Region region = Region::R2;
      if (d <= radius - double(band)) region = Region::R1;
      if (d > radius + double(band)) region = Region::R3;
      out.spec.trimap.push_back(region);
    }
  }
  return out;
}

ClusteredInstance resolved_random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = 2 + rng.below(3);
  std::vector<std::size_t> start{0};
  for (std::size_t l = 0; l < k; ++l) start.push_back(start.back() + 3 + rng.below(5));
  const std::size_t n = start.back();

  std::vector<std::size_t> assignment(n);
  for (std::size_t l = 0; l < k; ++l) {
    for (NodeId i = start[l]; i < start[l + 1]; ++i) assignment[i] = l;
  }

  std::vector<WeightedEdge> edges;
  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  auto add = [&](NodeId i, NodeId j, double w) {
    if (i == j || linked[i][j]) return false;
    linked[i][j] = linked[j][i] = 1;
    edges.push_back({std::min(i, j), std::max(i, j), w});
    return true;
  };

  for (std::size_t l = 0; l < k; ++l) {
    for (NodeId i = start[l] + 1; i < start[l + 1]; ++i) {
      add(i, start[l] + rng.below(i - start[l]), rng.uniform(1.0, 2.0));
    }
    for (NodeId i = start[l]; i < start[l + 1]; ++i) {
      for (NodeId j = i + 1; j < start[l + 1]; ++j) {
        if (rng.bernoulli(0.3)) add(i, j, rng.uniform(1.0, 2.0));
      }
    }
  }
  const std::size_t intra_count = edges.size();

  auto pick = [&](std::size_t l) { return start[l] + rng.below(start[l + 1] - start[l]); };
  for (std::size_t l = 1; l < k; ++l) {
    const std::size_t other = rng.below(l);
    add(pick(l), pick(other), rng.uniform(0.1, 0.3));
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      if (rng.bernoulli(0.3)) add(pick(a), pick(b), rng.uniform(0.1, 0.3));
    }
  }

  std::vector<double> load(n, 0.0);
  for (std::size_t e = intra_count; e < edges.size(); ++e) {
    load[edges[e].i] += edges[e].w;
    load[edges[e].j] += edges[e].w;
  }

  std::vector<char> sampled(n, 0);
  std::vector<std::size_t> witness_edge(n, SIZE_MAX);
  for (NodeId p = 0; p < n; ++p) {
    if (load[p] == 0.0 || sampled[p]) continue;
    std::vector<std::size_t> options;
    for (std::size_t e = 0; e < intra_count; ++e) {
      if (edges[e].i == p || edges[e].j == p) options.push_back(e);
    }
    const std::size_t e = options[rng.below(options.size())];
    sampled[edges[e].i == p ? edges[e].j : edges[e].i] = 1;
    witness_edge[p] = e;
  }
  for (NodeId p = 0; p < n; ++p) {
    if (load[p] == 0.0 || sampled[p]) continue;
    double& w = edges[witness_edge[p]].w;
    w = std::max(w, 2.5 * load[p]);
  }

  std::vector<double> coeffs(k);
  for (double& a : coeffs) a = rng.uniform(-5.0, 5.0);

  ClusteredInstance out{build_graph(n, std::move(edges)),
                        Partition::from_assignment(std::move(assignment)),
                        {},
                        {}};
  out.truth = clustered_signal(out.partition, coeffs);
  for (NodeId i = 0; i < n; ++i) {
    if (sampled[i]) out.sample_nodes.push_back(i);
  }
  return out;
}

ClusteredInstance two_clique_instance() {
  std::vector<WeightedEdge> edges;
  for (NodeId base : {NodeId{0}, NodeId{4}}) {
    for (NodeId i = 0; i < 4; ++i) {
      for (NodeId j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j, 2.0});
    }
  }
  edges.push_back({3, 4, 1.0});
  ClusteredInstance out{build_graph(8, std::move(edges)),
                        Partition::from_assignment({0, 0, 0, 0, 1, 1, 1, 1}),
                        {0, 0, 0, 0, 1, 1, 1, 1},
                        {0, 7}};
  return out;
}

}  // namespace slp

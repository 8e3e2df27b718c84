#include "slp/slp.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include <json.hpp>

#include "slp/baselines.hpp"
#include "slp/error.hpp"
#include "slp/generators.hpp"
#include "slp/io.hpp"
#include "slp/solver.hpp"
#include "slp/theory.hpp"

struct slp_graph {
  slp::DataGraph g;
};
struct slp_signal {
  slp::GraphSignal x;
};
struct slp_partition {
  slp::Partition f;
};
struct slp_samples {
  slp::SamplingSet m;
};
struct slp_report {
  slp::SolveReport r;
  slp_signal labels;
};
struct slp_image {
  slp::io::Image img;
};
struct slp_trimap {
  std::size_t width = 0, height = 0;
  std::vector<slp::Region> regions;
};

namespace {

thread_local std::string g_last_error;

slp_status set_error(slp_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

template <class F>
slp_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return SLP_OK;
  } catch (const slp::Error& e) {
    return set_error(static_cast<slp_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SLP_ERR_OUT_OF_MEMORY, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SLP_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(SLP_ERR_INTERNAL, "unknown error");
  }
}

template <class... P>
void require(const char* fn, P*... ptrs) {
  if (((ptrs == nullptr) || ...)) {
    slp::fail(slp::ErrorCode::InvalidArgument, std::string(fn) + ": null argument");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T, class V>
void emit(T** out, V&& value) {
  if (out) *out = new T{std::forward<V>(value)};
}

std::span<const double> truth_span(const slp_signal* truth) {
  return truth ? std::span<const double>(truth->x) : std::span<const double>();
}

nlohmann::json side_json(const slp::SideWitness& s) {
  nlohmann::json j{{"endpoint", s.endpoint}, {"self_witness", s.self_witness}};
  j["witness"] = s.witness ? nlohmann::json(*s.witness) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

extern "C" {

const char* slp_version(void) { return "1.0.0"; }

const char* slp_status_name(slp_status status) {
  switch (status) {
    case SLP_OK: return "Ok";
    case SLP_ERR_OUT_OF_MEMORY: return "OutOfMemory";
    case SLP_ERR_INTERNAL: return "Internal";
    default:
      if (status >= SLP_ERR_INVALID_ARGUMENT && status <= SLP_ERR_PARSE) {
        return slp::error_code_name(static_cast<slp::ErrorCode>(status)).data();
      }
      return "Unknown";
  }
}

const char* slp_last_error_message(void) { return g_last_error.c_str(); }

void slp_string_free(char* s) { std::free(s); }

slp_status slp_graph_create(size_t node_count, const size_t* heads, const size_t* tails,
                            const double* weights, size_t edge_count, slp_graph** out) {
  return guard([&] {
    require("slp_graph_create", out);
    if (edge_count > 0) require("slp_graph_create", heads, tails, weights);
    std::vector<slp::WeightedEdge> edges(edge_count);
    for (size_t e = 0; e < edge_count; ++e) edges[e] = {heads[e], tails[e], weights[e]};
    *out = new slp_graph{slp::build_graph(node_count, std::move(edges))};
  });
}

slp_status slp_graph_load(const char* path, slp_graph** out) {
  return guard([&] {
    require("slp_graph_load", path, out);
    *out = new slp_graph{slp::io::read_edge_list(path)};
  });
}

slp_status slp_graph_save(const slp_graph* g, const char* path) {
  return guard([&] {
    require("slp_graph_save", g, path);
    slp::io::write_edge_list(path, g->g);
  });
}

size_t slp_graph_node_count(const slp_graph* g) { return g ? g->g.node_count() : 0; }
size_t slp_graph_edge_count(const slp_graph* g) { return g ? g->g.edge_count() : 0; }

slp_status slp_graph_edge(const slp_graph* g, size_t e, size_t* i, size_t* j, double* w) {
  return guard([&] {
    require("slp_graph_edge", g);
    if (e >= g->g.edge_count()) {
      slp::fail(slp::ErrorCode::InvalidArgument, "edge id " + std::to_string(e) + " out of range");
    }
    const auto& ed = g->g.edges()[e];
    if (i) *i = ed.i;
    if (j) *j = ed.j;
    if (w) *w = ed.w;
  });
}

size_t slp_graph_component_count(const slp_graph* g) {
  return g ? slp::connected_components(g->g).size() : 0;
}

slp_status slp_graph_convergence_norm(const slp_graph* g, double* norm_out) {
  return guard([&] {
    require("slp_graph_convergence_norm", g, norm_out);
    *norm_out = slp::check_convergence_condition(g->g).norm_estimate;
  });
}

void slp_graph_free(slp_graph* g) { delete g; }

slp_status slp_signal_create(const double* values, size_t length, slp_signal** out) {
  return guard([&] {
    require("slp_signal_create", out);
    if (length > 0) require("slp_signal_create", values);
    *out = new slp_signal{slp::GraphSignal(values, values + length)};
  });
}

slp_status slp_signal_load(const char* path, size_t node_count, slp_signal** out) {
  return guard([&] {
    require("slp_signal_load", path, out);
    *out = new slp_signal{slp::io::read_signal(path, node_count)};
  });
}

slp_status slp_signal_save(const slp_signal* x, const char* path, const char* value_column) {
  return guard([&] {
    require("slp_signal_save", x, path);
    slp::io::write_signal(path, x->x, value_column ? value_column : "value");
  });
}

size_t slp_signal_length(const slp_signal* x) { return x ? x->x.size() : 0; }
const double* slp_signal_data(const slp_signal* x) { return x ? x->x.data() : nullptr; }

slp_status slp_signal_nmse(const slp_signal* estimate, const slp_signal* truth, double* out) {
  return guard([&] {
    require("slp_signal_nmse", estimate, truth, out);
    *out = slp::nmse(estimate->x, truth->x);
  });
}

void slp_signal_free(slp_signal* x) { delete x; }

slp_status slp_partition_create(const size_t* cluster_of, size_t node_count,
                                slp_partition** out) {
  return guard([&] {
    require("slp_partition_create", out);
    if (node_count > 0) require("slp_partition_create", cluster_of);
    *out = new slp_partition{slp::Partition::from_assignment(
        std::vector<std::size_t>(cluster_of, cluster_of + node_count))};
  });
}

slp_status slp_partition_load(const char* path, size_t node_count, slp_partition** out) {
  return guard([&] {
    require("slp_partition_load", path, out);
    *out = new slp_partition{slp::io::read_partition(path, node_count)};
  });
}

slp_status slp_partition_save(const slp_partition* f, const char* path) {
  return guard([&] {
    require("slp_partition_save", f, path);
    slp::io::write_partition(path, f->f);
  });
}

size_t slp_partition_cluster_count(const slp_partition* f) { return f ? f->f.cluster_count() : 0; }
void slp_partition_free(slp_partition* f) { delete f; }

slp_status slp_samples_create(const size_t* nodes, const double* labels, size_t count,
                              slp_samples** out) {
  return guard([&] {
    require("slp_samples_create", out);
    if (count > 0) require("slp_samples_create", nodes, labels);
    std::vector<slp::SamplingSet::Sample> s(count);
    for (size_t k = 0; k < count; ++k) s[k] = {nodes[k], labels[k]};
    *out = new slp_samples{slp::SamplingSet::create(std::move(s))};
  });
}

slp_status slp_samples_load(const char* path, slp_samples** out) {
  return guard([&] {
    require("slp_samples_load", path, out);
    *out = new slp_samples{slp::io::read_samples(path)};
  });
}

slp_status slp_samples_save(const slp_samples* m, const char* path) {
  return guard([&] {
    require("slp_samples_save", m, path);
    slp::io::write_samples(path, m->m);
  });
}

size_t slp_samples_count(const slp_samples* m) { return m ? m->m.size() : 0; }
void slp_samples_free(slp_samples* m) { delete m; }

void slp_chain_spec_default(slp_chain_spec* spec) {
  if (!spec) return;
  const slp::ChainSpec d;
  *spec = {d.n, d.cluster_size, d.w_intra, d.w_inter, d.coeff_low, d.coeff_high,
           SLP_PLACEMENT_BOUNDARY_ADJACENT, 0};
}

slp_status slp_generate_chain(const slp_chain_spec* spec, slp_graph** graph,
                              slp_partition** partition, slp_signal** truth,
                              slp_samples** samples) {
  return guard([&] {
    require("slp_generate_chain", spec);
    slp::ChainSpec cs;
    cs.n = spec->n;
    cs.cluster_size = spec->cluster_size;
    cs.w_intra = spec->w_intra;
    cs.w_inter = spec->w_inter;
    cs.coeff_low = spec->coeff_low;
    cs.coeff_high = spec->coeff_high;
    switch (spec->placement) {
      case SLP_PLACEMENT_BOUNDARY_ADJACENT: cs.placement = slp::BoundaryAdjacent{}; break;
      case SLP_PLACEMENT_CLUSTER_CENTER: cs.placement = slp::ClusterCenter{}; break;
      case SLP_PLACEMENT_RANDOM: cs.placement = slp::RandomPlacement{spec->seed}; break;
      default: slp::fail(slp::ErrorCode::InvalidSpec, "unknown sample placement");
    }
    slp::ChainInstance inst = slp::chain_instance(cs);
    emit(graph, std::move(inst.graph));
    emit(partition, std::move(inst.partition));
    emit(truth, std::move(inst.truth));
    emit(samples, std::move(inst.samples));
  });
}

void slp_planted_spec_default(slp_planted_spec* spec) {
  if (!spec) return;
  const slp::PlantedPartitionSpec d;
  *spec = {d.n, d.clusters, d.p_in, d.p_out, d.w_lo, d.w_hi, d.seed, d.max_retries, 9, 0};
}

slp_status slp_generate_planted(const slp_planted_spec* spec, slp_graph** graph,
                                slp_partition** partition, slp_signal** truth,
                                slp_samples** samples) {
  return guard([&] {
    require("slp_generate_planted", spec);
    slp::PlantedPartitionSpec ps;
    ps.n = spec->n;
    ps.clusters = spec->clusters;
    ps.p_in = spec->p_in;
    ps.p_out = spec->p_out;
    ps.w_lo = spec->w_lo;
    ps.w_hi = spec->w_hi;
    ps.seed = spec->seed;
    ps.max_retries = spec->max_retries;
    slp::PlantedInstance inst = slp::planted_partition_instance(ps);
    std::optional<slp::SamplingSet> m;
    if (samples) m = inst.draw_samples(spec->sample_count, spec->sample_seed);
    emit(graph, std::move(inst.graph));
    emit(partition, std::move(inst.partition));
    emit(truth, std::move(inst.truth));
    if (samples) *samples = new slp_samples{std::move(*m)};
  });
}

slp_status slp_image_load_ppm(const char* path, slp_image** out) {
  return guard([&] {
    require("slp_image_load_ppm", path, out);
    *out = new slp_image{slp::io::read_ppm(path)};
  });
}

slp_status slp_image_save_ppm(const slp_image* img, const char* path) {
  return guard([&] {
    require("slp_image_save_ppm", img, path);
    slp::io::write_ppm(path, img->img);
  });
}

size_t slp_image_width(const slp_image* img) { return img ? img->img.width : 0; }
size_t slp_image_height(const slp_image* img) { return img ? img->img.height : 0; }
void slp_image_free(slp_image* img) { delete img; }

slp_status slp_trimap_load_pgm(const char* path, slp_trimap** out) {
  return guard([&] {
    require("slp_trimap_load_pgm", path, out);
    const slp::io::GrayImage gray = slp::io::read_pgm(path);
    *out = new slp_trimap{gray.width, gray.height, slp::io::trimap_from_pgm(gray)};
  });
}

slp_status slp_trimap_save_pgm(const slp_trimap* t, const char* path) {
  return guard([&] {
    require("slp_trimap_save_pgm", t, path);
    slp::io::write_pgm(path, slp::io::trimap_to_pgm(t->width, t->height, t->regions));
  });
}

size_t slp_trimap_width(const slp_trimap* t) { return t ? t->width : 0; }
size_t slp_trimap_height(const slp_trimap* t) { return t ? t->height : 0; }
void slp_trimap_free(slp_trimap* t) { delete t; }

slp_status slp_generate_synthetic_image(size_t width, size_t height, size_t band, uint64_t seed,
                                        slp_image** image, slp_trimap** trimap,
                                        uint8_t* truth_mask) {
  return guard([&] {
    slp::SyntheticImage syn = slp::synthetic_two_tone(width, height, band, seed);
    if (truth_mask) {
      for (size_t i = 0; i < syn.foreground.size(); ++i) truth_mask[i] = syn.foreground[i] ? 255 : 0;
    }
    if (image) *image = new slp_image{{width, height, std::move(syn.spec.pixels)}};
    if (trimap) *trimap = new slp_trimap{width, height, std::move(syn.spec.trimap)};
  });
}

slp_status slp_grid_graph(const slp_image* img, const slp_trimap* trimap, slp_graph** graph,
                          slp_samples** samples, double* sigma) {
  return guard([&] {
    require("slp_grid_graph", img, trimap);
    if (img->img.width != trimap->width || img->img.height != trimap->height) {
      slp::fail(slp::ErrorCode::DimensionMismatch,
                "image is " + std::to_string(img->img.width) + "x" +
                    std::to_string(img->img.height) + ", trimap is " +
                    std::to_string(trimap->width) + "x" + std::to_string(trimap->height));
    }
    slp::ImageGridSpec spec{img->img.width, img->img.height, img->img.pixels, trimap->regions};
    slp::GridGraph gg = slp::image_grid_graph(spec);
    if (sigma) *sigma = gg.sigma;
    emit(graph, std::move(gg.graph));
    emit(samples, std::move(gg.samples));
  });
}

slp_status slp_segment(const slp_signal* labels, const slp_trimap* trimap, uint8_t* mask) {
  return guard([&] {
    require("slp_segment", labels, trimap, mask);
    const std::vector<bool> fg = slp::segment(labels->x, trimap->regions);
    for (size_t i = 0; i < fg.size(); ++i) mask[i] = fg[i] ? 255 : 0;
  });
}

slp_status slp_mask_save_pgm(const uint8_t* mask, size_t width, size_t height, const char* path) {
  return guard([&] {
    require("slp_mask_save_pgm", mask, path);
    slp::io::write_pgm(path, {width, height, std::vector<std::uint8_t>(mask, mask + width * height)});
  });
}

void slp_solve_config_default(slp_solve_config* cfg) {
  if (!cfg) return;
  const slp::SolverConfig d;
  const slp::ObjectiveDecrease od;
  *cfg = {d.max_iterations, d.history_stride, SLP_STOP_FIXED_ITERATIONS, od.tol, od.window,
          d.threads, d.deterministic ? 1 : 0, d.split_components ? 1 : 0, 0};
}

slp_status slp_solve(const slp_graph* g, const slp_samples* m, const slp_solve_config* cfg,
                     const slp_signal* truth, slp_report** out) {
  return guard([&] {
    require("slp_solve", g, m, cfg, out);
    slp::SolverConfig sc;
    sc.max_iterations = cfg->max_iterations;
    sc.history_stride = cfg->history_stride;
    if (cfg->stopping == SLP_STOP_OBJECTIVE_DECREASE) {
      sc.stopping = slp::ObjectiveDecrease{cfg->tol, cfg->window};
    } else if (cfg->stopping != SLP_STOP_FIXED_ITERATIONS) {
      slp::fail(slp::ErrorCode::InvalidArgument, "unknown stopping rule");
    }
    sc.threads = cfg->threads;
    sc.deterministic = cfg->deterministic != 0;
    sc.split_components = cfg->split_components != 0;
    slp::SolveReport r = cfg->message_passing
                             ? slp::slp_solve_message_passing(g->g, m->m, sc, truth_span(truth))
                             : slp::slp_solve(g->g, m->m, sc, truth_span(truth));
    slp_signal labels{r.labels};
    *out = new slp_report{std::move(r), std::move(labels)};
  });
}

void slp_lp_config_default(slp_lp_config* cfg) {
  if (!cfg) return;
  const slp::LpConfig d;
  *cfg = {d.max_iterations, d.tol, d.history_stride, d.split_components ? 1 : 0};
}

slp_status slp_lp_solve(const slp_graph* g, const slp_samples* m, const slp_lp_config* cfg,
                        const slp_signal* truth, slp_report** out) {
  return guard([&] {
    require("slp_lp_solve", g, m, cfg, out);
    slp::LpConfig lc;
    lc.max_iterations = cfg->max_iterations;
    lc.tol = cfg->tol;
    lc.history_stride = cfg->history_stride;
    lc.split_components = cfg->split_components != 0;
    slp::SolveReport r = slp::lp_solve(g->g, m->m, lc, truth_span(truth));
    slp_signal labels{r.labels};
    *out = new slp_report{std::move(r), std::move(labels)};
  });
}

size_t slp_report_iterations(const slp_report* r) { return r ? r->r.iterations_run : 0; }
const slp_signal* slp_report_labels(const slp_report* r) { return r ? &r->labels : nullptr; }
size_t slp_report_history_size(const slp_report* r) { return r ? r->r.history.size() : 0; }

slp_status slp_report_history_entry(const slp_report* r, size_t index, size_t* k, double* tv,
                                    double* nmse, int* has_nmse, double* max_abs_dual) {
  return guard([&] {
    require("slp_report_history_entry", r);
    if (index >= r->r.history.size()) {
      slp::fail(slp::ErrorCode::InvalidArgument,
                "history index " + std::to_string(index) + " out of range");
    }
    const slp::HistoryEntry& h = r->r.history[index];
    if (k) *k = h.k;
    if (tv) *tv = h.tv;
    if (nmse) *nmse = h.nmse.value_or(0.0);
    if (has_nmse) *has_nmse = h.nmse.has_value() ? 1 : 0;
    if (max_abs_dual) *max_abs_dual = h.max_abs_dual;
  });
}

slp_status slp_report_save_history(const slp_report* r, const char* path) {
  return guard([&] {
    require("slp_report_save_history", r, path);
    slp::io::write_history(path, r->r.history);
  });
}

void slp_report_free(slp_report* r) { delete r; }

slp_status slp_check_resolve(const slp_graph* g, const slp_partition* f, const slp_samples* m,
                             char** json, int* resolved) {
  return guard([&] {
    require("slp_check_resolve", g, f, m, json);
    const slp::ResolveReport rr = slp::resolves(g->g, f->f, m->m);
    nlohmann::json j;
    j["check"] = "resolve";
    j["resolved"] = rr.resolved;
    j["aggregate_resolved"] = rr.aggregate_resolved;
    j["violations"] = rr.violations;
    j["boundary"] = nlohmann::json::array();
    for (const auto& b : rr.boundary) {
      const auto& ed = g->g.edges()[b.edge];
      j["boundary"].push_back({{"edge", b.edge},
                               {"i", ed.i},
                               {"j", ed.j},
                               {"weight", b.weight},
                               {"covered", b.covered()},
                               {"side_i", side_json(b.side_i)},
                               {"side_j", side_json(b.side_j)}});
    }
    *json = dup_string(j.dump(2));
    if (resolved) *resolved = rr.resolved ? 1 : 0;
  });
}

slp_status slp_check_nnsp(const slp_graph* g, const slp_partition* f, const slp_samples* m,
                          size_t restarts, size_t steps, uint64_t seed, char** json,
                          int* violation) {
  return guard([&] {
    require("slp_check_nnsp", g, f, m, json);
    const std::vector<slp::EdgeId> edges = slp::boundary(g->g, f->f);
    const slp::NnspEstimate est =
        slp::nnsp_ratio_estimate(g->g, m->m, edges, {restarts, steps, seed});
    nlohmann::json j;
    j["check"] = "nnsp";
    j["edge_set"] = est.edge_set;
    j["best_ratio"] = est.best_ratio;
    j["best_restart"] = est.best_restart;
    j["certified_violation"] = est.certified_violation;
    j["witness"] = est.witness;
    j["budget"] = {{"restarts", restarts}, {"steps", steps}, {"seed", seed}};
    *json = dup_string(j.dump(2));
    if (violation) *violation = est.certified_violation ? 1 : 0;
  });
}

}  // extern "C"

// Command-line front end. Talks to the library only through slp.h.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "slp/slp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kInternal = 1, kUsage = 2, kCheckFailed = 3, kIo = 4, kNumerical = 5 };

struct Failure {
  slp_status status;
  std::string message;
};

int exit_code(slp_status s) {
  switch (s) {
    case SLP_OK: return kOk;
    case SLP_ERR_IO:
    case SLP_ERR_PARSE: return kIo;
    case SLP_ERR_NON_FINITE_ITERATE: return kNumerical;
    case SLP_ERR_OUT_OF_MEMORY:
    case SLP_ERR_INTERNAL: return kInternal;
    default: return kUsage;
  }
}

void check(slp_status s) {
  if (s != SLP_OK) throw Failure{s, slp_last_error_message()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Graph = std::unique_ptr<slp_graph, Deleter<slp_graph, slp_graph_free>>;
using Signal = std::unique_ptr<slp_signal, Deleter<slp_signal, slp_signal_free>>;
using Part = std::unique_ptr<slp_partition, Deleter<slp_partition, slp_partition_free>>;
using Samples = std::unique_ptr<slp_samples, Deleter<slp_samples, slp_samples_free>>;
using Report = std::unique_ptr<slp_report, Deleter<slp_report, slp_report_free>>;
using Image = std::unique_ptr<slp_image, Deleter<slp_image, slp_image_free>>;
using Trimap = std::unique_ptr<slp_trimap, Deleter<slp_trimap, slp_trimap_free>>;

// Output files land in a sibling staging directory and are moved into
// place only after every write succeeded.
class Staging {
 public:
  explicit Staging(fs::path out) : out_(std::move(out)) {
    const fs::path parent = out_.has_parent_path() ? out_.parent_path() : fs::path(".");
    fs::create_directories(parent);
    dir_ = parent / (".staging-" + out_.filename().string() + "-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::string file(const std::string& name) {
    names_.push_back(name);
    return (dir_ / name).string();
  }

  std::vector<std::string> outputs() const {
    std::vector<std::string> out;
    for (const auto& n : names_) out.push_back((out_ / n).string());
    return out;
  }

  void commit() {
    fs::create_directories(out_);
    for (const auto& n : names_) fs::rename(dir_ / n, out_ / n);
  }

 private:
  fs::path out_, dir_;
  std::vector<std::string> names_;
};

struct RunContext {
  std::string subcommand;
  json params = json::object();
  json seeds = json::object();
  json inputs = json::object();
  std::vector<std::string> argv;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

void write_manifest(Staging& st, const RunContext& ctx) {
  const std::string path = st.file("manifest.json");
  json m;
  m["subcommand"] = ctx.subcommand;
  m["params"] = ctx.params;
  m["seeds"] = ctx.seeds;
  m["inputs"] = ctx.inputs;
  m["outputs"] = st.outputs();
  m["version"] = slp_version();
  m["argv"] = ctx.argv;
  m["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
  std::ofstream out(path);
  out << m.dump(2) << '\n';
  if (!out) throw Failure{SLP_ERR_IO, "cannot write " + path};
}

std::size_t default_stride(std::size_t n) { return n <= 100000 ? 1 : 10; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse label propagation on weighted graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(slp_version()));

  RunContext ctx;
  for (int k = 0; k < argc; ++k) ctx.argv.emplace_back(argv[k]);
  std::function<int()> action;

  // generate ----------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Build a synthetic instance");
  gen->require_subcommand(1);

  slp_chain_spec chain;
  slp_chain_spec_default(&chain);
  std::string placement = "boundary";
  std::string chain_out;
  auto* gchain = gen->add_subcommand("chain", "Clustered chain graph");
  gchain->add_option("--n", chain.n, "Number of nodes")->capture_default_str();
  gchain->add_option("--cluster-size", chain.cluster_size)->capture_default_str();
  gchain->add_option("--w-intra", chain.w_intra)->capture_default_str();
  gchain->add_option("--w-inter", chain.w_inter)->capture_default_str();
  gchain->add_option("--coeff-low", chain.coeff_low)->capture_default_str();
  gchain->add_option("--coeff-high", chain.coeff_high)->capture_default_str();
  gchain->add_option("--placement", placement, "boundary | center | random")
      ->check(CLI::IsMember({"boundary", "center", "random"}))
      ->capture_default_str();
  gchain->add_option("--seed", chain.seed, "Seed for random placement")->capture_default_str();
  gchain->add_option("--out", chain_out, "Output directory")->required();
  gchain->callback([&] {
    action = [&] {
      chain.placement = placement == "boundary" ? SLP_PLACEMENT_BOUNDARY_ADJACENT
                        : placement == "center" ? SLP_PLACEMENT_CLUSTER_CENTER
                                                : SLP_PLACEMENT_RANDOM;
      ctx.subcommand = "generate chain";
      ctx.params = {{"n", chain.n},           {"cluster_size", chain.cluster_size},
                    {"w_intra", chain.w_intra}, {"w_inter", chain.w_inter},
                    {"coeff_low", chain.coeff_low}, {"coeff_high", chain.coeff_high},
                    {"placement", placement}};
      ctx.seeds = {{"placement", chain.seed}};
      slp_graph* g = nullptr;
      slp_partition* f = nullptr;
      slp_signal* t = nullptr;
      slp_samples* m = nullptr;
      check(slp_generate_chain(&chain, &g, &f, &t, &m));
      Graph gg(g);
      Part ff(f);
      Signal tt(t);
      Samples mm(m);
      Staging st(chain_out);
      check(slp_graph_save(g, st.file("graph.tsv").c_str()));
      check(slp_signal_save(t, st.file("truth.csv").c_str(), "value"));
      check(slp_partition_save(f, st.file("partition.csv").c_str()));
      check(slp_samples_save(m, st.file("samples.csv").c_str()));
      write_manifest(st, ctx);
      st.commit();
      return int(kOk);
    };
  });

  slp_planted_spec planted;
  slp_planted_spec_default(&planted);
  std::string planted_out;
  auto* gplanted = gen->add_subcommand("planted", "Planted-partition community graph");
  gplanted->add_option("--n", planted.n)->capture_default_str();
  gplanted->add_option("--clusters", planted.clusters)->capture_default_str();
  gplanted->add_option("--p-in", planted.p_in)->capture_default_str();
  gplanted->add_option("--p-out", planted.p_out)->capture_default_str();
  gplanted->add_option("--w-lo", planted.w_lo)->capture_default_str();
  gplanted->add_option("--w-hi", planted.w_hi)->capture_default_str();
  gplanted->add_option("--seed", planted.seed, "Graph seed")->capture_default_str();
  gplanted->add_option("--max-retries", planted.max_retries)->capture_default_str();
  gplanted->add_option("--samples", planted.sample_count, "Sampling set size")
      ->capture_default_str();
  gplanted->add_option("--sample-seed", planted.sample_seed)->capture_default_str();
  gplanted->add_option("--out", planted_out, "Output directory")->required();
  gplanted->callback([&] {
    action = [&] {
      ctx.subcommand = "generate planted";
      ctx.params = {{"n", planted.n},         {"clusters", planted.clusters},
                    {"p_in", planted.p_in},   {"p_out", planted.p_out},
                    {"w_lo", planted.w_lo},   {"w_hi", planted.w_hi},
                    {"max_retries", planted.max_retries}, {"samples", planted.sample_count}};
      ctx.seeds = {{"graph", planted.seed}, {"samples", planted.sample_seed}};
      slp_graph* g = nullptr;
      slp_partition* f = nullptr;
      slp_signal* t = nullptr;
      slp_samples* m = nullptr;
      check(slp_generate_planted(&planted, &g, &f, &t, &m));
      Graph gg(g);
      Part ff(f);
      Signal tt(t);
      Samples mm(m);
      Staging st(planted_out);
      check(slp_graph_save(g, st.file("graph.tsv").c_str()));
      check(slp_signal_save(t, st.file("truth.csv").c_str(), "value"));
      check(slp_partition_save(f, st.file("partition.csv").c_str()));
      check(slp_samples_save(m, st.file("samples.csv").c_str()));
      write_manifest(st, ctx);
      st.commit();
      return int(kOk);
    };
  });

  std::size_t grid_w = 32, grid_h = 32, grid_band = 2;
  std::uint64_t grid_seed = 0;
  std::string grid_out;
  auto* ggrid = gen->add_subcommand("grid", "Synthetic two-tone image with trimap");
  ggrid->add_option("--width", grid_w)->capture_default_str();
  ggrid->add_option("--height", grid_h)->capture_default_str();
  ggrid->add_option("--band", grid_band, "Unknown band half-width in pixels")
      ->capture_default_str();
  ggrid->add_option("--seed", grid_seed, "Noise seed")->capture_default_str();
  ggrid->add_option("--out", grid_out, "Output directory")->required();
  ggrid->callback([&] {
    action = [&] {
      ctx.subcommand = "generate grid";
      ctx.params = {{"width", grid_w}, {"height", grid_h}, {"band", grid_band}};
      ctx.seeds = {{"noise", grid_seed}};
      slp_image* img = nullptr;
      slp_trimap* tri = nullptr;
      std::vector<std::uint8_t> truth(grid_w * grid_h);
      check(slp_generate_synthetic_image(grid_w, grid_h, grid_band, grid_seed, &img, &tri,
                                         truth.data()));
      Image ii(img);
      Trimap tt(tri);
      Staging st(grid_out);
      check(slp_image_save_ppm(img, st.file("image.ppm").c_str()));
      check(slp_trimap_save_pgm(tri, st.file("trimap.pgm").c_str()));
      check(slp_mask_save_pgm(truth.data(), grid_w, grid_h, st.file("truth_mask.pgm").c_str()));
      write_manifest(st, ctx);
      st.commit();
      return int(kOk);
    };
  });

  // solve -------------------------------------------------------------
  std::string method = "slp", graph_path, samples_path, truth_path, solve_out;
  std::size_t iters = 200, stride = 0;
  unsigned threads = 1;
  bool message_passing = false;
  double lp_tol = 1e-9;
  auto* solve = app.add_subcommand("solve", "Propagate labels from a sampling set");
  solve->add_option("--method", method, "slp | lp")
      ->check(CLI::IsMember({"slp", "lp"}))
      ->capture_default_str();
  solve->add_option("--graph", graph_path, "Edge list (TSV)")->required();
  solve->add_option("--samples", samples_path, "Sampled labels (CSV)")->required();
  solve->add_option("--truth", truth_path, "Ground truth (CSV) for NMSE history");
  solve->add_option("--iters", iters)->capture_default_str();
  solve->add_option("--history-stride", stride, "Default 1, or 10 above 1e5 nodes");
  solve->add_option("--threads", threads)->capture_default_str();
  solve->add_flag("--message-passing", message_passing, "Use the node/edge update form");
  solve->add_option("--tol", lp_tol, "LP stopping tolerance")->capture_default_str();
  solve->add_option("--out", solve_out, "Output directory")->required();
  solve->callback([&] {
    action = [&] {
      ctx.subcommand = "solve";
      ctx.inputs = {{"graph", graph_path}, {"samples", samples_path}};
      if (!truth_path.empty()) ctx.inputs["truth"] = truth_path;
      slp_graph* g = nullptr;
      check(slp_graph_load(graph_path.c_str(), &g));
      Graph gg(g);
      slp_samples* m = nullptr;
      check(slp_samples_load(samples_path.c_str(), &m));
      Samples mm(m);
      Signal tt;
      if (!truth_path.empty()) {
        slp_signal* t = nullptr;
        check(slp_signal_load(truth_path.c_str(), slp_graph_node_count(g), &t));
        tt.reset(t);
      }
      const std::size_t hs = stride ? stride : default_stride(slp_graph_node_count(g));
      ctx.params = {{"method", method}, {"iters", iters}, {"history_stride", hs},
                    {"threads", threads}};
      slp_report* r = nullptr;
      if (method == "slp") {
        slp_solve_config cfg;
        slp_solve_config_default(&cfg);
        cfg.max_iterations = iters;
        cfg.history_stride = hs;
        cfg.threads = threads;
        cfg.deterministic = threads <= 1;
        cfg.message_passing = message_passing ? 1 : 0;
        ctx.params["message_passing"] = message_passing;
        check(slp_solve(g, m, &cfg, tt.get(), &r));
      } else {
        slp_lp_config cfg;
        slp_lp_config_default(&cfg);
        cfg.max_iterations = iters;
        cfg.history_stride = hs;
        cfg.tol = lp_tol;
        ctx.params["tol"] = lp_tol;
        check(slp_lp_solve(g, m, &cfg, tt.get(), &r));
      }
      Report rr(r);
      Staging st(solve_out);
      check(slp_signal_save(slp_report_labels(r), st.file("labels.csv").c_str(), "label"));
      check(slp_report_save_history(r, st.file("history.csv").c_str()));
      write_manifest(st, ctx);
      st.commit();
      return int(kOk);
    };
  });

  // segment -----------------------------------------------------------
  std::string image_path, trimap_path, segment_out;
  std::size_t seg_iters = 500;
  auto* seg = app.add_subcommand("segment", "Foreground extraction from an image and trimap");
  seg->add_option("--image", image_path, "PPM image (P3/P6)")->required();
  seg->add_option("--trimap", trimap_path, "PGM trimap (P2/P5)")->required();
  seg->add_option("--iters", seg_iters)->capture_default_str();
  seg->add_option("--out", segment_out, "Output directory")->required();
  seg->callback([&] {
    action = [&] {
      ctx.subcommand = "segment";
      ctx.inputs = {{"image", image_path}, {"trimap", trimap_path}};
      ctx.params = {{"iters", seg_iters}};
      slp_image* img = nullptr;
      check(slp_image_load_ppm(image_path.c_str(), &img));
      Image ii(img);
      slp_trimap* tri = nullptr;
      check(slp_trimap_load_pgm(trimap_path.c_str(), &tri));
      Trimap tt(tri);
      slp_graph* g = nullptr;
      slp_samples* m = nullptr;
      double sigma = 0.0;
      check(slp_grid_graph(img, tri, &g, &m, &sigma));
      Graph gg(g);
      Samples mm(m);
      ctx.params["sigma"] = sigma;
      slp_solve_config cfg;
      slp_solve_config_default(&cfg);
      cfg.max_iterations = seg_iters;
      cfg.history_stride = default_stride(slp_graph_node_count(g));
      slp_report* r = nullptr;
      check(slp_solve(g, m, &cfg, nullptr, &r));
      Report rr(r);
      const std::size_t w = slp_image_width(img), h = slp_image_height(img);
      std::vector<std::uint8_t> mask(w * h);
      check(slp_segment(slp_report_labels(r), tri, mask.data()));
      Staging st(segment_out);
      check(slp_mask_save_pgm(mask.data(), w, h, st.file("mask.pgm").c_str()));
      check(slp_signal_save(slp_report_labels(r), st.file("labels.csv").c_str(), "label"));
      check(slp_report_save_history(r, st.file("history.csv").c_str()));
      write_manifest(st, ctx);
      st.commit();
      return int(kOk);
    };
  });

  // check -------------------------------------------------------------
  auto* chk = app.add_subcommand("check", "Recovery conditions for a sampling set");
  chk->require_subcommand(1);
  std::string c_graph, c_partition, c_samples;
  std::size_t restarts = 100, steps = 200;
  std::uint64_t nnsp_seed = 0;
  auto add_inputs = [&](CLI::App* sub) {
    sub->add_option("--graph", c_graph, "Edge list (TSV)")->required();
    sub->add_option("--partition", c_partition, "Cluster assignment (CSV)")->required();
    sub->add_option("--samples", c_samples, "Sampled labels (CSV)")->required();
  };
  auto load_inputs = [&](Graph& gg, Part& ff, Samples& mm) {
    slp_graph* g = nullptr;
    check(slp_graph_load(c_graph.c_str(), &g));
    gg.reset(g);
    slp_partition* f = nullptr;
    check(slp_partition_load(c_partition.c_str(), slp_graph_node_count(g), &f));
    ff.reset(f);
    slp_samples* m = nullptr;
    check(slp_samples_load(c_samples.c_str(), &m));
    mm.reset(m);
  };

  auto* cres = chk->add_subcommand("resolve", "Witness check for every boundary edge");
  add_inputs(cres);
  cres->callback([&] {
    action = [&] {
      Graph gg;
      Part ff;
      Samples mm;
      load_inputs(gg, ff, mm);
      char* text = nullptr;
      int resolved = 0;
      check(slp_check_resolve(gg.get(), ff.get(), mm.get(), &text, &resolved));
      std::cout << text << '\n';
      slp_string_free(text);
      return resolved ? int(kOk) : int(kCheckFailed);
    };
  });

  auto* cnnsp = chk->add_subcommand("nnsp", "Search for a nullspace-property violation");
  add_inputs(cnnsp);
  cnnsp->add_option("--restarts", restarts)->capture_default_str();
  cnnsp->add_option("--steps", steps)->capture_default_str();
  cnnsp->add_option("--seed", nnsp_seed)->capture_default_str();
  cnnsp->callback([&] {
    action = [&] {
      Graph gg;
      Part ff;
      Samples mm;
      load_inputs(gg, ff, mm);
      char* text = nullptr;
      int violation = 0;
      check(slp_check_nnsp(gg.get(), ff.get(), mm.get(), restarts, steps, nnsp_seed, &text,
                           &violation));
      std::cout << text << '\n';
      slp_string_free(text);
      return violation ? int(kCheckFailed) : int(kOk);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const Failure& f) {
    std::cerr << "error: " << slp_status_name(f.status) << ": " << f.message << '\n';
    return exit_code(f.status);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: Io: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "slp/generators.hpp"
#include "slp/graph.hpp"
#include "slp/signals.hpp"
#include "slp/solver.hpp"

namespace slp::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Tab-separated `i<TAB>j<TAB>w` lines. `#` starts a comment; a
/// `# nodes N` line fixes the node count (otherwise max id + 1).
/// Throws Io, Parse (with line number) and the build_graph errors.
DataGraph read_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, const DataGraph& g);

/// `node_id,value` with a header line; every node exactly once.
GraphSignal read_signal(const std::filesystem::path& path, std::size_t node_count);
void write_signal(const std::filesystem::path& path, std::span<const double> x,
                  const std::string& value_column = "value");

/// `node_id,cluster_id`.
Partition read_partition(const std::filesystem::path& path, std::size_t node_count);
void write_partition(const std::filesystem::path& path, const Partition& f);

/// `node_id,label`.
SamplingSet read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const SamplingSet& m);

/// `k,tv,nmse,max_abs_dual`; nmse left empty when not recorded.
void write_history(const std::filesystem::path& path, std::span<const HistoryEntry> history);

struct Image {
  std::size_t width = 0, height = 0;
  std::vector<Rgb> pixels;
};

/// PPM, binary (P6) or ASCII (P3), maxval 255.
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& img);

struct GrayImage {
  std::size_t width = 0, height = 0;
  std::vector<std::uint8_t> values;
};

/// PGM, binary (P5) or ASCII (P2), maxval 255.
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

/// 0 -> R3, 128 -> R2, 255 -> R1. Throws Parse for any other value.
std::vector<Region> trimap_from_pgm(const GrayImage& img);
GrayImage trimap_to_pgm(std::size_t width, std::size_t height, std::span<const Region> trimap);
/// 255 = foreground, 0 = background.
GrayImage mask_to_pgm(std::size_t width, std::size_t height, const std::vector<bool>& mask);

}  // namespace slp::io

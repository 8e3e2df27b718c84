#include "slp/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string_view>

#include "slp/error.hpp"

namespace slp::io {

namespace {

namespace fs = std::filesystem;

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k) {
    if (k == s.size() || s[k] == sep) {
      out.push_back(trim(s.substr(start, k - start)));
      start = k + 1;
    }
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::size_t parse_id(std::string_view s, const fs::path& path, std::size_t line) {
  std::size_t v = 0;
  if (!parse_number(s, v)) {
    fail(ErrorCode::Parse, where(path, line) + "expected a node id, got '" + std::string(s) + "'");
  }
  return v;
}

double parse_value(std::string_view s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_number(s, v) || !std::isfinite(v)) {
    fail(ErrorCode::Parse, where(path, line) + "expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to " + path.string() + " failed");
}

bool is_header(std::string_view line) {
  return !line.empty() && !(std::isdigit(static_cast<unsigned char>(line.front())) ||
                            line.front() == '-' || line.front() == '+' || line.front() == '.');
}

// Two-column CSV rows after an optional header line.
struct Row {
  std::size_t line;
  std::string_view key, value;
};

std::vector<Row> read_pairs(const fs::path& path, std::string& storage) {
  std::ifstream in = open_in(path);
  storage.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  std::vector<Row> rows;
  std::size_t line_no = 0;
  bool first = true;
  for (std::string_view raw : split(storage, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (first && is_header(line)) {
      first = false;
      continue;
    }
    first = false;
    const auto cols = split(line, ',');
    if (cols.size() != 2) {
      fail(ErrorCode::Parse, where(path, line_no) + "expected 2 comma-separated columns, got " +
                                 std::to_string(cols.size()));
    }
    rows.push_back({line_no, cols[0], cols[1]});
  }
  return rows;
}

template <class T, class Parse>
std::vector<T> dense_column(const fs::path& path, std::size_t node_count, Parse parse) {
  std::string storage;
  std::vector<T> out(node_count);
  std::vector<char> seen(node_count, 0);
  for (const Row& r : read_pairs(path, storage)) {
    const std::size_t i = parse_id(r.key, path, r.line);
    if (i >= node_count) {
      fail(ErrorCode::Parse, where(path, r.line) + "node " + std::to_string(i) +
                                 " out of range [0, " + std::to_string(node_count) + ")");
    }
    if (seen[i]) fail(ErrorCode::Parse, where(path, r.line) + "node " + std::to_string(i) + " repeated");
    seen[i] = 1;
    out[i] = parse(r.value, r.line);
  }
  const auto missing = std::find(seen.begin(), seen.end(), 0);
  if (missing != seen.end()) {
    fail(ErrorCode::Parse, path.string() + ": no entry for node " +
                               std::to_string(missing - seen.begin()));
  }
  return out;
}

// Whitespace/comment tokenizer for the netpbm headers.
class PnmReader {
 public:
  PnmReader(const fs::path& path) : path_(path) {
    std::ifstream in = open_in(path, std::ios::binary);
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  std::string token() {
    skip_space();
    std::string t;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      t.push_back(data_[pos_++]);
    }
    if (t.empty()) fail(ErrorCode::Parse, path_.string() + ": unexpected end of file");
    return t;
  }

  std::size_t number() {
    const std::string t = token();
    std::size_t v = 0;
    if (!parse_number(std::string_view(t), v)) {
      fail(ErrorCode::Parse, path_.string() + ": expected an integer, got '" + t + "'");
    }
    return v;
  }

  // Binary payload starts after exactly one whitespace byte.
  std::string_view raster(std::size_t bytes) {
    ++pos_;
    if (pos_ + bytes > data_.size()) {
      fail(ErrorCode::Parse, path_.string() + ": raster truncated, expected " +
                                 std::to_string(bytes) + " bytes");
    }
    return std::string_view(data_).substr(pos_, bytes);
  }

  const fs::path& path() const { return path_; }

 private:
  void skip_space() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  fs::path path_;
  std::string data_;
  std::size_t pos_ = 0;
};

struct PnmHeader {
  bool binary;
  std::size_t width, height;
};

PnmHeader read_header(PnmReader& rd, std::string_view ascii, std::string_view binary) {
  const std::string magic = rd.token();
  if (magic != ascii && magic != binary) {
    fail(ErrorCode::Parse, rd.path().string() + ": expected " + std::string(ascii) + " or " +
                               std::string(binary) + ", got '" + magic + "'");
  }
  PnmHeader h{magic == binary, rd.number(), rd.number()};
  const std::size_t maxval = rd.number();
  if (maxval != 255) {
    fail(ErrorCode::Parse, rd.path().string() + ": only maxval 255 is supported, got " +
                               std::to_string(maxval));
  }
  return h;
}

std::vector<std::uint8_t> read_samples_raw(PnmReader& rd, const PnmHeader& h, std::size_t count) {
  std::vector<std::uint8_t> out(count);
  if (h.binary) {
    const std::string_view bytes = rd.raster(count);
    std::copy(bytes.begin(), bytes.end(), out.begin());
  } else {
    for (auto& v : out) {
      const std::size_t s = rd.number();
      if (s > 255) fail(ErrorCode::Parse, rd.path().string() + ": sample value above 255");
      v = std::uint8_t(s);
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

DataGraph read_edge_list(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::vector<WeightedEdge> edges;
  std::optional<std::size_t> declared;
  std::size_t max_id = 0;
  bool any = false;
  std::string raw;
  for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream ss{std::string(line.substr(1))};
      std::string key;
      std::size_t count;
      if (ss >> key && key == "nodes") {
        if (!(ss >> count)) fail(ErrorCode::Parse, where(path, line_no) + "malformed '# nodes' line");
        declared = count;
      }
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 3) {
      fail(ErrorCode::Parse, where(path, line_no) + "expected 3 tab-separated columns, got " +
                                 std::to_string(cols.size()));
    }
    const std::size_t i = parse_id(cols[0], path, line_no);
    const std::size_t j = parse_id(cols[1], path, line_no);
    const double w = parse_value(cols[2], path, line_no);
    max_id = std::max({max_id, i, j});
    any = true;
    edges.push_back({i, j, w});
  }
  const std::size_t n = declared.value_or(any ? max_id + 1 : 0);
  return build_graph(n, std::move(edges));
}

void write_edge_list(const fs::path& path, const DataGraph& g) {
  std::ofstream out = open_out(path);
  out << "# nodes " << g.node_count() << '\n';
  for (const auto& e : g.edges()) out << e.i << '\t' << e.j << '\t' << format_double(e.w) << '\n';
  finish(out, path);
}

GraphSignal read_signal(const fs::path& path, std::size_t node_count) {
  return dense_column<double>(path, node_count, [&](std::string_view s, std::size_t line) {
    return parse_value(s, path, line);
  });
}

void write_signal(const fs::path& path, std::span<const double> x,
                  const std::string& value_column) {
  std::ofstream out = open_out(path);
  out << "node_id," << value_column << '\n';
  for (std::size_t i = 0; i < x.size(); ++i) out << i << ',' << format_double(x[i]) << '\n';
  finish(out, path);
}

Partition read_partition(const fs::path& path, std::size_t node_count) {
  auto ids = dense_column<std::size_t>(path, node_count, [&](std::string_view s, std::size_t line) {
    return parse_id(s, path, line);
  });
  return Partition::from_assignment(std::move(ids));
}

void write_partition(const fs::path& path, const Partition& f) {
  std::ofstream out = open_out(path);
  out << "node_id,cluster_id\n";
  for (std::size_t i = 0; i < f.node_count(); ++i) out << i << ',' << f.cluster_of(i) << '\n';
  finish(out, path);
}

SamplingSet read_samples(const fs::path& path) {
  std::string storage;
  std::vector<SamplingSet::Sample> samples;
  for (const Row& r : read_pairs(path, storage)) {
    samples.push_back({parse_id(r.key, path, r.line), parse_value(r.value, path, r.line)});
  }
  return SamplingSet::create(std::move(samples));
}

void write_samples(const fs::path& path, const SamplingSet& m) {
  std::ofstream out = open_out(path);
  out << "node_id,label\n";
  for (const auto& s : m.samples()) out << s.node << ',' << format_double(s.label) << '\n';
  finish(out, path);
}

void write_history(const fs::path& path, std::span<const HistoryEntry> history) {
  std::ofstream out = open_out(path);
  out << "k,tv,nmse,max_abs_dual\n";
  for (const auto& h : history) {
    out << h.k << ',' << format_double(h.tv) << ',';
    if (h.nmse) out << format_double(*h.nmse);
    out << ',' << format_double(h.max_abs_dual) << '\n';
  }
  finish(out, path);
}

Image read_ppm(const fs::path& path) {
  PnmReader rd(path);
  const PnmHeader h = read_header(rd, "P3", "P6");
  const auto raw = read_samples_raw(rd, h, 3 * h.width * h.height);
  Image img{h.width, h.height, {}};
  img.pixels.resize(h.width * h.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = {raw[3 * i], raw[3 * i + 1], raw[3 * i + 2]};
  }
  return img;
}

void write_ppm(const fs::path& path, const Image& img) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  for (const Rgb& p : img.pixels) {
    const char px[3] = {char(p.r), char(p.g), char(p.b)};
    out.write(px, 3);
  }
  finish(out, path);
}

GrayImage read_pgm(const fs::path& path) {
  PnmReader rd(path);
  const PnmHeader h = read_header(rd, "P2", "P5");
  return {h.width, h.height, read_samples_raw(rd, h, h.width * h.height)};
}

void write_pgm(const fs::path& path, const GrayImage& img) {
  std::ofstream out = open_out(path, std::ios::binary);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.values.data()), std::streamsize(img.values.size()));
  finish(out, path);
}

std::vector<Region> trimap_from_pgm(const GrayImage& img) {
  std::vector<Region> out(img.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (img.values[i]) {
      case 0: out[i] = Region::R3; break;
      case 128: out[i] = Region::R2; break;
      case 255: out[i] = Region::R1; break;
      default:
        fail(ErrorCode::Parse, "trimap pixel " + std::to_string(i) + " has value " +
                                   std::to_string(img.values[i]) + " (expected 0, 128 or 255)");
    }
  }
  return out;
}

GrayImage trimap_to_pgm(std::size_t width, std::size_t height, std::span<const Region> trimap) {
  GrayImage img{width, height, {}};
  for (Region r : trimap) {
    img.values.push_back(r == Region::R1 ? 255 : (r == Region::R2 ? 128 : 0));
  }
  return img;
}

GrayImage mask_to_pgm(std::size_t width, std::size_t height, const std::vector<bool>& mask) {
  GrayImage img{width, height, {}};
  for (bool fg : mask) img.values.push_back(fg ? 255 : 0);
  return img;
}

}  // namespace slp::io

#include "qclust/dataset.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qclust/error.hpp"

namespace qclust {

namespace {

static_assert(std::endian::native == std::endian::little,
              "FSK1 I/O assumes a little-endian host");

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_value(std::string_view cell, std::size_t line_no, std::size_t col) {
  cell = trim(cell);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw FormatError("non-numeric cell at line " + std::to_string(line_no) +
                      ", column " + std::to_string(col));
  }
  if (!std::isfinite(value)) {
    throw FormatError("non-finite value at line " + std::to_string(line_no) +
                      ", column " + std::to_string(col));
  }
  return value;
}

int parse_label(std::string_view cell, std::size_t line_no) {
  cell = trim(cell);
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    throw FormatError("label column does not parse as integer at line " +
                      std::to_string(line_no));
  }
  return value;
}

}  // namespace

void validate(const Dataset& d) {
  if (d.n() < 2) throw FormatError("insufficient data: need at least 2 samples");
  if (d.m() < 1) throw FormatError("dataset has no feature columns");
  if (!d.data.allFinite()) throw FormatError("dataset contains non-finite values");
  if (d.frame_shape) {
    const auto& fs = *d.frame_shape;
    if (fs.height < 1 || fs.width < 1 ||
        static_cast<Eigen::Index>(fs.height) * fs.width != d.m()) {
      throw FormatError("frame shape inconsistent with column count");
    }
  }
  if (d.labels && static_cast<Eigen::Index>(d.labels->size()) != d.n()) {
    throw FormatError("label count does not match sample count");
  }
}

Dataset load_csv(const std::string& path, bool has_labels, bool skip_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::size_t n_fields = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_header && line_no == 1) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    auto fields = split_fields(line);
    if (n_fields == 0) {
      n_fields = fields.size();
      if (n_fields < (has_labels ? 2u : 1u)) {
        throw FormatError("too few columns at line " + std::to_string(line_no));
      }
    } else if (fields.size() != n_fields) {
      throw FormatError("ragged row at line " + std::to_string(line_no) +
                        ": expected " + std::to_string(n_fields) + " columns, got " +
                        std::to_string(fields.size()));
    }

    std::size_t first_value = 0;
    if (has_labels) {
      labels.push_back(parse_label(fields[0], line_no));
      first_value = 1;
    }
    std::vector<double> row;
    row.reserve(n_fields - first_value);
    for (std::size_t c = first_value; c < fields.size(); ++c) {
      row.push_back(parse_value(fields[c], line_no, c + 1));
    }
    rows.push_back(std::move(row));
  }

  if (rows.size() < 2) {
    throw FormatError("insufficient data: " + path + " holds " +
                      std::to_string(rows.size()) + " rows, need at least 2");
  }

  Dataset d;
  d.data.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      d.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  if (has_labels) d.labels = std::move(labels);
  validate(d);
  return d;
}

Dataset load_frames(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "FSK1", 4) != 0) {
    throw FormatError(path + ": bad magic, expected FSK1");
  }
  std::uint32_t header[3];
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw FormatError(path + ": truncated header");
  }
  const std::uint64_t n_frames = header[0];
  const std::uint64_t height = header[1];
  const std::uint64_t width = header[2];
  if (n_frames < 2) throw FormatError(path + ": insufficient data, need at least 2 frames");
  if (height == 0 || width == 0) throw FormatError(path + ": zero frame dimension");

  const std::uint64_t n_values = n_frames * height * width;
  if (n_values > (1ull << 33)) throw FormatError(path + ": declared size too large");

  Dataset d;
  d.data.resize(static_cast<Eigen::Index>(n_frames),
                static_cast<Eigen::Index>(height * width));
  // Row-major on disk matches the per-row flattening, so frames stream
  // straight into rows.
  std::vector<double> buf(height * width);
  for (std::uint64_t f = 0; f < n_frames; ++f) {
    if (!in.read(reinterpret_cast<char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(double)))) {
      throw FormatError(path + ": declared size inconsistent with payload length");
    }
    for (std::uint64_t j = 0; j < buf.size(); ++j) {
      d.data(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(j)) = buf[j];
    }
  }
  if (in.get() != std::char_traits<char>::eof()) {
    throw FormatError(path + ": trailing bytes after declared payload");
  }
  d.frame_shape = FrameShape{static_cast<int>(height), static_cast<int>(width)};
  validate(d);
  return d;
}

void write_frames(const std::string& path, const Dataset& d) {
  if (!d.frame_shape) {
    throw std::invalid_argument("write_frames requires a dataset with frame_shape");
  }
  validate(d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);

  out.write("FSK1", 4);
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(d.n()),
                                   static_cast<std::uint32_t>(d.frame_shape->height),
                                   static_cast<std::uint32_t>(d.frame_shape->width)};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<double> buf(static_cast<std::size_t>(d.m()));
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.m(); ++j) buf[static_cast<std::size_t>(j)] = d.data(i, j);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed for " + path);
}

Dataset standardize(const Dataset& d, StandardizeMode mode,
                    std::vector<Eigen::Index>* constant_rows) {
  Dataset out = d;
  if (mode == StandardizeMode::Global) {
    const double mean = d.data.mean();
    const double var = (d.data.array() - mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      out.data.setZero();
      if (constant_rows) {
        for (Eigen::Index i = 0; i < d.n(); ++i) constant_rows->push_back(i);
      }
    } else {
      out.data = (d.data.array() - mean) / sd;
    }
    return out;
  }

  for (Eigen::Index i = 0; i < d.n(); ++i) {
    const double mean = d.data.row(i).mean();
    const double var = (d.data.row(i).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    // Rows whose spread is at rounding-noise level count as constant.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
      out.data.row(i).setZero();
      if (constant_rows) constant_rows->push_back(i);
    } else {
      out.data.row(i) = (d.data.row(i).array() - mean) / sd;
    }
  }
  return out;
}

Dataset center_rows(const Dataset& d) {
  Dataset out = d;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    out.data.row(i).array() -= d.data.row(i).mean();
  }
  return out;
}

Dataset crop_roi(const Dataset& d, int x0, int y0, int x1, int y1) {
  if (!d.frame_shape) throw std::invalid_argument("crop_roi requires a frame dataset");
  const int h = d.frame_shape->height;
  const int w = d.frame_shape->width;
  if (!(0 <= x0 && x0 < x1 && x1 <= w && 0 <= y0 && y0 < y1 && y1 <= h)) {
    throw std::invalid_argument("ROI rectangle out of bounds");
  }
  const int rh = y1 - y0;
  const int rw = x1 - x0;
  Dataset out;
  out.labels = d.labels;
  out.frame_shape = FrameShape{rh, rw};
  out.data.resize(d.n(), static_cast<Eigen::Index>(rh) * rw);
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (int y = y0; y < y1; ++y) {
      out.data.block(i, static_cast<Eigen::Index>(y - y0) * rw, 1, rw) =
          d.data.block(i, static_cast<Eigen::Index>(y) * w + x0, 1, rw);
    }
  }
  return out;
}

std::string dataset_digest(const Dataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t shape[2] = {static_cast<std::uint64_t>(d.n()),
                                  static_cast<std::uint64_t>(d.m())};
  feed(shape, sizeof(shape));
  const std::uint32_t fs[2] = {
      d.frame_shape ? static_cast<std::uint32_t>(d.frame_shape->height) : 0u,
      d.frame_shape ? static_cast<std::uint32_t>(d.frame_shape->width) : 0u};
  feed(fs, sizeof(fs));
  if (d.labels) {
    for (int v : *d.labels) {
      const std::int64_t widened = v;
      feed(&widened, sizeof(widened));
    }
  }
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    for (Eigen::Index j = 0; j < d.m(); ++j) {
      const double v = d.data(i, j);
      feed(&v, sizeof(v));
    }
  }
  std::ostringstream os;
  os << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) os << ((h >> shift) & 0xf);
  return os.str();
}

}  // namespace qclust

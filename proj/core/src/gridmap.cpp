#include "wbplan/gridmap.hpp"

#include <fstream>
#include <iterator>
#include <cctype>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "wbplan/error.hpp"

namespace wbplan {

const char* toString(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kInvalidMap: return "invalid-map";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidAnchor: return "invalid-anchor";
    case ErrorCode::kInvalidTime: return "invalid-time";
    case ErrorCode::kSingularSystem: return "singular-system";
    case ErrorCode::kDomain: return "domain-error";
    case ErrorCode::kConfiguration: return "configuration-error";
    case ErrorCode::kOptimizationFailed: return "optimization-failed";
    case ErrorCode::kUnsafeTrajectory: return "unsafe-trajectory";
  }
  return "unknown";
}

OccupancyGrid::OccupancyGrid(int width_cells, int height_cells, double resolution,
                             Eigen::Vector2d origin, std::vector<std::uint8_t> cells)
    : width_(width_cells),
      height_(height_cells),
      resolution_(resolution),
      origin_(std::move(origin)),
      cells_(std::move(cells)) {
  if (width_ < 1 || height_ < 1) {
    throw Error(ErrorCode::kInvalidMap, "occupancy grid must have at least one cell per axis");
  }
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw Error(ErrorCode::kInvalidMap, "occupancy grid resolution must be positive");
  }
  if (cells_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_)) {
    throw Error(ErrorCode::kInvalidMap, "cell buffer size does not match grid dimensions");
  }
  row_prefix_.assign(static_cast<std::size_t>(width_ + 1) * height_, 0);
  for (int j = 0; j < height_; ++j) rebuildRowPrefix(j);
}

void OccupancyGrid::rebuildRowPrefix(int j) {
  const std::size_t base = static_cast<std::size_t>(j) * (width_ + 1);
  const std::size_t cell_base = static_cast<std::size_t>(j) * width_;
  row_prefix_[base] = 0;
  for (int i = 0; i < width_; ++i) {
    row_prefix_[base + i + 1] = row_prefix_[base + i] + (cells_[cell_base + i] != 0 ? 1u : 0u);
  }
}

bool OccupancyGrid::rowSpanOccupied(int j, int col_lo, int col_hi) const noexcept {
  if (col_lo > col_hi) return false;
  if (j < 0 || j >= height_ || col_lo < 0 || col_hi >= width_) return true;
  const std::size_t base = static_cast<std::size_t>(j) * (width_ + 1);
  return row_prefix_[base + col_hi + 1] != row_prefix_[base + col_lo];
}

OccupancyGrid OccupancyGrid::uniform(int width_cells, int height_cells, double resolution,
                                     Eigen::Vector2d origin, bool occupied) {
  std::vector<std::uint8_t> cells(
      static_cast<std::size_t>(std::max(width_cells, 0)) * std::max(height_cells, 0),
      occupied ? 1 : 0);
  return OccupancyGrid(width_cells, height_cells, resolution, std::move(origin), std::move(cells));
}

void OccupancyGrid::setOccupied(CellIndex c, bool occupied) {
  if (!inBounds(c)) return;
  cells_[static_cast<std::size_t>(c.j) * width_ + c.i] = occupied ? 1 : 0;
  rebuildRowPrefix(c.j);
}

void OccupancyGrid::fillBox(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, bool occupied) {
  for (int j = 0; j < height_; ++j) {
    bool touched = false;
    for (int i = 0; i < width_; ++i) {
      const Eigen::Vector2d c = cellCenter({i, j});
      if (c.x() >= lo.x() && c.x() <= hi.x() && c.y() >= lo.y() && c.y() <= hi.y()) {
        cells_[static_cast<std::size_t>(j) * width_ + i] = occupied ? 1 : 0;
        touched = true;
      }
    }
    if (touched) rebuildRowPrefix(j);
  }
}

CellIndex OccupancyGrid::worldToCell(const Eigen::Vector2d& p) const noexcept {
  const double u = (p.x() - origin_.x()) / resolution_;
  const double v = (p.y() - origin_.y()) / resolution_;
  // Clamp before the cast so far-away points stay well defined (and out of bounds).
  constexpr double kLim = 1e9;
  return {static_cast<int>(std::floor(std::clamp(u, -kLim, kLim))),
          static_cast<int>(std::floor(std::clamp(v, -kLim, kLim)))};
}

Eigen::Vector2d OccupancyGrid::cellCenter(CellIndex c) const noexcept {
  return origin_ + resolution_ * Eigen::Vector2d(c.i + 0.5, c.j + 0.5);
}

bool OccupancyGrid::segmentHitsObstacle(const Eigen::Vector2d& p0,
                                        const Eigen::Vector2d& p1) const {
  return !forEachSupercoverCell(p0, p1, [this](CellIndex c) { return !isOccupied(c); });
}

bool OccupancyGrid::convexPolygonHitsObstacle(std::span<const Eigen::Vector2d> vertices) const {
  if (vertices.empty()) return false;
  const double inv_res = 1.0 / resolution_;

  // Work in cell units.
  std::vector<Eigen::Vector2d> poly;
  poly.reserve(vertices.size());
  double y_lo = std::numeric_limits<double>::infinity();
  double y_hi = -y_lo;
  for (const auto& v : vertices) {
    poly.emplace_back((v - origin_) * inv_res);
    y_lo = std::min(y_lo, poly.back().y());
    y_hi = std::max(y_hi, poly.back().y());
  }

  const int row_lo = static_cast<int>(std::floor(y_lo));
  const int row_hi = static_cast<int>(std::floor(y_hi));
  const std::size_t n = poly.size();
  for (int row = row_lo; row <= row_hi; ++row) {
    const double band_lo = std::max(static_cast<double>(row), y_lo);
    const double band_hi = std::min(static_cast<double>(row) + 1.0, y_hi);
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    auto include = [&](double x) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
    };
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector2d& a = poly[k];
      const Eigen::Vector2d& b = poly[(k + 1) % n];
      if (a.y() >= band_lo && a.y() <= band_hi) include(a.x());
      for (const double yb : {band_lo, band_hi}) {
        if ((a.y() - yb) * (b.y() - yb) < 0.0) {
          const double s = (yb - a.y()) / (b.y() - a.y());
          include(a.x() + s * (b.x() - a.x()));
        }
      }
    }
    if (x_lo > x_hi) continue;
    const int col_lo = static_cast<int>(std::floor(std::max(x_lo, -1e9)));
    const int col_hi = static_cast<int>(std::floor(std::min(x_hi, 1e9)));
    if (rowSpanOccupied(row, col_lo, col_hi)) return true;
  }
  return false;
}

namespace {

struct Header {
  double resolution = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
};

Header parseHeader(const std::string& text, std::size_t line_no, std::size_t offset) {
  std::istringstream ss(text);
  std::string kw_res, kw_origin;
  Header h;
  if (!(ss >> kw_res >> h.resolution >> kw_origin >> h.origin.x() >> h.origin.y()) ||
      kw_res != "res" || kw_origin != "origin") {
    throw ParseError("expected header 'res <meters> origin <x> <y>'", line_no, offset);
  }
  std::string extra;
  if (ss >> extra) throw ParseError("unexpected token '" + extra + "' in header", line_no, offset);
  if (!(h.resolution > 0.0) || !std::isfinite(h.resolution)) {
    throw Error(ErrorCode::kInvalidMap, "map resolution must be positive");
  }
  return h;
}

OccupancyGrid parseAscii(const std::string& doc) {
  std::vector<std::string> rows;
  std::vector<std::size_t> row_offsets;
  std::vector<std::size_t> row_lines;
  std::optional<Header> header;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < doc.size()) {
    std::size_t eol = doc.find('\n', pos);
    if (eol == std::string::npos) eol = doc.size();
    std::string line = doc.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (!header) {
      if (line.find_first_not_of(" \t") != std::string::npos) {
        header = parseHeader(line, line_no, pos);
      }
    } else {
      rows.push_back(std::move(line));
      row_offsets.push_back(pos);
      row_lines.push_back(line_no);
    }
    pos = eol + 1;
  }
  while (!rows.empty() && rows.back().find_first_not_of(" \t") == std::string::npos) {
    rows.pop_back();
    row_offsets.pop_back();
    row_lines.pop_back();
  }
  if (!header || rows.empty()) {
    throw Error(ErrorCode::kInvalidMap, "map document has no cells");
  }

  const std::size_t width = rows.front().size();
  const std::size_t height = rows.size();
  std::vector<std::uint8_t> cells(width * height, 0);
  for (std::size_t r = 0; r < height; ++r) {
    const std::string& row = rows[r];
    const std::size_t this_line = row_lines[r];
    if (row.size() != width) {
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(width),
                       this_line, row_offsets[r]);
    }
    const std::size_t j = height - 1 - r;  // first text row is the top of the map
    for (std::size_t i = 0; i < width; ++i) {
      const char ch = row[i];
      if (ch == '#') {
        cells[j * width + i] = 1;
      } else if (ch != '.') {
        throw ParseError(std::string("unexpected character '") + ch + "'", this_line,
                         row_offsets[r] + i);
      }
    }
  }
  return OccupancyGrid(static_cast<int>(width), static_cast<int>(height), header->resolution,
                       header->origin, std::move(cells));
}

OccupancyGrid parsePgm(const std::string& doc) {
  const bool binary = doc.compare(0, 2, "P5") == 0;
  std::size_t pos = 2;
  std::size_t line_no = 1;
  std::optional<Header> header;

  // Reads the next whitespace-delimited header token, consuming comments.
  auto next_token = [&]() -> std::string {
    while (pos < doc.size()) {
      const char ch = doc[pos];
      if (ch == '#') {
        const std::size_t start = pos;
        std::size_t eol = doc.find('\n', pos);
        if (eol == std::string::npos) eol = doc.size();
        std::string comment = doc.substr(pos + 1, eol - pos - 1);
        if (!comment.empty() && comment.back() == '\r') comment.pop_back();
        const auto first = comment.find_first_not_of(" \t");
        if (!header && first != std::string::npos && comment.compare(first, 3, "res") == 0) {
          header = parseHeader(comment.substr(first), line_no, start);
        }
        pos = eol;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        if (ch == '\n') ++line_no;
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < doc.size() && !std::isspace(static_cast<unsigned char>(doc[pos]))) ++pos;
    return doc.substr(start, pos - start);
  };
  auto next_int = [&](const char* what) {
    const std::size_t at = pos;
    const std::string tok = next_token();
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("expected integer ") + what, line_no, at);
    }
  };

  const long width = next_int("width");
  const long height = next_int("height");
  const long maxval = next_int("maxval");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidMap, "bitmap has no cells");
  if (maxval <= 0 || maxval > 65535) throw ParseError("maxval out of range", line_no, pos);
  if (!header) throw ParseError("bitmap lacks a '# res <m> origin <x> <y>' comment", line_no, pos);

  const double threshold = (static_cast<double>(maxval) + 1.0) / 2.0;
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width * height), 0);
  if (binary) ++pos;  // single whitespace byte after maxval
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  for (long r = 0; r < height; ++r) {
    const long j = height - 1 - r;
    for (long i = 0; i < width; ++i) {
      long value = 0;
      if (binary) {
        if (pos + bytes_per > doc.size()) throw ParseError("truncated bitmap data", line_no, pos);
        value = static_cast<unsigned char>(doc[pos]);
        if (bytes_per == 2) value = (value << 8) | static_cast<unsigned char>(doc[pos + 1]);
        pos += bytes_per;
      } else {
        value = next_int("pixel");
      }
      cells[static_cast<std::size_t>(j * width + i)] = value < threshold ? 1 : 0;
    }
  }
  return OccupancyGrid(static_cast<int>(width), static_cast<int>(height), header->resolution,
                       header->origin, std::move(cells));
}

}  // namespace

OccupancyGrid loadMap(std::istream& in) {
  const std::string doc((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (doc.compare(0, 2, "P2") == 0 || doc.compare(0, 2, "P5") == 0) return parsePgm(doc);
  return parseAscii(doc);
}

OccupancyGrid loadMapFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open map file " + path.string());
  return loadMap(in);
}

void writeMap(std::ostream& out, const OccupancyGrid& grid) {
  out << "res " << grid.resolution() << " origin " << grid.origin().x() << ' '
      << grid.origin().y() << '\n';
  for (int j = grid.height() - 1; j >= 0; --j) {
    for (int i = 0; i < grid.width(); ++i) out << (grid.isOccupied(CellIndex{i, j}) ? '#' : '.');
    out << '\n';
  }
}

}  // namespace wbplan

#include "coloc/occupancy_grid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace coloc {

OccupancyGrid::OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                             std::vector<CellState> cells)
    : width_(width),
      height_(height),
      resolution_(resolution),
      origin_(origin),
      cos_(std::cos(origin.theta())),
      sin_(std::sin(origin.theta())),
      cells_(std::move(cells)) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("OccupancyGrid: width and height must be positive");
  }
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("OccupancyGrid: resolution must be positive");
  }
  if (cells_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::invalid_argument("OccupancyGrid: cell count does not match width*height");
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == CellState::kFree) free_cells_.push_back(static_cast<std::uint32_t>(i));
  }
}

void OccupancyGrid::to_local(double x, double y, double& lx, double& ly) const {
  const double dx = x - origin_.x();
  const double dy = y - origin_.y();
  lx = cos_ * dx + sin_ * dy;
  ly = -sin_ * dx + cos_ * dy;
}

std::optional<CellIndex> OccupancyGrid::cell_of(double x, double y) const {
  double lx, ly;
  to_local(x, y, lx, ly);
  const double fc = std::floor(lx / resolution_);
  const double fr = std::floor(ly / resolution_);
  if (!(fc >= 0.0) || !(fr >= 0.0) || fc >= width_ || fr >= height_) return std::nullopt;
  return CellIndex{static_cast<int>(fc), static_cast<int>(fr)};
}

Pose2D OccupancyGrid::cell_center(int col, int row) const {
  const double lx = (col + 0.5) * resolution_;
  const double ly = (row + 0.5) * resolution_;
  return {origin_.x() + cos_ * lx - sin_ * ly, origin_.y() + sin_ * lx + cos_ * ly, 0.0};
}

// ---------------------------------------------------------------------------
// Map I/O

MapMetadata parse_map_metadata(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MapLoadError(std::string("map metadata: ") + e.what());
  }
  MapMetadata meta;
  try {
    meta.resolution = j.at("resolution").get<double>();
    const auto& o = j.at("origin");
    meta.origin = Pose2D(o.at("x").get<double>(), o.at("y").get<double>(),
                         o.value("theta", 0.0));
    meta.occupied_thresh = j.value("occupied_thresh", meta.occupied_thresh);
    meta.free_thresh = j.value("free_thresh", meta.free_thresh);
    if (j.contains("negate")) {
      const auto& n = j.at("negate");
      meta.negate = n.is_boolean() ? n.get<bool>() : n.get<int>() != 0;
    }
  } catch (const nlohmann::json::exception& e) {
    throw MapLoadError(std::string("map metadata: ") + e.what());
  }
  if (!(meta.resolution > 0.0)) throw MapLoadError("map metadata: resolution must be > 0");
  if (!(meta.free_thresh >= 0.0 && meta.occupied_thresh <= 1.0 &&
        meta.free_thresh < meta.occupied_thresh)) {
    throw MapLoadError(
        "map metadata: thresholds must satisfy 0 <= free_thresh < occupied_thresh <= 1");
  }
  return meta;
}

namespace {

class PgmReader {
 public:
  PgmReader(const std::string& bytes, const std::string& name) : b_(bytes), name_(name) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw MapLoadError(name_ + ": byte " + std::to_string(pos_) + ": " + what);
  }

  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      const char c = b_[pos_];
      if (c == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long read_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000'000L) fail(std::string("value too large for ") + what);
      ++pos_;
    }
    if (pos_ == start) fail(std::string("expected integer ") + what);
    return v;
  }

  std::string magic() {
    if (b_.size() < 2) fail("truncated header");
    pos_ = 2;
    return b_.substr(0, 2);
  }

  // Exactly one whitespace byte separates the header from P5 raster data.
  void single_space() {
    if (pos_ >= b_.size() || !std::isspace(static_cast<unsigned char>(b_[pos_]))) {
      fail("expected whitespace before raster data");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  const std::string& bytes() const { return b_; }

 private:
  const std::string& b_;
  const std::string& name_;
  std::size_t pos_ = 0;
};

}  // namespace

OccupancyGrid decode_pgm(const std::string& bytes, const MapMetadata& meta,
                         const std::string& source_name) {
  PgmReader r(bytes, source_name);
  const std::string magic = r.magic();
  if (magic != "P5" && magic != "P2") r.fail("unsupported magic '" + magic + "'");
  const long width = r.read_int("width");
  const long height = r.read_int("height");
  const long maxval = r.read_int("maxval");
  if (width <= 0 || height <= 0) r.fail("image dimensions must be positive");
  if (maxval <= 0 || maxval > 255) r.fail("only 8-bit PGM (maxval 1..255) is supported");

  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<int> pixels(n);
  if (magic == "P5") {
    r.single_space();
    if (bytes.size() - r.pos() < n) {
      r.fail("raster has " + std::to_string(bytes.size() - r.pos()) + " bytes, expected " +
             std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      pixels[i] = static_cast<unsigned char>(bytes[r.pos() + i]);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) pixels[i] = static_cast<int>(r.read_int("pixel"));
  }

  std::vector<CellState> cells(n);
  for (long row = 0; row < height; ++row) {
    for (long col = 0; col < width; ++col) {
      const int p = pixels[static_cast<std::size_t>(row * width + col)];
      if (p > maxval) r.fail("pixel value exceeds maxval");
      double occ = static_cast<double>(maxval - p) / static_cast<double>(maxval);
      if (meta.negate) occ = 1.0 - occ;
      CellState s = CellState::kUnknown;
      if (occ >= meta.occupied_thresh) {
        s = CellState::kOccupied;
      } else if (occ <= meta.free_thresh) {
        s = CellState::kFree;
      }
      // Image row 0 is the top edge of the map.
      const long grid_row = height - 1 - row;
      cells[static_cast<std::size_t>(grid_row * width + col)] = s;
    }
  }
  return OccupancyGrid(static_cast<int>(width), static_cast<int>(height), meta.resolution,
                       meta.origin, std::move(cells));
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MapLoadError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

OccupancyGrid load_map(const std::filesystem::path& image_path,
                       const std::filesystem::path& meta_path) {
  MapMetadata meta;
  try {
    meta = parse_map_metadata(slurp(meta_path));
  } catch (const MapLoadError& e) {
    const std::string what = e.what();
    if (what.rfind(meta_path.string(), 0) == 0) throw;
    throw MapLoadError(meta_path.string() + ": " + what);
  }
  return decode_pgm(slurp(image_path), meta, image_path.string());
}

std::string encode_pgm(const OccupancyGrid& map) {
  std::string out = "P5\n" + std::to_string(map.width()) + " " +
                    std::to_string(map.height()) + "\n255\n";
  out.reserve(out.size() + map.cells().size());
  for (int row = map.height() - 1; row >= 0; --row) {
    for (int col = 0; col < map.width(); ++col) {
      unsigned char px = 205;
      switch (map.at(col, row)) {
        case CellState::kFree: px = 254; break;
        case CellState::kOccupied: px = 0; break;
        case CellState::kUnknown: px = 205; break;
      }
      out.push_back(static_cast<char>(px));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries

double raycast(const OccupancyGrid& map, const Pose2D& origin, double ray_angle,
               double max_range) {
  double lx, ly;
  map.to_local(origin.x(), origin.y(), lx, ly);
  const double res = map.resolution();
  const double fc = std::floor(lx / res);
  const double fr = std::floor(ly / res);
  if (!(fc >= 0.0) || !(fr >= 0.0) || fc >= map.width() || fr >= map.height()) {
    return max_range;
  }
  int col = static_cast<int>(fc);
  int row = static_cast<int>(fr);
  if (map.at(col, row) == CellState::kOccupied) return 0.0;

  const double heading = origin.theta() + ray_angle - map.origin().theta();
  const double dx = std::cos(heading);
  const double dy = std::sin(heading);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const int step_c = dx > 0.0 ? 1 : -1;
  const int step_r = dy > 0.0 ? 1 : -1;
  // Ray parameter (metres) at which the next column / row boundary is crossed.
  double t_max_c = kInf;
  double t_max_r = kInf;
  double t_delta_c = kInf;
  double t_delta_r = kInf;
  if (dx != 0.0) {
    const double boundary = (dx > 0.0 ? col + 1 : col) * res;
    t_max_c = (boundary - lx) / dx;
    t_delta_c = res / std::abs(dx);
  }
  if (dy != 0.0) {
    const double boundary = (dy > 0.0 ? row + 1 : row) * res;
    t_max_r = (boundary - ly) / dy;
    t_delta_r = res / std::abs(dy);
  }

  while (true) {
    double t;
    if (t_max_c < t_max_r) {
      t = t_max_c;
      t_max_c += t_delta_c;
      col += step_c;
    } else {
      t = t_max_r;
      t_max_r += t_delta_r;
      row += step_r;
    }
    if (t >= max_range) return max_range;
    if (!map.in_bounds(col, row)) return max_range;
    if (map.at(col, row) == CellState::kOccupied) return std::max(t, 0.0);
  }
}

bool is_free(const OccupancyGrid& map, double x, double y) {
  const auto cell = map.cell_of(x, y);
  return cell && map.at(cell->col, cell->row) == CellState::kFree;
}

Pose2D sample_free_pose(const OccupancyGrid& map, std::span<const std::uint32_t> support,
                        Rng& rng) {
  if (support.empty()) throw SamplingError("sample_free_pose: no FREE cell to sample from");
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint32_t idx = support[pick(rng)];
  const int col = static_cast<int>(idx % static_cast<std::uint32_t>(map.width()));
  const int row = static_cast<int>(idx / static_cast<std::uint32_t>(map.width()));
  const double res = map.resolution();
  const double ux = unit(rng);
  const double uy = unit(rng);
  const double theta = kPi - kTwoPi * unit(rng);
  const double c = std::cos(map.origin().theta());
  const double s = std::sin(map.origin().theta());
  auto place = [&](double fx, double fy) {
    const double lx = (col + fx) * res;
    const double ly = (row + fy) * res;
    return Pose2D(map.origin().x() + c * lx - s * ly, map.origin().y() + s * lx + c * ly,
                  theta);
  };
  Pose2D p = place(ux, uy);
  // Rounding can push a jitter of ~1 onto the neighbouring cell.
  const auto cell = map.cell_of(p.x(), p.y());
  if (!cell || cell->col != col || cell->row != row) p = place(0.5, 0.5);
  return p;
}

Pose2D sample_free_pose(const OccupancyGrid& map, Rng& rng) {
  if (map.free_cells().empty()) {
    throw SamplingError("sample_free_pose: map has no FREE cell");
  }
  return sample_free_pose(map, map.free_cells(), rng);
}

std::vector<std::uint32_t> free_cells_in_box(const OccupancyGrid& map, double x_min,
                                             double y_min, double x_max, double y_max) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t idx : map.free_cells()) {
    const int col = static_cast<int>(idx % static_cast<std::uint32_t>(map.width()));
    const int row = static_cast<int>(idx / static_cast<std::uint32_t>(map.width()));
    const Pose2D c = map.cell_center(col, row);
    if (c.x() >= x_min && c.x() <= x_max && c.y() >= y_min && c.y() <= y_max) {
      out.push_back(idx);
    }
  }
  return out;
}

}  // namespace coloc

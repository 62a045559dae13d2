#ifndef COLOC_OCCUPANCY_GRID_HPP_
#define COLOC_OCCUPANCY_GRID_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coloc/geometry.hpp"
#include "coloc/random.hpp"

namespace coloc {

enum class CellState : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };

class MapLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a sampler is asked to draw from an empty support.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellIndex {
  int col = 0;
  int row = 0;
};

/// Immutable tri-state occupancy grid. Cell (0, 0) is the lower-left cell and
/// its lower-left corner sits at `origin` in the map frame; rows grow along
/// the origin's +y axis.
class OccupancyGrid {
 public:
  OccupancyGrid(int width, int height, double resolution, Pose2D origin,
                std::vector<CellState> cells);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  const Pose2D& origin() const { return origin_; }
  const std::vector<CellState>& cells() const { return cells_; }

  CellState at(int col, int row) const {
    return cells_[static_cast<std::size_t>(row) * width_ + col];
  }
  bool in_bounds(int col, int row) const {
    return col >= 0 && row >= 0 && col < width_ && row < height_;
  }

  /// Cell containing a map-frame point, or nullopt when outside the grid.
  std::optional<CellIndex> cell_of(double x, double y) const;
  /// Map-frame coordinates of a cell centre.
  Pose2D cell_center(int col, int row) const;

  /// Row-major indices of every FREE cell; cached at construction.
  const std::vector<std::uint32_t>& free_cells() const { return free_cells_; }

  // Map frame -> grid-local frame (grid axes, metres, origin at cell corner).
  void to_local(double x, double y, double& lx, double& ly) const;

 private:
  int width_;
  int height_;
  double resolution_;
  Pose2D origin_;
  double cos_;
  double sin_;
  std::vector<CellState> cells_;
  std::vector<std::uint32_t> free_cells_;
};

struct MapMetadata {
  double resolution = 0.05;
  Pose2D origin;
  double occupied_thresh = 0.65;
  double free_thresh = 0.196;
  bool negate = false;
};

/// Parses the JSON metadata document (resolution, origin, thresholds, negate).
MapMetadata parse_map_metadata(const std::string& json_text);

/// Decodes an 8-bit P2/P5 PGM image into a grid. A pixel's occupancy is
/// (maxval - p) / maxval (flipped when negate is set); occupancy at or above
/// occupied_thresh is OCCUPIED, at or below free_thresh is FREE, anything in
/// between UNKNOWN. The first image row is the top of the map.
OccupancyGrid decode_pgm(const std::string& bytes, const MapMetadata& meta,
                         const std::string& source_name = "<memory>");

OccupancyGrid load_map(const std::filesystem::path& image_path,
                       const std::filesystem::path& meta_path);

/// Writes the grid as a binary PGM (free 254, occupied 0, unknown 205).
std::string encode_pgm(const OccupancyGrid& map);

/// Distance along the ray from `origin` with heading origin.theta + ray_angle
/// to the boundary of the first OCCUPIED cell, capped at max_range. UNKNOWN
/// cells do not block. An origin outside the grid yields max_range.
double raycast(const OccupancyGrid& map, const Pose2D& origin, double ray_angle,
               double max_range);

/// True iff (x, y) lies in an in-bounds FREE cell.
bool is_free(const OccupancyGrid& map, double x, double y);

/// Uniform FREE cell, uniform jitter inside it, uniform heading.
Pose2D sample_free_pose(const OccupancyGrid& map, Rng& rng);

/// Same, restricted to a caller-chosen subset of FREE cells (row-major indices).
Pose2D sample_free_pose(const OccupancyGrid& map, std::span<const std::uint32_t> support,
                        Rng& rng);

/// FREE cells whose centres lie inside an axis-aligned map-frame box.
std::vector<std::uint32_t> free_cells_in_box(const OccupancyGrid& map, double x_min,
                                             double y_min, double x_max, double y_max);

}  // namespace coloc

#endif  // COLOC_OCCUPANCY_GRID_HPP_

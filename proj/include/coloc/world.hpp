#ifndef COLOC_WORLD_HPP_
#define COLOC_WORLD_HPP_

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "coloc/geometry.hpp"
#include "coloc/models.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/random.hpp"
#include "coloc/scenario.hpp"

namespace coloc {

/// One agent's sensor output for a tick.
struct SensorFrame {
  OdometryReading odometry;
  RangeScan scan;
};

struct EncounterEvent {
  AgentId observer_id = 0;
  AgentId observed_id = 0;
  double timestamp = 0.0;
  RelativePoseMeas measurement{0.0, 0.0, 1.0, 1.0};
};

/// Ground-truth side of the simulation: moves agents along their
/// trajectories and synthesizes odometry, scans and encounter measurements.
/// Nothing here reads filter state.
class World {
 public:
  World(std::shared_ptr<const OccupancyGrid> map, std::vector<AgentSpec> agents,
        std::uint64_t seed, double encounter_cooldown);

  /// Advances time by dt and returns one frame per agent, in agent order.
  std::vector<SensorFrame> step(double dt);

  /// Ordered-pair encounter check on ground truth at the current time. Events
  /// come out sorted by (observer, observed); each ordered pair is admitted at
  /// most once per cooldown window.
  std::vector<EncounterEvent> detect_encounters();

  /// The detection predicate alone: range, field of view and line of sight.
  bool can_detect(std::size_t observer, std::size_t observed) const;

  /// Noisy range/bearing of `observed` as seen by `observer`.
  RelativePoseMeas synthesize_measurement(std::size_t observer, std::size_t observed);

  RangeScan simulate_scan(std::size_t agent, const Pose2D& truth);

  double time() const { return time_; }
  const OccupancyGrid& map() const { return *map_; }
  const std::vector<AgentSpec>& agents() const { return agents_; }
  const Pose2D& truth(std::size_t agent) const { return truth_[agent]; }
  const Pose2D& odometry_pose(std::size_t agent) const { return odom_[agent]; }

 private:
  std::shared_ptr<const OccupancyGrid> map_;
  std::vector<AgentSpec> agents_;
  double cooldown_;
  double time_ = 0.0;
  std::vector<Pose2D> truth_;
  std::vector<Pose2D> odom_;
  std::vector<Rng> sensor_rng_;
  Rng detection_rng_;
  std::map<std::pair<AgentId, AgentId>, double> last_event_;
};

/// Throws ScenarioError if any waypoint is outside FREE space.
void check_trajectories(const OccupancyGrid& map, const std::vector<AgentSpec>& agents);

}  // namespace coloc

#endif  // COLOC_WORLD_HPP_

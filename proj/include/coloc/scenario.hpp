#ifndef COLOC_SCENARIO_HPP_
#define COLOC_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "coloc/filter.hpp"
#include "coloc/geometry.hpp"
#include "coloc/models.hpp"

namespace coloc {

/// Invalid scenario content. The message names the offending field path,
/// e.g. "agents[1].sensor.beams: must be >= 1".
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Waypoint {
  double t = 0.0;
  Pose2D pose;
};

struct SensorSpec {
  std::size_t beams = 24;
  double fov = kTwoPi;
  double max_range = 6.0;
  // Std of the simulated beam noise; defaults to the filter's sigma_hit.
  std::optional<double> range_noise;
  // Noise gains used to corrupt the simulated odometry; defaults to the
  // filter's motion gains.
  std::optional<MotionNoiseParams> odometry_noise;

  /// Beam directions in the body frame, evenly spaced across the FOV.
  std::vector<double> beam_angles() const;
};

struct DetectionSpec {
  double range = 0.0;  // 0 disables detection by this agent
  double fov = kTwoPi;
  double sigma_range = 0.1;
  double sigma_bearing = deg_to_rad(10.0);
};

struct Box {
  double x_min, y_min, x_max, y_max;
};

/// How an agent's filter is seeded: uniformly over the FREE space (optionally
/// restricted to a union of boxes), or as a Gaussian blob around a known pose.
struct InitSpec {
  std::vector<Box> regions;  // empty = whole map
  std::optional<Pose2D> pose;
  double sigma_xy = 0.05;
  double sigma_theta = 0.05;
};

struct AgentSpec {
  AgentId id = 0;
  std::vector<Waypoint> trajectory;
  SensorSpec sensor;
  FilterConfig filter;
  DetectionSpec detection;
  InitSpec init;

  /// Ground-truth pose at time t: linear interpolation between waypoints,
  /// headings along the shorter arc; clamped outside the waypoint span.
  Pose2D truth_at(double t) const;
};

struct ChannelSpec {
  double latency = 0.0;  // seconds
  double drop_probability = 0.0;
};

struct Scenario {
  std::filesystem::path map_image;
  std::filesystem::path map_meta;
  std::uint64_t seed = 0;
  double dt = 0.1;
  double duration = 10.0;
  double encounter_cooldown = 5.0;
  ChannelSpec channel;
  AgentId evaluated_agent = 0;
  std::vector<AgentSpec> agents;

  std::size_t tick_count() const;
  const AgentSpec& agent(AgentId id) const;
};

/// Parses a scenario document. Relative map paths resolve against base_dir.
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace coloc

#endif  // COLOC_SCENARIO_HPP_

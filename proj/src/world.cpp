#include "coloc/world.hpp"

#include <algorithm>
#include <cmath>

namespace coloc {

namespace {

constexpr std::uint32_t kSensorStream = 1;
constexpr std::uint32_t kDetectionStream = 2;

}  // namespace

void check_trajectories(const OccupancyGrid& map, const std::vector<AgentSpec>& agents) {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& traj = agents[i].trajectory;
    for (std::size_t w = 0; w < traj.size(); ++w) {
      if (!is_free(map, traj[w].pose.x(), traj[w].pose.y())) {
        throw ScenarioError("agents[" + std::to_string(i) + "].trajectory[" +
                            std::to_string(w) + "]: waypoint is not in FREE space");
      }
    }
  }
}

World::World(std::shared_ptr<const OccupancyGrid> map, std::vector<AgentSpec> agents,
             std::uint64_t seed, double encounter_cooldown)
    : map_(std::move(map)),
      agents_(std::move(agents)),
      cooldown_(encounter_cooldown),
      detection_rng_(make_stream(seed, {kDetectionStream})) {
  check_trajectories(*map_, agents_);
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const Pose2D start = agents_[i].truth_at(0.0);
    truth_.push_back(start);
    odom_.push_back(start);
    sensor_rng_.push_back(make_stream(seed, {kSensorStream, static_cast<std::uint32_t>(i)}));
  }
}

RangeScan World::simulate_scan(std::size_t agent, const Pose2D& truth) {
  const AgentSpec& spec = agents_[agent];
  const double noise = spec.sensor.range_noise.value_or(spec.filter.range.sigma_hit);
  RangeScan scan;
  scan.max_range = spec.sensor.max_range;
  scan.beam_angles = spec.sensor.beam_angles();
  scan.ranges.reserve(scan.beam_angles.size());
  for (double angle : scan.beam_angles) {
    const double expected = raycast(*map_, truth, angle, scan.max_range);
    double r = expected;
    if (expected < scan.max_range && noise > 0.0) {
      r += std::normal_distribution<double>(0.0, noise)(sensor_rng_[agent]);
    }
    scan.ranges.push_back(std::clamp(r, 0.0, scan.max_range));
  }
  return scan;
}

std::vector<SensorFrame> World::step(double dt) {
  const double next = time_ + dt;
  std::vector<SensorFrame> frames;
  frames.reserve(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const AgentSpec& spec = agents_[i];
    const Pose2D truth_next = spec.truth_at(next);
    const MotionNoiseParams& odo_noise = spec.sensor.odometry_noise.value_or(spec.filter.motion);
    const Pose2D odom_next =
        sample_motion(odom_[i], OdometryReading{truth_[i], truth_next}, odo_noise,
                      sensor_rng_[i]);
    SensorFrame f{OdometryReading{odom_[i], odom_next}, simulate_scan(i, truth_next)};
    truth_[i] = truth_next;
    odom_[i] = odom_next;
    frames.push_back(std::move(f));
  }
  time_ = next;
  return frames;
}

bool World::can_detect(std::size_t observer, std::size_t observed) const {
  if (observer == observed) return false;
  const DetectionSpec& det = agents_[observer].detection;
  if (det.range <= 0.0) return false;
  const RangeBearing rb = predict_relative_pose(truth_[observer], truth_[observed]);
  if (rb.degenerate || rb.range > det.range) return false;
  if (std::abs(rb.bearing) > 0.5 * det.fov) return false;
  return raycast(*map_, truth_[observer], rb.bearing, rb.range) >= rb.range;
}

RelativePoseMeas World::synthesize_measurement(std::size_t observer, std::size_t observed) {
  const DetectionSpec& det = agents_[observer].detection;
  const RangeBearing rb = predict_relative_pose(truth_[observer], truth_[observed]);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double range = rb.range + det.sigma_range * n01(detection_rng_);
  const double bearing = rb.bearing + det.sigma_bearing * n01(detection_rng_);
  return {std::max(range, 0.0), bearing, det.sigma_range, det.sigma_bearing, time_};
}

std::vector<EncounterEvent> World::detect_encounters() {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t j = 0; j < agents_.size(); ++j) {
      if (can_detect(i, j)) pairs.emplace_back(i, j);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
    return std::pair(agents_[a.first].id, agents_[a.second].id) <
           std::pair(agents_[b.first].id, agents_[b.second].id);
  });

  std::vector<EncounterEvent> events;
  for (const auto& [i, j] : pairs) {
    const auto key = std::pair(agents_[i].id, agents_[j].id);
    const auto last = last_event_.find(key);
    if (last != last_event_.end() && time_ - last->second < cooldown_ - 1e-9) continue;
    last_event_[key] = time_;
    events.push_back({agents_[i].id, agents_[j].id, time_, synthesize_measurement(i, j)});
  }
  return events;
}

}  // namespace coloc

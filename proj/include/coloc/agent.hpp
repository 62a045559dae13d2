#ifndef COLOC_AGENT_HPP_
#define COLOC_AGENT_HPP_

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "coloc/filter.hpp"
#include "coloc/fusion.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/random.hpp"
#include "coloc/scenario.hpp"
#include "coloc/wire.hpp"
#include "coloc/world.hpp"

namespace coloc {

struct FusionRecord {
  double time = 0.0;
  AgentId peer = 0;
  Role role = Role::kObserved;
  std::size_t likelihood_evaluations = 0;
  bool rejected = false;
};

/// One agent's onboard estimator. It owns its particle cloud and random
/// stream and learns about other agents only through wire payloads.
class Agent {
 public:
  Agent(AgentId id, FilterConfig cfg, std::shared_ptr<const OccupancyGrid> map,
        ParticleCloud initial, Rng rng);

  /// Feeds one tick of odometry and ranging. Odometry accumulates until the
  /// configured motion threshold is crossed, then one MCL step runs. Returns
  /// whether a filter step ran.
  bool on_sensor(const SensorFrame& frame, double now);

  /// Observer side of an encounter: the measurement record followed by our
  /// cloud, both addressed to the observed agent.
  std::vector<Bytes> start_encounter(const EncounterEvent& event);

  /// Handles a payload from `from`. Returns the replies to send back to it.
  /// Throws ProtocolError on a malformed or unexpected payload, after
  /// discarding any half-finished exchange with that peer.
  std::vector<Bytes> receive(AgentId from, std::span<const std::uint8_t> payload, double now);

  AgentId id() const { return id_; }
  const ParticleCloud& cloud() const { return cloud_; }
  Pose2D estimate() const { return pose_estimate(cloud_); }
  const FilterConfig& config() const { return cfg_; }
  const std::vector<FusionRecord>& fusions() const { return fusions_; }
  std::size_t filter_steps() const { return filter_steps_; }

 private:
  struct Incoming {
    std::optional<RelativePoseMeas> measurement;
    std::optional<ParticleCloud> cloud;
  };

  Bytes snapshot();
  void fuse(const ParticleCloud& other, const RelativePoseMeas& meas, Role role, AgentId peer,
            double now);

  AgentId id_;
  FilterConfig cfg_;
  std::shared_ptr<const OccupancyGrid> map_;
  ParticleCloud cloud_;
  Rng rng_;
  std::optional<Pose2D> filter_odom_;
  std::size_t filter_steps_ = 0;
  // Exchanges we started and whose reply cloud is still outstanding.
  std::map<AgentId, RelativePoseMeas> awaiting_reply_;
  // Exchanges started by a peer that still lack the measurement or the cloud.
  std::map<AgentId, Incoming> incoming_;
  std::vector<FusionRecord> fusions_;
};

/// Builds an agent's initial cloud per its InitSpec from its own stream.
ParticleCloud initial_cloud(const AgentSpec& spec, const OccupancyGrid& map, Rng& rng);

/// The agent exactly as the swarm runtime constructs it for a given seed.
Agent make_agent(const AgentSpec& spec, std::size_t index,
                 std::shared_ptr<const OccupancyGrid> map, std::uint64_t seed);

}  // namespace coloc

#endif  // COLOC_AGENT_HPP_

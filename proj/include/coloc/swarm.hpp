#ifndef COLOC_SWARM_HPP_
#define COLOC_SWARM_HPP_

#include <memory>
#include <optional>
#include <vector>

#include "coloc/agent.hpp"
#include "coloc/channel.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/scenario.hpp"
#include "coloc/world.hpp"

namespace coloc {

enum class Mode { kCooperative, kStandalone };

const char* to_string(Mode mode);

struct TickReport {
  std::size_t tick = 0;
  double time = 0.0;
  std::vector<EncounterEvent> events;
  // Per agent, in scenario order: party to an encounter event this tick.
  std::vector<bool> in_encounter;
  // Per agent: clouds just before the encounter exchange, when requested.
  std::vector<ParticleCloud> pre_exchange;
};

/// Lockstep multi-agent runtime. Each tick: the world moves and senses,
/// every agent runs its own filter, encounters are detected on ground truth
/// and, in cooperative mode, exchanged over the channel and fused. Standalone
/// mode runs the identical world and detection streams but never exchanges.
class Swarm {
 public:
  Swarm(const Scenario& scenario, std::shared_ptr<const OccupancyGrid> map, Mode mode,
        std::uint64_t seed);

  TickReport tick(bool capture_pre_exchange = false);

  /// Runs the two-message protocol for one event and fuses on both sides.
  void exchange_and_fuse(const EncounterEvent& event);

  std::size_t size() const { return agents_.size(); }
  const Agent& agent(std::size_t i) const { return agents_[i]; }
  std::size_t index_of(AgentId id) const;
  const World& world() const { return world_; }
  const Channel& channel() const { return channel_; }
  const std::vector<SensorFrame>& last_frames() const { return last_frames_; }
  std::size_t protocol_errors() const { return protocol_errors_; }
  std::size_t ticks() const { return tick_; }
  double dt() const { return dt_; }

 private:
  void pump(double now);

  Mode mode_;
  double dt_;
  World world_;
  Channel channel_;
  std::vector<Agent> agents_;
  std::vector<SensorFrame> last_frames_;
  std::size_t tick_ = 0;
  std::size_t protocol_errors_ = 0;
};

}  // namespace coloc

#endif  // COLOC_SWARM_HPP_

#include "coloc/agent.hpp"

#include <algorithm>
#include <cmath>

namespace coloc {

namespace {

constexpr std::uint32_t kFilterStream = 4;

}  // namespace

Agent::Agent(AgentId id, FilterConfig cfg, std::shared_ptr<const OccupancyGrid> map,
             ParticleCloud initial, Rng rng)
    : id_(id), cfg_(std::move(cfg)), map_(std::move(map)), cloud_(std::move(initial)),
      rng_(std::move(rng)) {
  cfg_.validate();
  cloud_.validate();
  cloud_.agent_id = id_;
}

bool Agent::on_sensor(const SensorFrame& frame, double now) {
  if (!filter_odom_) filter_odom_ = frame.odometry.prev_odom;
  const OdometryReading u{*filter_odom_, frame.odometry.curr_odom};
  const double moved = distance(u.prev_odom, u.curr_odom);
  const double turned = std::abs(angle_diff(u.curr_odom.theta(), u.prev_odom.theta()));
  const bool gated = cfg_.update_min_distance > 0.0 || cfg_.update_min_angle > 0.0;
  if (gated && moved < cfg_.update_min_distance && turned < cfg_.update_min_angle) {
    return false;
  }
  cloud_ = mcl_step(cloud_, u, frame.scan, *map_, cfg_, rng_);
  cloud_.timestamp = now;
  filter_odom_ = u.curr_odom;
  ++filter_steps_;
  return true;
}

Bytes Agent::snapshot() {
  ParticleCloud c = cloud_.weights ? resample(cloud_, rng_) : cloud_;
  return encode(to_message(c));
}

std::vector<Bytes> Agent::start_encounter(const EncounterEvent& event) {
  awaiting_reply_.insert_or_assign(event.observed_id, event.measurement);
  return {encode(MeasurementRecord{event.observer_id, event.observed_id, event.measurement}),
          snapshot()};
}

void Agent::fuse(const ParticleCloud& other, const RelativePoseMeas& meas, Role role,
                 AgentId peer, double now) {
  FusionResult r = fuse_encounter(cloud_, other, meas, role, rng_);
  if (!r.rejected) cloud_ = std::move(r.cloud);
  fusions_.push_back({now, peer, role, r.likelihood_evaluations, r.rejected});
}

std::vector<Bytes> Agent::receive(AgentId from, std::span<const std::uint8_t> payload,
                                  double now) {
  try {
    switch (peek_kind(payload)) {
      case MessageKind::kMeasurement: {
        const MeasurementRecord rec = decode_measurement(payload);
        if (rec.observer_id != from || rec.observed_id != id_) {
          throw ProtocolError("measurement record is not addressed to this agent");
        }
        incoming_[from].measurement = rec.measurement;
        break;
      }
      case MessageKind::kCloud: {
        const CloudMessage msg = decode_cloud(payload);
        if (msg.sender_id != from) throw ProtocolError("cloud sender does not match link");
        auto in = incoming_.find(from);
        if (in != incoming_.end() && in->second.measurement && !in->second.cloud) {
          in->second.cloud = to_cloud(msg);
        } else if (auto wait = awaiting_reply_.find(from); wait != awaiting_reply_.end()) {
          const RelativePoseMeas meas = wait->second;
          awaiting_reply_.erase(wait);
          fuse(to_cloud(msg), meas, Role::kObserver, from, now);
          return {};
        } else {
          throw ProtocolError("unsolicited cloud message");
        }
        break;
      }
    }
  } catch (const ProtocolError&) {
    incoming_.erase(from);
    awaiting_reply_.erase(from);
    throw;
  }

  auto in = incoming_.find(from);
  if (in == incoming_.end() || !in->second.measurement || !in->second.cloud) return {};
  // The reply carries our belief from before this encounter.
  Bytes reply = snapshot();
  const Incoming done = std::move(in->second);
  incoming_.erase(in);
  fuse(*done.cloud, *done.measurement, Role::kObserved, from, now);
  return {std::move(reply)};
}

ParticleCloud initial_cloud(const AgentSpec& spec, const OccupancyGrid& map, Rng& rng) {
  const std::size_t k = spec.filter.particles;
  if (spec.init.pose) {
    const Pose2D& c = *spec.init.pose;
    std::normal_distribution<double> n01(0.0, 1.0);
    ParticleCloud cloud;
    cloud.particles.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double x = c.x() + spec.init.sigma_xy * n01(rng);
      const double y = c.y() + spec.init.sigma_xy * n01(rng);
      const double th = c.theta() + spec.init.sigma_theta * n01(rng);
      cloud.particles.emplace_back(x, y, th);
    }
    return cloud;
  }
  if (!spec.init.regions.empty()) {
    std::vector<std::uint32_t> support;
    for (const Box& b : spec.init.regions) {
      const auto cells = free_cells_in_box(map, b.x_min, b.y_min, b.x_max, b.y_max);
      support.insert(support.end(), cells.begin(), cells.end());
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    if (support.empty()) throw SamplingError("init region contains no FREE cell");
    return init_uniform(map, support, k, rng);
  }
  return init_uniform(map, k, rng);
}

Agent make_agent(const AgentSpec& spec, std::size_t index,
                 std::shared_ptr<const OccupancyGrid> map, std::uint64_t seed) {
  Rng rng = make_stream(seed, {kFilterStream, static_cast<std::uint32_t>(index)});
  ParticleCloud init = initial_cloud(spec, *map, rng);
  init.agent_id = spec.id;
  return Agent(spec.id, spec.filter, std::move(map), std::move(init), std::move(rng));
}

}  // namespace coloc

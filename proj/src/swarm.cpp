#include "coloc/swarm.hpp"

#include <stdexcept>

namespace coloc {

namespace {

constexpr std::uint32_t kChannelStream = 3;

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::kCooperative ? "coop" : "standalone";
}

Swarm::Swarm(const Scenario& scenario, std::shared_ptr<const OccupancyGrid> map, Mode mode,
             std::uint64_t seed)
    : mode_(mode),
      dt_(scenario.dt),
      world_(map, scenario.agents, seed, scenario.encounter_cooldown),
      channel_(scenario.channel.latency, scenario.channel.drop_probability,
               make_stream(seed, {kChannelStream})) {
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    agents_.push_back(make_agent(scenario.agents[i], i, map, seed));
  }
}

std::size_t Swarm::index_of(AgentId id) const {
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (agents_[i].id() == id) return i;
  }
  throw std::out_of_range("Swarm: unknown agent id " + std::to_string(id));
}

void Swarm::pump(double now) {
  // Replies generated during delivery may themselves be due immediately.
  while (true) {
    std::vector<Packet> due = channel_.deliver(now);
    if (due.empty()) return;
    for (Packet& p : due) {
      Agent& receiver = agents_[index_of(p.to)];
      try {
        for (Bytes& reply : receiver.receive(p.from, p.payload, now)) {
          channel_.send(p.to, p.from, std::move(reply), now);
        }
      } catch (const ProtocolError&) {
        ++protocol_errors_;
      }
    }
  }
}

void Swarm::exchange_and_fuse(const EncounterEvent& event) {
  const double now = world_.time();
  Agent& observer = agents_[index_of(event.observer_id)];
  for (Bytes& b : observer.start_encounter(event)) {
    channel_.send(event.observer_id, event.observed_id, std::move(b), now);
  }
  pump(now);
}

TickReport Swarm::tick(bool capture_pre_exchange) {
  TickReport report;
  last_frames_ = world_.step(dt_);
  ++tick_;
  report.tick = tick_;
  report.time = world_.time();

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    agents_[i].on_sensor(last_frames_[i], report.time);
  }

  report.events = world_.detect_encounters();
  report.in_encounter.assign(agents_.size(), false);
  for (const auto& ev : report.events) {
    report.in_encounter[index_of(ev.observer_id)] = true;
    report.in_encounter[index_of(ev.observed_id)] = true;
  }
  if (capture_pre_exchange) {
    for (const auto& a : agents_) report.pre_exchange.push_back(a.cloud());
  }

  if (mode_ == Mode::kCooperative) {
    for (const auto& ev : report.events) exchange_and_fuse(ev);
    // Packets still in flight from earlier ticks (non-zero latency).
    pump(report.time);
  }
  return report;
}

}  // namespace coloc

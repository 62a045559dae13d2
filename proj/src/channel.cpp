#include "coloc/channel.hpp"

#include <stdexcept>

namespace coloc {

Channel::Channel(double latency, double drop_probability, Rng rng)
    : latency_(latency), drop_probability_(drop_probability), rng_(std::move(rng)) {
  if (!(latency >= 0.0)) throw std::invalid_argument("Channel: latency must be >= 0");
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
    throw std::invalid_argument("Channel: drop probability must lie in [0, 1]");
  }
}

void Channel::send(AgentId from, AgentId to, Bytes payload, double now) {
  ++sent_;
  bytes_sent_ += payload.size();
  // Always draw, so the loss pattern does not depend on the drop setting.
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
  if (u < drop_probability_) {
    ++dropped_;
    return;
  }
  queue_.push_back({from, to, std::move(payload), now + latency_});
}

std::vector<Packet> Channel::deliver(double now) {
  std::vector<Packet> due;
  std::deque<Packet> keep;
  for (auto& p : queue_) {
    if (p.deliver_at <= now + 1e-9) {
      due.push_back(std::move(p));
    } else {
      keep.push_back(std::move(p));
    }
  }
  queue_ = std::move(keep);
  return due;
}

}  // namespace coloc

#ifndef COLOC_CHANNEL_HPP_
#define COLOC_CHANNEL_HPP_

#include <cstddef>
#include <deque>
#include <vector>

#include "coloc/filter.hpp"
#include "coloc/random.hpp"
#include "coloc/wire.hpp"

namespace coloc {

struct Packet {
  AgentId from = 0;
  AgentId to = 0;
  Bytes payload;
  double deliver_at = 0.0;
};

/// Simulated broadcast-free link between agents: fixed latency, independent
/// per-packet loss. Delivery order is send order among packets due together.
class Channel {
 public:
  Channel(double latency, double drop_probability, Rng rng);

  void send(AgentId from, AgentId to, Bytes payload, double now);

  /// Removes and returns every packet due at or before `now`.
  std::vector<Packet> deliver(double now);

  bool idle() const { return queue_.empty(); }

  std::size_t sent() const { return sent_; }
  std::size_t dropped() const { return dropped_; }
  std::size_t bytes_sent() const { return bytes_sent_; }

 private:
  double latency_;
  double drop_probability_;
  Rng rng_;
  std::deque<Packet> queue_;
  std::size_t sent_ = 0;
  std::size_t dropped_ = 0;
  std::size_t bytes_sent_ = 0;
};

}  // namespace coloc

#endif  // COLOC_CHANNEL_HPP_

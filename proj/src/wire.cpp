#include "coloc/wire.hpp"

#include <bit>
#include <cstring>
#include <string>

namespace coloc {

namespace {

constexpr char kCloudMagic[4] = {'C', 'P', 'C', 'M'};
constexpr char kMeasMagic[4] = {'C', 'P', 'R', 'M'};

class Writer {
 public:
  explicit Writer(std::size_t reserve) { out_.reserve(reserve); }

  void magic(const char (&m)[4]) {
    for (char c : m) out_.push_back(static_cast<std::uint8_t>(c));
  }
  template <typename U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> b, const char* what) : b_(b), what_(what) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ProtocolError(std::string(what_) + ": " + msg + " (offset " + std::to_string(pos_) +
                        ")");
  }

  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) fail("truncated payload");
  }
  void magic(const char (&m)[4]) {
    need(4);
    if (std::memcmp(b_.data() + pos_, m, 4) != 0) fail("bad magic");
    pos_ += 4;
  }
  template <typename U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(b_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  std::span<const std::uint8_t> b_;
  const char* what_;
  std::size_t pos_ = 0;
};

}  // namespace

Bytes encode(const CloudMessage& msg) {
  Writer w(kCloudHeaderBytes + kCloudRecordBytes * msg.particles.size());
  w.magic(kCloudMagic);
  w.uint<std::uint16_t>(kWireVersion);
  w.uint<std::uint32_t>(msg.sender_id);
  w.f64(msg.timestamp);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(msg.particles.size()));
  for (const Pose2D& p : msg.particles) {
    w.f64(p.x());
    w.f64(p.y());
    w.f64(p.theta());
  }
  return w.take();
}

Bytes encode(const MeasurementRecord& rec) {
  Writer w(kMeasurementBytes);
  w.magic(kMeasMagic);
  w.uint<std::uint16_t>(kWireVersion);
  w.uint<std::uint32_t>(rec.observer_id);
  w.uint<std::uint32_t>(rec.observed_id);
  const RelativePoseMeas& m = rec.measurement;
  w.f64(m.timestamp());
  w.f64(m.range());
  w.f64(m.bearing());
  w.f64(m.sigma_range());
  w.f64(m.sigma_bearing());
  return w.take();
}

MessageKind peek_kind(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4) {
    if (std::memcmp(bytes.data(), kCloudMagic, 4) == 0) return MessageKind::kCloud;
    if (std::memcmp(bytes.data(), kMeasMagic, 4) == 0) return MessageKind::kMeasurement;
  }
  throw ProtocolError("unknown message kind");
}

CloudMessage decode_cloud(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "cloud message");
  r.magic(kCloudMagic);
  if (r.uint<std::uint16_t>() != kWireVersion) r.fail("unsupported version");
  CloudMessage msg;
  msg.sender_id = r.uint<std::uint32_t>();
  msg.timestamp = r.f64();
  const std::uint32_t k = r.uint<std::uint32_t>();
  if (k == 0) r.fail("empty particle set");
  if (r.remaining() != static_cast<std::size_t>(k) * kCloudRecordBytes) {
    r.fail("payload length does not match K");
  }
  msg.particles.reserve(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    const double x = r.f64();
    const double y = r.f64();
    const double theta = r.f64();
    try {
      msg.particles.emplace_back(x, y, theta);
    } catch (const std::invalid_argument&) {
      r.fail("non-finite particle " + std::to_string(i));
    }
  }
  return msg;
}

MeasurementRecord decode_measurement(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "measurement record");
  r.magic(kMeasMagic);
  if (r.uint<std::uint16_t>() != kWireVersion) r.fail("unsupported version");
  MeasurementRecord rec;
  rec.observer_id = r.uint<std::uint32_t>();
  rec.observed_id = r.uint<std::uint32_t>();
  const double t = r.f64();
  const double range = r.f64();
  const double bearing = r.f64();
  const double sr = r.f64();
  const double sb = r.f64();
  if (r.remaining() != 0) r.fail("trailing bytes");
  if (rec.observer_id == rec.observed_id) r.fail("observer and observed are the same agent");
  try {
    rec.measurement = RelativePoseMeas(range, bearing, sr, sb, t);
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return rec;
}

CloudMessage to_message(const ParticleCloud& cloud) {
  if (cloud.weights) {
    throw std::invalid_argument("to_message: resample the cloud before sending it");
  }
  return {cloud.agent_id, cloud.timestamp, cloud.particles};
}

ParticleCloud to_cloud(const CloudMessage& msg) {
  ParticleCloud c;
  c.agent_id = msg.sender_id;
  c.timestamp = msg.timestamp;
  c.particles = msg.particles;
  return c;
}

}  // namespace coloc

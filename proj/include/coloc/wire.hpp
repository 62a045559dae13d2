#ifndef COLOC_WIRE_HPP_
#define COLOC_WIRE_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "coloc/filter.hpp"
#include "coloc/geometry.hpp"

namespace coloc {

// Little-endian binary encodings of the two inter-agent messages.
//
//   cloud:       "CPCM" u16 version, u32 sender_id, f64 timestamp, u32 K,
//                K x (f64 x, f64 y, f64 theta)
//   measurement: "CPRM" u16 version, u32 observer_id, u32 observed_id,
//                f64 timestamp, f64 range, f64 bearing, f64 sigma_range,
//                f64 sigma_bearing

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint16_t kWireVersion = 1;
inline constexpr std::size_t kCloudHeaderBytes = 4 + 2 + 4 + 8 + 4;
inline constexpr std::size_t kCloudRecordBytes = 24;
inline constexpr std::size_t kMeasurementBytes = 4 + 2 + 4 + 4 + 8 * 5;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CloudMessage {
  AgentId sender_id = 0;
  double timestamp = 0.0;
  std::vector<Pose2D> particles;

  bool operator==(const CloudMessage&) const = default;
};

struct MeasurementRecord {
  AgentId observer_id = 0;
  AgentId observed_id = 0;
  RelativePoseMeas measurement{0.0, 0.0, 1.0, 1.0};

  bool operator==(const MeasurementRecord&) const = default;
};

enum class MessageKind { kCloud, kMeasurement };

Bytes encode(const CloudMessage& msg);
Bytes encode(const MeasurementRecord& rec);

/// Identifies a payload by its magic; throws ProtocolError if unknown.
MessageKind peek_kind(std::span<const std::uint8_t> bytes);

/// Strict decoders: wrong magic, version, length, K = 0 or invalid field
/// values raise ProtocolError.
CloudMessage decode_cloud(std::span<const std::uint8_t> bytes);
MeasurementRecord decode_measurement(std::span<const std::uint8_t> bytes);

/// The payload of an unweighted cloud. Throws std::invalid_argument if the
/// cloud still carries weights.
CloudMessage to_message(const ParticleCloud& cloud);
ParticleCloud to_cloud(const CloudMessage& msg);

}  // namespace coloc

#endif  // COLOC_WIRE_HPP_

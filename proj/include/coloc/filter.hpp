#ifndef COLOC_FILTER_HPP_
#define COLOC_FILTER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coloc/geometry.hpp"
#include "coloc/models.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/random.hpp"

namespace coloc {

using AgentId = std::uint32_t;

/// An agent's belief: K pose particles, optionally weighted. Absent weights
/// mean uniform 1/K (the state after resampling).
struct ParticleCloud {
  AgentId agent_id = 0;
  double timestamp = 0.0;
  std::vector<Pose2D> particles;
  std::optional<std::vector<double>> weights;

  std::size_t size() const { return particles.size(); }
  double weight(std::size_t k) const {
    return weights ? (*weights)[k] : 1.0 / static_cast<double>(particles.size());
  }

  /// Throws std::invalid_argument unless K >= 1 and weights, when present,
  /// are non-negative, K long and sum to 1 within 1e-9.
  void validate() const;

  bool operator==(const ParticleCloud&) const = default;
};

inline constexpr double kWeightSumTolerance = 1e-9;

struct FilterConfig {
  std::size_t particles = 1000;
  MotionNoiseParams motion;
  RangeModelParams range;
  // Resample when ESS < resample_threshold * K; 1.0 resamples every step.
  double resample_threshold = 0.5;
  // Odometry accumulates until the agent has moved or turned this much; the
  // runtime only then runs a filter step. Zero means every tick.
  double update_min_distance = 0.0;
  double update_min_angle = 0.0;

  void validate() const;
};

struct StepDiagnostics {
  // Every weight underflowed and uniform weights were substituted.
  bool weight_underflow = false;
  bool resampled = false;
};

ParticleCloud init_uniform(const OccupancyGrid& map, std::size_t k, Rng& rng);

/// As above, drawing only from the given FREE cells.
ParticleCloud init_uniform(const OccupancyGrid& map, std::span<const std::uint32_t> support,
                           std::size_t k, Rng& rng);

/// Propagates every particle through the motion model; weights carried over.
ParticleCloud predict(const ParticleCloud& cloud, const OdometryReading& u,
                      const FilterConfig& cfg, Rng& rng);

/// Multiplies each particle's weight by its scan likelihood and renormalizes.
/// Done in log space, so only non-finite inputs can exhaust the weights; that
/// case falls back to uniform weights and sets diag->weight_underflow.
ParticleCloud update_weights(const ParticleCloud& cloud, const RangeScan& z,
                             const OccupancyGrid& map, const FilterConfig& cfg,
                             StepDiagnostics* diag = nullptr);

double effective_sample_size(const ParticleCloud& cloud);

/// Low-variance (systematic) resampling: one uniform offset, K evenly spaced
/// pointers. Each particle is copied floor(K*w) or ceil(K*w) times. Throws
/// std::invalid_argument when the weights are not normalized.
ParticleCloud resample(const ParticleCloud& cloud, Rng& rng);

/// Picks `count` indices from normalized weights by systematic resampling.
std::vector<std::size_t> systematic_indices(std::span<const double> weights,
                                            std::size_t count, Rng& rng);

/// predict -> update_weights -> resample when ESS < resample_threshold * K.
ParticleCloud mcl_step(const ParticleCloud& cloud, const OdometryReading& u,
                       const RangeScan& z, const OccupancyGrid& map, const FilterConfig& cfg,
                       Rng& rng, StepDiagnostics* diag = nullptr);

/// Weighted mean position and circular-mean heading.
Pose2D pose_estimate(const ParticleCloud& cloud);

}  // namespace coloc

#endif  // COLOC_FILTER_HPP_

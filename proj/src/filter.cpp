#include "coloc/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coloc {

void ParticleCloud::validate() const {
  if (particles.empty()) throw std::invalid_argument("ParticleCloud: K must be >= 1");
  if (!weights) return;
  if (weights->size() != particles.size()) {
    throw std::invalid_argument("ParticleCloud: weight count differs from particle count");
  }
  double sum = 0.0;
  for (double w : *weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("ParticleCloud: weights must be finite and >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("ParticleCloud: weights are not normalized");
  }
}

void FilterConfig::validate() const {
  if (particles < 1) throw std::invalid_argument("FilterConfig: particles must be >= 1");
  if (!(resample_threshold >= 0.0 && resample_threshold <= 1.0)) {
    throw std::invalid_argument("FilterConfig: resample_threshold must lie in [0, 1]");
  }
  if (!(update_min_distance >= 0.0) || !(update_min_angle >= 0.0)) {
    throw std::invalid_argument("FilterConfig: update thresholds must be >= 0");
  }
  motion.validate();
  range.validate();
}

ParticleCloud init_uniform(const OccupancyGrid& map, std::span<const std::uint32_t> support,
                           std::size_t k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("init_uniform: K must be >= 1");
  ParticleCloud cloud;
  cloud.particles.reserve(k);
  for (std::size_t i = 0; i < k; ++i) cloud.particles.push_back(sample_free_pose(map, support, rng));
  return cloud;
}

ParticleCloud init_uniform(const OccupancyGrid& map, std::size_t k, Rng& rng) {
  if (map.free_cells().empty()) throw SamplingError("init_uniform: map has no FREE cell");
  return init_uniform(map, map.free_cells(), k, rng);
}

ParticleCloud predict(const ParticleCloud& cloud, const OdometryReading& u,
                      const FilterConfig& cfg, Rng& rng) {
  ParticleCloud out = cloud;
  for (auto& p : out.particles) p = sample_motion(p, u, cfg.motion, rng);
  return out;
}

ParticleCloud update_weights(const ParticleCloud& cloud, const RangeScan& z,
                             const OccupancyGrid& map, const FilterConfig& cfg,
                             StepDiagnostics* diag) {
  cloud.validate();
  z.validate();
  const std::size_t k = cloud.size();
  std::vector<double> log_w(k);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double prior = cloud.weight(i);
    log_w[i] = (prior > 0.0 ? std::log(prior) : -std::numeric_limits<double>::infinity()) +
               log_range_likelihood(z, cloud.particles[i], map, cfg.range);
    max_log = std::max(max_log, log_w[i]);
  }

  ParticleCloud out = cloud;
  std::vector<double> w(k);
  double sum = 0.0;
  if (std::isfinite(max_log)) {
    for (std::size_t i = 0; i < k; ++i) {
      w[i] = std::exp(log_w[i] - max_log);
      sum += w[i];
    }
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(k));
    if (diag) diag->weight_underflow = true;
  } else {
    for (double& v : w) v /= sum;
  }
  out.weights = std::move(w);
  return out;
}

double effective_sample_size(const ParticleCloud& cloud) {
  if (!cloud.weights) return static_cast<double>(cloud.size());
  double sq = 0.0;
  for (double w : *cloud.weights) sq += w * w;
  return 1.0 / sq;
}

std::vector<std::size_t> systematic_indices(std::span<const double> weights,
                                            std::size_t count, Rng& rng) {
  if (weights.empty()) throw std::invalid_argument("systematic_indices: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("resample: weights must be finite and >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw std::invalid_argument("resample: weights are not normalized");
  }

  const double scale = static_cast<double>(count);
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::vector<std::size_t> out;
  out.reserve(count);
  std::size_t i = 0;
  double cumulative = weights[0] * scale;
  for (std::size_t j = 0; j < count; ++j) {
    const double pointer = offset + static_cast<double>(j);
    while (pointer >= cumulative && i + 1 < weights.size()) {
      ++i;
      cumulative += weights[i] * scale;
    }
    out.push_back(i);
  }
  return out;
}

ParticleCloud resample(const ParticleCloud& cloud, Rng& rng) {
  if (cloud.particles.empty()) throw std::invalid_argument("resample: empty cloud");
  ParticleCloud out;
  out.agent_id = cloud.agent_id;
  out.timestamp = cloud.timestamp;
  if (!cloud.weights) {
    out.particles = cloud.particles;
    return out;
  }
  const auto idx = systematic_indices(*cloud.weights, cloud.size(), rng);
  out.particles.reserve(idx.size());
  for (std::size_t i : idx) out.particles.push_back(cloud.particles[i]);
  return out;
}

ParticleCloud mcl_step(const ParticleCloud& cloud, const OdometryReading& u,
                       const RangeScan& z, const OccupancyGrid& map, const FilterConfig& cfg,
                       Rng& rng, StepDiagnostics* diag) {
  ParticleCloud out = update_weights(predict(cloud, u, cfg, rng), z, map, cfg, diag);
  if (effective_sample_size(out) < cfg.resample_threshold * static_cast<double>(out.size())) {
    out = resample(out, rng);
    if (diag) diag->resampled = true;
  }
  return out;
}

Pose2D pose_estimate(const ParticleCloud& cloud) {
  if (cloud.particles.empty()) throw std::invalid_argument("pose_estimate: empty cloud");
  double x = 0.0, y = 0.0, s = 0.0, c = 0.0, total = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double w = cloud.weight(i);
    const Pose2D& p = cloud.particles[i];
    x += w * p.x();
    y += w * p.y();
    s += w * std::sin(p.theta());
    c += w * std::cos(p.theta());
    total += w;
  }
  return {x / total, y / total, std::atan2(s, c)};
}

}  // namespace coloc

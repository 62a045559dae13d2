#include "coloc/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace coloc {

namespace {

constexpr double kInvSqrtTwoPi = 0.3989422804014327;

// Below this translation the direction of travel is numerically meaningless,
// so rot1 stops contributing rotation noise.
constexpr double kMinTransForHeading = 0.01;

double draw(double sigma, Rng& rng) {
  if (sigma <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

// Noise magnitude for a rotation that may describe driving backwards.
double rotation_noise_basis(double rot) {
  return std::min(std::abs(rot), std::abs(angle_diff(rot, kPi)));
}

}  // namespace

void MotionNoiseParams::validate() const {
  for (double a : alpha) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("MotionNoiseParams: alphas must be finite and >= 0");
    }
  }
}

OdometryIncrement decompose(const OdometryReading& u) {
  const double dx = u.curr_odom.x() - u.prev_odom.x();
  const double dy = u.curr_odom.y() - u.prev_odom.y();
  OdometryIncrement inc;
  inc.trans = std::hypot(dx, dy);
  inc.rot1 = inc.trans > 0.0 ? angle_diff(std::atan2(dy, dx), u.prev_odom.theta()) : 0.0;
  inc.rot2 = angle_diff(angle_diff(u.curr_odom.theta(), u.prev_odom.theta()), inc.rot1);
  return inc;
}

Pose2D sample_motion(const Pose2D& x_prev, const OdometryReading& u,
                     const MotionNoiseParams& params, Rng& rng) {
  const auto [a1, a2, a3, a4] = params.alpha;
  const OdometryIncrement inc = decompose(u);
  const double r1 = inc.trans < kMinTransForHeading ? 0.0 : rotation_noise_basis(inc.rot1);
  const double r2 = rotation_noise_basis(inc.rot2);
  const double t2 = inc.trans * inc.trans;

  const double rot1 = inc.rot1 - draw(std::sqrt(a1 * r1 * r1 + a2 * t2), rng);
  const double trans = inc.trans - draw(std::sqrt(a3 * t2 + a4 * (r1 * r1 + r2 * r2)), rng);
  const double rot2 = inc.rot2 - draw(std::sqrt(a1 * r2 * r2 + a2 * t2), rng);

  const double heading = x_prev.theta() + rot1;
  return {x_prev.x() + trans * std::cos(heading), x_prev.y() + trans * std::sin(heading),
          heading + rot2};
}

void RangeScan::validate() const {
  if (beam_angles.empty() || beam_angles.size() != ranges.size()) {
    throw std::invalid_argument("RangeScan: need >= 1 beam and matching angle/range counts");
  }
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw std::invalid_argument("RangeScan: max_range must be positive");
  }
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (!(ranges[i] >= 0.0 && ranges[i] <= max_range)) {
      throw std::invalid_argument("RangeScan: beam " + std::to_string(i) +
                                  " range outside [0, max_range]");
    }
    if (!std::isfinite(beam_angles[i])) {
      throw std::invalid_argument("RangeScan: non-finite beam angle");
    }
  }
}

void RangeModelParams::validate() const {
  if (!(z_hit >= 0.0 && z_rand >= 0.0 && z_max >= 0.0)) {
    throw std::invalid_argument("RangeModelParams: mixture weights must be >= 0");
  }
  if (std::abs(z_hit + z_rand + z_max - 1.0) > 1e-9) {
    throw std::invalid_argument("RangeModelParams: mixture weights must sum to 1");
  }
  if (!(sigma_hit > 0.0) || !std::isfinite(sigma_hit)) {
    throw std::invalid_argument("RangeModelParams: sigma_hit must be positive");
  }
}

double gaussian_pdf(double x, double mean, double sigma) {
  const double u = (x - mean) / sigma;
  return kInvSqrtTwoPi / sigma * std::exp(-0.5 * u * u);
}

double log_range_likelihood(const RangeScan& z, const Pose2D& x, const OccupancyGrid& map,
                            const RangeModelParams& params) {
  z.validate();
  const double floor_total = kBeamLogFloor * static_cast<double>(z.ranges.size());
  const auto cell = map.cell_of(x.x(), x.y());
  if (!cell || map.at(cell->col, cell->row) == CellState::kOccupied) return floor_total;

  const double rand_term = params.z_rand / z.max_range;
  double total = 0.0;
  for (std::size_t i = 0; i < z.ranges.size(); ++i) {
    const double expected = raycast(map, x, z.beam_angles[i], z.max_range);
    const double measured = z.ranges[i];
    double p = params.z_hit * gaussian_pdf(measured, expected, params.sigma_hit) + rand_term;
    if (measured >= z.max_range) p += params.z_max;
    total += p > 0.0 ? std::max(std::log(p), kBeamLogFloor) : kBeamLogFloor;
  }
  return total;
}

double range_likelihood(const RangeScan& z, const Pose2D& x, const OccupancyGrid& map,
                        const RangeModelParams& params) {
  return std::exp(log_range_likelihood(z, x, map, params));
}

double relative_pose_likelihood(const RelativePoseMeas& r_meas, const Pose2D& observer,
                                const Pose2D& target) {
  const RangeBearing predicted = predict_relative_pose(observer, target);
  const double range_err = r_meas.range() - predicted.range;
  const double bearing_err = angle_diff(r_meas.bearing(), predicted.bearing);
  return gaussian_pdf(range_err, 0.0, r_meas.sigma_range()) *
         gaussian_pdf(bearing_err, 0.0, r_meas.sigma_bearing());
}

}  // namespace coloc

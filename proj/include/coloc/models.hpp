#ifndef COLOC_MODELS_HPP_
#define COLOC_MODELS_HPP_

#include <array>
#include <vector>

#include "coloc/geometry.hpp"
#include "coloc/occupancy_grid.hpp"
#include "coloc/random.hpp"

namespace coloc {

/// Odometry-frame poses bracketing one motion interval.
struct OdometryReading {
  Pose2D prev_odom;
  Pose2D curr_odom;
};

/// Noise gains of the rot1/trans/rot2 odometry model:
/// rotation-from-rotation, rotation-from-translation,
/// translation-from-translation, translation-from-rotation.
struct MotionNoiseParams {
  std::array<double, 4> alpha{0.05, 0.05, 0.05, 0.05};

  void validate() const;
};

struct OdometryIncrement {
  double rot1 = 0.0;
  double trans = 0.0;
  double rot2 = 0.0;
};

OdometryIncrement decompose(const OdometryReading& u);

/// Draws x_t ~ p(x_t | x_{t-1}, u_t). Each increment is perturbed by a
/// zero-mean Gaussian with std sqrt(a1*rot^2 + a2*trans^2) for rotations and
/// sqrt(a3*trans^2 + a4*(rot1^2 + rot2^2)) for the translation.
Pose2D sample_motion(const Pose2D& x_prev, const OdometryReading& u,
                     const MotionNoiseParams& params, Rng& rng);

struct RangeScan {
  std::vector<double> beam_angles;  // body frame, radians
  std::vector<double> ranges;       // metres
  double max_range = 0.0;

  void validate() const;
};

/// Beam-model mixture: z_hit * N(z; z_hat, sigma_hit) + z_rand / max_range
/// + z_max * [z == max_range].
struct RangeModelParams {
  double z_hit = 0.8;
  double z_rand = 0.15;
  double z_max = 0.05;
  double sigma_hit = 0.1;

  void validate() const;
};

/// Per-beam log-likelihood never drops below this.
inline constexpr double kBeamLogFloor = -20.0;

/// Sum over beams of the floored per-beam log-likelihood. A pose outside the
/// grid or inside an OCCUPIED cell scores the floor on every beam.
double log_range_likelihood(const RangeScan& z, const Pose2D& x, const OccupancyGrid& map,
                            const RangeModelParams& params);

/// exp(log_range_likelihood). Scans with many beams can underflow this; the
/// filter works with the log form.
double range_likelihood(const RangeScan& z, const Pose2D& x, const OccupancyGrid& map,
                        const RangeModelParams& params);

double gaussian_pdf(double x, double mean, double sigma);

/// p(r | observer, target): independent Gaussians on range error and on the
/// wrapped bearing error, bearing taken in the observer's body frame.
double relative_pose_likelihood(const RelativePoseMeas& r_meas, const Pose2D& observer,
                                const Pose2D& target);

}  // namespace coloc

#endif  // COLOC_MODELS_HPP_

#ifndef COLOC_GEOMETRY_HPP_
#define COLOC_GEOMETRY_HPP_

#include <numbers>

namespace coloc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on NaN/inf.
double normalize_angle(double a);

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Planar pose in the map frame. Construction enforces finite coordinates and
/// a heading in (-pi, pi].
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double theta);

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }

  bool operator==(const Pose2D&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

/// Rigid-body composition a (+) b: b expressed in a's frame, mapped to the
/// frame a is expressed in.
Pose2D compose(const Pose2D& a, const Pose2D& b);

/// The pose g such that compose(g, a) is the identity.
Pose2D inverse(const Pose2D& a);

/// The pose of `to` expressed in the frame of `from`, i.e. inverse(from) (+) to.
Pose2D between(const Pose2D& from, const Pose2D& to);

double distance(const Pose2D& a, const Pose2D& b);

/// Smallest signed difference a - b, wrapped into (-pi, pi].
double angle_diff(double a, double b);

struct RangeBearing {
  double range = 0.0;
  double bearing = 0.0;
  /// Set when observer and target positions coincide; bearing is then 0.
  bool degenerate = false;
};

/// Range to the target and bearing to it in the observer's body frame.
RangeBearing predict_relative_pose(const Pose2D& observer, const Pose2D& target);

/// Range/bearing measurement of one agent taken by another, with the
/// standard deviations of its independent Gaussian errors.
class RelativePoseMeas {
 public:
  RelativePoseMeas(double range, double bearing, double sigma_range,
                   double sigma_bearing, double timestamp = 0.0);

  double range() const { return range_; }
  double bearing() const { return bearing_; }
  double sigma_range() const { return sigma_range_; }
  double sigma_bearing() const { return sigma_bearing_; }
  double timestamp() const { return timestamp_; }

  bool operator==(const RelativePoseMeas&) const = default;

 private:
  double range_;
  double bearing_;
  double sigma_range_;
  double sigma_bearing_;
  double timestamp_;
};

}  // namespace coloc

#endif  // COLOC_GEOMETRY_HPP_

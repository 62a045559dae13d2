#include "coloc/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace coloc {

double normalize_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  // remainder() is exact and lands in [-pi, pi]; fold the closed end.
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r = kPi;
  return r;
}

Pose2D::Pose2D(double x, double y, double theta)
    : x_(x), y_(y), theta_(normalize_angle(theta)) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("Pose2D: non-finite position");
  }
}

Pose2D compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  return {a.x() + c * b.x() - s * b.y(), a.y() + s * b.x() + c * b.y(),
          a.theta() + b.theta()};
}

Pose2D inverse(const Pose2D& a) {
  const double c = std::cos(a.theta());
  const double s = std::sin(a.theta());
  return {-c * a.x() - s * a.y(), s * a.x() - c * a.y(), -a.theta()};
}

Pose2D between(const Pose2D& from, const Pose2D& to) {
  const double c = std::cos(from.theta());
  const double s = std::sin(from.theta());
  const double dx = to.x() - from.x();
  const double dy = to.y() - from.y();
  return {c * dx + s * dy, -s * dx + c * dy, to.theta() - from.theta()};
}

double distance(const Pose2D& a, const Pose2D& b) {
  return std::hypot(b.x() - a.x(), b.y() - a.y());
}

double angle_diff(double a, double b) { return normalize_angle(a - b); }

RangeBearing predict_relative_pose(const Pose2D& observer, const Pose2D& target) {
  const double dx = target.x() - observer.x();
  const double dy = target.y() - observer.y();
  if (dx == 0.0 && dy == 0.0) {
    return {0.0, 0.0, true};
  }
  return {std::hypot(dx, dy), normalize_angle(std::atan2(dy, dx) - observer.theta()),
          false};
}

RelativePoseMeas::RelativePoseMeas(double range, double bearing, double sigma_range,
                                   double sigma_bearing, double timestamp)
    : range_(range),
      bearing_(normalize_angle(bearing)),
      sigma_range_(sigma_range),
      sigma_bearing_(sigma_bearing),
      timestamp_(timestamp) {
  if (!(range >= 0.0) || !std::isfinite(range)) {
    throw std::invalid_argument("RelativePoseMeas: range must be finite and >= 0");
  }
  if (!(sigma_range > 0.0) || !(sigma_bearing > 0.0) || !std::isfinite(sigma_range) ||
      !std::isfinite(sigma_bearing)) {
    throw std::invalid_argument("RelativePoseMeas: noise sigmas must be positive");
  }
  if (!std::isfinite(timestamp)) {
    throw std::invalid_argument("RelativePoseMeas: non-finite timestamp");
  }
}

}  // namespace coloc

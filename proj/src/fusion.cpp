#include "coloc/fusion.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "coloc/models.hpp"

namespace coloc {

FusionResult fuse_encounter(const ParticleCloud& own, const ParticleCloud& other,
                            const RelativePoseMeas& r_meas, Role own_role, Rng& rng) {
  if (other.particles.empty()) {
    throw std::invalid_argument("fuse_encounter: other cloud is empty");
  }
  if (own.particles.empty()) throw std::invalid_argument("fuse_encounter: own cloud is empty");
  own.validate();
  other.validate();

  // Pair sampling below assumes equally weighted particles.
  const ParticleCloud own_u = own.weights ? resample(own, rng) : own;
  const ParticleCloud other_u = other.weights ? resample(other, rng) : other;

  const std::size_t k = own_u.size();
  std::uniform_int_distribution<std::size_t> pick_own(0, k - 1);
  std::uniform_int_distribution<std::size_t> pick_other(0, other_u.size() - 1);

  FusionResult result;
  std::vector<std::size_t> drawn(k);
  std::vector<double> w(k);
  double sum = 0.0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    const std::size_t a = pick_own(rng);
    const std::size_t b = pick_other(rng);
    const Pose2D& mine = own_u.particles[a];
    const Pose2D& theirs = other_u.particles[b];
    w[slot] = own_role == Role::kObserver ? relative_pose_likelihood(r_meas, mine, theirs)
                                          : relative_pose_likelihood(r_meas, theirs, mine);
    ++result.likelihood_evaluations;
    drawn[slot] = a;
    sum += w[slot];
  }

  if (!(sum > 0.0) || !std::isfinite(sum)) {
    result.cloud = own;
    result.rejected = true;
    return result;
  }
  for (double& v : w) v /= sum;

  result.cloud.agent_id = own.agent_id;
  result.cloud.timestamp = own.timestamp;
  result.cloud.particles.reserve(k);
  for (std::size_t slot : systematic_indices(w, k, rng)) {
    result.cloud.particles.push_back(own_u.particles[drawn[slot]]);
  }
  return result;
}

}  // namespace coloc

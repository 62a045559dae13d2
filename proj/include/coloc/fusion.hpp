#ifndef COLOC_FUSION_HPP_
#define COLOC_FUSION_HPP_

#include <cstddef>

#include "coloc/filter.hpp"
#include "coloc/geometry.hpp"
#include "coloc/random.hpp"

namespace coloc {

/// Which side of the relative-pose measurement the fusing agent is on.
enum class Role {
  kObserver,  // we measured the other agent
  kObserved,  // the other agent measured us
};

struct FusionResult {
  ParticleCloud cloud;
  // Relative-pose likelihood calls made; always the own cloud's K.
  std::size_t likelihood_evaluations = 0;
  // Every pair weight underflowed: the measurement contradicts both clouds
  // and `cloud` is the own input returned untouched.
  bool rejected = false;
};

/// Encounter update of one agent's cloud, linear in K.
///
/// For each of the K own slots a pose is drawn uniformly from each cloud and
/// the pair is weighted by p(r | observer, target), the roles deciding which
/// pose is the observer. The K own poses are then resampled by the normalized
/// pair weights. Weighted inputs are first resampled to uniform. Output poses
/// are exact copies of input own poses; K_own is preserved and the other
/// cloud may be any non-empty size.
FusionResult fuse_encounter(const ParticleCloud& own, const ParticleCloud& other,
                            const RelativePoseMeas& r_meas, Role own_role, Rng& rng);

}  // namespace coloc

#endif  // COLOC_FUSION_HPP_

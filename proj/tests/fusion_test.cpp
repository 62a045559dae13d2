#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <set>

#include "coloc/fusion.hpp"
#include "coloc/models.hpp"

using namespace coloc;

namespace {

ParticleCloud Cloud(std::vector<Pose2D> poses, AgentId id = 0) {
  ParticleCloud c;
  c.agent_id = id;
  c.particles = std::move(poses);
  return c;
}

ParticleCloud RandomCloud(Rng& rng, std::size_t k, double x0, double x1, double y0, double y1) {
  std::uniform_real_distribution<double> x(x0, x1), y(y0, y1), th(-kPi, kPi);
  std::vector<Pose2D> poses;
  for (std::size_t i = 0; i < k; ++i) poses.emplace_back(x(rng), y(rng), th(rng));
  return Cloud(std::move(poses));
}

bool BitwiseEqual(const Pose2D& a, const Pose2D& b) {
  return std::memcmp(&a, &b, sizeof(Pose2D)) == 0;
}

}  // namespace

TEST(FuseEncounter, DominantPairWins) {
  // Half the own cloud sits where the measurement says; the rest is far off.
  const Pose2D good(1.0, 0.0, 0.4);
  std::vector<Pose2D> own;
  for (int i = 0; i < 50; ++i) own.push_back(i % 2 ? good : Pose2D(-6.0 - i, 3.0, 0.0));
  const auto other = Cloud({Pose2D(0, 0, 0)}, 1);
  const RelativePoseMeas r(1.0, 0.0, 0.05, 0.05);
  Rng rng(1);
  const auto res = fuse_encounter(Cloud(own), other, r, Role::kObserved, rng);
  ASSERT_FALSE(res.rejected);
  ASSERT_EQ(res.cloud.size(), 50u);
  for (const auto& p : res.cloud.particles) ASSERT_TRUE(BitwiseEqual(p, good));
  EXPECT_FALSE(res.cloud.weights.has_value());
}

TEST(FuseEncounter, RolesPickTheObserver) {
  // Own at (1,0) facing +x, other at the origin facing +x. Only the other can
  // see the own agent straight ahead, so only the OBSERVED role is consistent.
  const auto own = Cloud({Pose2D(1, 0, 0), Pose2D(1, 0, 0)});
  const auto other = Cloud({Pose2D(0, 0, 0)});
  const RelativePoseMeas r(1.0, 0.0, 0.05, 0.05);
  Rng rng(2);
  const auto observed = fuse_encounter(own, other, r, Role::kObserved, rng);
  EXPECT_FALSE(observed.rejected);
  // As the observer the own agent would need to see the other straight ahead
  // while it is behind: bearing error pi at sigma 0.05 underflows.
  const RelativePoseMeas tight(1.0, 0.0, 1e-3, 1e-3);
  const auto observer = fuse_encounter(own, other, tight, Role::kObserver, rng);
  EXPECT_TRUE(observer.rejected);
}

TEST(FuseEncounter, MatchesDenseGridPosterior) {
  // Other agent is known exactly at the origin and sees the own agent 1.5 m
  // away at bearing 0.3. The own prior is uniform over a box, so the exact
  // posterior over own position is the measurement likelihood restricted to
  // the box; integrate it on a fine grid.
  const Pose2D observer(0.0, 0.0, 0.2);
  const RelativePoseMeas r(1.5, 0.3, 0.1, deg_to_rad(10));
  const double x0 = -0.5, x1 = 3.0, y0 = -1.0, y1 = 2.5;

  double wsum = 0, mx = 0, my = 0;
  const double h = 0.005;
  for (double x = x0 + h / 2; x < x1; x += h) {
    for (double y = y0 + h / 2; y < y1; y += h) {
      const double w = relative_pose_likelihood(r, observer, Pose2D(x, y, 0));
      wsum += w;
      mx += w * x;
      my += w * y;
    }
  }
  mx /= wsum;
  my /= wsum;
  double vx = 0, vy = 0;
  for (double x = x0 + h / 2; x < x1; x += h) {
    for (double y = y0 + h / 2; y < y1; y += h) {
      const double w = relative_pose_likelihood(r, observer, Pose2D(x, y, 0)) / wsum;
      vx += w * (x - mx) * (x - mx);
      vy += w * (y - my) * (y - my);
    }
  }

  Rng rng(3);
  const auto own = RandomCloud(rng, 40000, x0, x1, y0, y1);
  const auto res = fuse_encounter(own, Cloud({observer}), r, Role::kObserved, rng);
  double fx = 0, fy = 0;
  for (const auto& p : res.cloud.particles) {
    fx += p.x();
    fy += p.y();
  }
  fx /= res.cloud.size();
  fy /= res.cloud.size();
  double fvx = 0, fvy = 0;
  for (const auto& p : res.cloud.particles) {
    fvx += (p.x() - fx) * (p.x() - fx);
    fvy += (p.y() - fy) * (p.y() - fy);
  }
  fvx /= res.cloud.size();
  fvy /= res.cloud.size();

  EXPECT_NEAR(fx, mx, 0.02);
  EXPECT_NEAR(fy, my, 0.02);
  EXPECT_NEAR(std::sqrt(fvx), std::sqrt(vx), 0.2 * std::sqrt(vx));
  EXPECT_NEAR(std::sqrt(fvy), std::sqrt(vy), 0.2 * std::sqrt(vy));
}

TEST(FuseEncounter, ExactlyKEvaluationsAndOwnSizePreserved) {
  Rng rng(4);
  const RelativePoseMeas r(1.0, 0.0, 0.5, 0.5);
  for (std::size_t k_own : {1u, 7u, 100u, 1000u}) {
    for (std::size_t k_other : {1u, 13u, 500u}) {
      const auto own = RandomCloud(rng, k_own, -1, 1, -1, 1);
      const auto other = RandomCloud(rng, k_other, -1, 1, -1, 1);
      const auto res = fuse_encounter(own, other, r, Role::kObserver, rng);
      EXPECT_EQ(res.likelihood_evaluations, k_own);
      EXPECT_EQ(res.cloud.size(), k_own);
    }
  }
}

TEST(FuseEncounter, SupportContainment) {
  Rng rng(5);
  const RelativePoseMeas r(1.2, -0.4, 0.2, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    auto own = RandomCloud(rng, 64, -2, 2, -2, 2);
    if (trial % 2) {
      std::vector<double> w(64);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      double total = 0;
      for (double& x : w) total += (x = u(rng));
      for (double& x : w) x /= total;
      own.weights = w;
    }
    const auto other = RandomCloud(rng, 32, -2, 2, -2, 2);
    const auto res = fuse_encounter(own, other, r, trial % 3 ? Role::kObserver : Role::kObserved,
                                    rng);
    if (res.rejected) continue;
    for (const auto& p : res.cloud.particles) {
      ASSERT_TRUE(std::any_of(own.particles.begin(), own.particles.end(),
                              [&](const Pose2D& q) { return BitwiseEqual(p, q); }));
    }
  }
}

TEST(FuseEncounter, DeterministicForASeed) {
  Rng setup(6);
  const auto own = RandomCloud(setup, 300, -2, 2, -2, 2);
  const auto other = RandomCloud(setup, 300, -2, 2, -2, 2);
  const RelativePoseMeas r(1.0, 0.5, 0.1, 0.2);
  Rng a = make_stream(77, {4, 0});
  Rng b = make_stream(77, {4, 0});
  const auto ra = fuse_encounter(own, other, r, Role::kObserver, a);
  const auto rb = fuse_encounter(own, other, r, Role::kObserver, b);
  ASSERT_EQ(ra.cloud.size(), rb.cloud.size());
  for (std::size_t k = 0; k < ra.cloud.size(); ++k) {
    ASSERT_TRUE(BitwiseEqual(ra.cloud.particles[k], rb.cloud.particles[k]));
  }
}

TEST(FuseEncounter, InconsistentMeasurementIsRejected) {
  Rng rng(7);
  const auto own = RandomCloud(rng, 100, 0, 1, 0, 1);
  const auto other = RandomCloud(rng, 100, 0, 1, 0, 1);
  const RelativePoseMeas r(100.0, 0.0, 1e-3, 1e-3);
  const auto res = fuse_encounter(own, other, r, Role::kObserver, rng);
  EXPECT_TRUE(res.rejected);
  EXPECT_EQ(res.cloud, own);
  EXPECT_EQ(res.likelihood_evaluations, 100u);
}

TEST(FuseEncounter, EmptyOtherIsAnError) {
  Rng rng(8);
  const auto own = RandomCloud(rng, 10, 0, 1, 0, 1);
  EXPECT_THROW(fuse_encounter(own, ParticleCloud{}, RelativePoseMeas(1, 0, 0.1, 0.1),
                              Role::kObserver, rng),
               std::invalid_argument);
}

TEST(FuseEncounter, SelectionFrequenciesFollowPairMarginal) {
  // Small version of the exhaustive-marginal comparison: 20 own, 20 other
  // particles, smooth likelihood, 20000 fusions.
  Rng setup(9);
  std::normal_distribution<double> n(0.0, 0.3);
  std::vector<Pose2D> own, other;
  for (int i = 0; i < 20; ++i) own.emplace_back(n(setup), n(setup), 0.0);
  for (int i = 0; i < 20; ++i) other.emplace_back(1.5 + n(setup), n(setup), 0.0);
  const RelativePoseMeas r(1.5, 0.0, 0.3, 0.4);

  std::vector<double> marginal(20, 0.0);
  double total = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double w = relative_pose_likelihood(r, own[i], other[j]);
      marginal[i] += w;
      total += w;
    }
  }
  for (double& m : marginal) m /= total;

  std::vector<double> freq(20, 0.0);
  Rng rng(10);
  const int runs = 20000;
  const auto own_cloud = Cloud(own), other_cloud = Cloud(other);
  for (int run = 0; run < runs; ++run) {
    const auto res = fuse_encounter(own_cloud, other_cloud, r, Role::kObserver, rng);
    for (const auto& p : res.cloud.particles) {
      for (int i = 0; i < 20; ++i) {
        if (BitwiseEqual(p, own[i])) {
          freq[i] += 1.0;
          break;
        }
      }
    }
  }
  double tv = 0;
  for (int i = 0; i < 20; ++i) tv += std::abs(freq[i] / (runs * 20.0) - marginal[i]);
  EXPECT_LT(0.5 * tv, 0.03);
}

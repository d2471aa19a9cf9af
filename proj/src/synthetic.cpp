#include "lvr/synthetic.hpp"

#include "lvr/errors.hpp"
#include "lvr/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace lvr {

void SyntheticCorrespondenceConfig::validate() const {
  const bool ok = n > 0 && inlier_ratio >= 0.0 && inlier_ratio <= 1.0 && noise_sigma >= 0.0 &&
                  extent > 0.0 && max_translation >= 0.0;
  if (!ok) fail(ErrorCode::InvalidArgument, "invalid synthetic correspondence configuration");
}

Mat3 random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

SyntheticProblem make_correspondence_problem(const SyntheticCorrespondenceConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(mix64(cfg.seed));
  std::uniform_real_distribution<double> box(-cfg.extent / 2.0, cfg.extent / 2.0);
  std::uniform_real_distribution<double> shift(-cfg.max_translation, cfg.max_translation);
  std::normal_distribution<double> noise(0.0, 1.0);

  SyntheticProblem p;
  p.gt.rotation = random_rotation(rng());
  p.gt.translation = {shift(rng), shift(rng), shift(rng)};

  const auto n_in = static_cast<std::size_t>(std::llround(cfg.inlier_ratio * static_cast<double>(cfg.n)));
  p.is_inlier.assign(cfg.n, false);
  std::fill_n(p.is_inlier.begin(), n_in, true);
  std::shuffle(p.is_inlier.begin(), p.is_inlier.end(), rng);

  p.correspondences.resize(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Correspondence& c = p.correspondences[i];
    c.source = {box(rng), box(rng), box(rng)};
    if (p.is_inlier[i]) {
      const Vec3 e{noise(rng), noise(rng), noise(rng)};
      c.target = p.gt * c.source + cfg.noise_sigma * e;
    } else {
      c.target = p.gt * Vec3{box(rng), box(rng), box(rng)};
    }
    c.source_index = i;
    c.target_index = i;
  }
  return p;
}

}  // namespace lvr

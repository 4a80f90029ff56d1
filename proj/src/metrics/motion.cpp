#include "metrics/motion.hpp"

#include "common/error.hpp"
#include "common/math.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace hoi {

double track_correlation(const Tracklet& a, const Tracklet& b, double eps) {
  if (a.size() != b.size()) {
    fail(ErrorCode::LengthMismatch, "tracks have " + std::to_string(a.size()) + " and " +
                                        std::to_string(b.size()) + " frames");
  }
  if (a.size() < 2) fail(ErrorCode::LengthMismatch, "tracks need at least 2 frames");

  std::vector<double> terms(a.size() - 1);
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const Vec2 va = a.points[k + 1] - a.points[k];
    const Vec2 vb = b.points[k + 1] - b.points[k];
    const double na = va.norm();
    const double nb = vb.norm();
    const bool sa = na < eps;
    const bool sb = nb < eps;
    if (sa && sb) {
      terms[k] = 1.0;
    } else if (sa || sb) {
      terms[k] = 0.0;
    } else {
      terms[k] = std::clamp(va.dot(vb) / (na * nb), -1.0, 1.0);
    }
  }
  return pairwise_mean(terms);
}

double motion_fidelity(std::span<const Tracklet> gt, std::span<const Tracklet> gen, double eps) {
  if (gt.empty() || gen.empty()) fail(ErrorCode::EmptySet, "motion fidelity needs nonempty track sets");
  const std::size_t frames = gt.front().size();
  for (const auto& t : gt) {
    if (t.size() != frames) fail(ErrorCode::LengthMismatch, "ground-truth tracks differ in length");
  }
  for (const auto& t : gen) {
    if (t.size() != frames) fail(ErrorCode::LengthMismatch, "generated tracks differ in length from ground truth");
  }

  const std::size_t n = gt.size();
  const std::size_t m = gen.size();
  std::vector<double> best_for_gen(m, -std::numeric_limits<double>::infinity());
  std::vector<double> best_for_gt(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = track_correlation(gt[i], gen[j], eps);
      best_for_gen[j] = std::max(best_for_gen[j], c);
      best_for_gt[i] = std::max(best_for_gt[i], c);
    }
  }
  return pairwise_mean(best_for_gen) + pairwise_mean(best_for_gt);
}

}  // namespace hoi

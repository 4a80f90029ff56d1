#pragma once

#include "raster/tracklets.hpp"

#include <span>

namespace hoi {

inline constexpr double kStaticDisplacementEps = 1e-6;  // px

// Mean cosine between the F-1 displacement vectors of two equal-length
// tracks. A step where both tracks are static (norm < eps) scores 1, one
// static scores 0. Throws LengthMismatch.
double track_correlation(const Tracklet& a, const Tracklet& b, double eps = kStaticDisplacementEps);

// Symmetric best-match mean: mean over generated tracks of the best
// correlation against any ground-truth track, plus the same with the roles
// swapped. Range [-2, 2]. Throws EmptySet / LengthMismatch.
double motion_fidelity(std::span<const Tracklet> ground_truth, std::span<const Tracklet> generated,
                       double eps = kStaticDisplacementEps);

}  // namespace hoi

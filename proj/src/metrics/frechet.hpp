#pragma once

#include <Eigen/Core>

#include <string>

namespace hoi {

struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased

  int dim() const { return static_cast<int>(mean.size()); }
};

// Rows are samples. Throws InsufficientSamples when N < 2.
FeatureStats feature_stats(const Eigen::MatrixXd& features);

// Eigenvalues in [-1e-6, 0) are clamped to 0, anything lower raises NotPSD.
inline constexpr double kPsdTolerance = 1e-6;

// Gaussian Frechet distance |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1 S2)^{1/2}),
// with the square-root trace taken from the symmetric S1^{1/2} S2 S1^{1/2}.
// Clamped at 0. Throws Shape on dimension mismatch, NotPSD.
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

// N x D little-endian float32 blob at `stem`.f32 with sidecar `stem`.json {"n", "d"}.
Eigen::MatrixXd load_feature_matrix(const std::string& stem);
void save_feature_matrix(const Eigen::MatrixXd& features, const std::string& stem);

}  // namespace hoi

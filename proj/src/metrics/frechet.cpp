#include "metrics/frechet.hpp"

#include "common/error.hpp"
#include "conditioning/latent.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace hoi {

FeatureStats feature_stats(const Eigen::MatrixXd& features) {
  const auto n = features.rows();
  if (n < 2) fail(ErrorCode::InsufficientSamples, "feature statistics need at least 2 samples");
  if (features.cols() < 1) fail(ErrorCode::Shape, "features need at least one dimension");
  FeatureStats s;
  s.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - s.mean.transpose();
  s.covariance = (centered.transpose() * centered) / static_cast<double>(n - 1);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose());
  return s;
}

namespace {

Eigen::VectorXd checked_eigenvalues(const Eigen::VectorXd& values, const char* what) {
  Eigen::VectorXd out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -kPsdTolerance) {
      fail(ErrorCode::NotPSD, std::string(what) + " has eigenvalue " + std::to_string(out[i]));
    }
    out[i] = std::max(out[i], 0.0);
  }
  return out;
}

}  // namespace

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
  if (a.dim() != b.dim() || a.covariance.rows() != a.dim() || b.covariance.rows() != b.dim() ||
      a.covariance.cols() != a.dim() || b.covariance.cols() != b.dim()) {
    fail(ErrorCode::Shape, "feature statistics differ in dimension");
  }
  const Eigen::MatrixXd s1 = 0.5 * (a.covariance + a.covariance.transpose());
  const Eigen::MatrixXd s2 = 0.5 * (b.covariance + b.covariance.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig1(s1);
  const Eigen::VectorXd l1 = checked_eigenvalues(eig1.eigenvalues(), "first covariance");
  const Eigen::MatrixXd s1_half =
      eig1.eigenvectors() * l1.cwiseSqrt().asDiagonal() * eig1.eigenvectors().transpose();

  Eigen::MatrixXd m = s1_half * s2 * s1_half;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_m(m, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lm = checked_eigenvalues(eig_m.eigenvalues(), "covariance product");

  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double value = mean_term + s1.trace() + s2.trace() - 2.0 * lm.cwiseSqrt().sum();
  return std::max(value, 0.0);
}

Eigen::MatrixXd load_feature_matrix(const std::string& stem) {
  std::ifstream in(stem + ".json");
  if (!in) fail(ErrorCode::Io, "cannot open '" + stem + ".json'");
  nlohmann::json side;
  long n = 0, d = 0;
  try {
    in >> side;
    n = side.at("n").get<long>();
    d = side.at("d").get<long>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Schema, stem + ".json: " + e.what());
  }
  const auto values = read_f32_blob(stem + ".f32");
  if (n < 0 || d < 1 || values.size() != static_cast<std::size_t>(n * d)) {
    fail(ErrorCode::Shape, stem + ".f32 does not hold n*d float32 values");
  }
  Eigen::MatrixXd out(n, d);
  for (long r = 0; r < n; ++r) {
    for (long c = 0; c < d; ++c) out(r, c) = values[r * d + c];
  }
  return out;
}

void save_feature_matrix(const Eigen::MatrixXd& features, const std::string& stem) {
  std::vector<float> values;
  values.reserve(features.size());
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) values.push_back(static_cast<float>(features(r, c)));
  }
  write_f32_blob(stem + ".f32", values);
  std::ofstream out(stem + ".json");
  if (!out) fail(ErrorCode::Io, "cannot write '" + stem + ".json'");
  out << nlohmann::json{{"n", features.rows()}, {"d", features.cols()}}.dump() << '\n';
}

}  // namespace hoi

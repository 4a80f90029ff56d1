#include "metrics/image_metrics.hpp"

#include "common/error.hpp"
#include "common/math.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace hoi {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kPeak = 255.0;

void check_shapes(const Image8& a, const Image8& b) {
  if (!a.same_shape(b)) fail(ErrorCode::Shape, "images differ in shape");
  if (a.data.empty()) fail(ErrorCode::Shape, "images are empty");
}

std::array<double, kWindow> gaussian_kernel() {
  std::array<double, kWindow> k{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    k[i] = std::exp(-(x * x) / (2.0 * kSigma * kSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable "valid" filtering of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h,
                                 const std::array<double, kWindow>& k) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * plane[static_cast<std::size_t>(r) * w + c + i];
      tmp[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * tmp[static_cast<std::size_t>(r + i) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace

double psnr(const Image8& a, const Image8& b) {
  check_shapes(a, b);
  std::vector<double> sq(a.data.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
    sq[i] = d * d;
  }
  const double mse = pairwise_mean(sq);
  if (mse < 1e-10) return kPsnrCapDb;
  return 10.0 * std::log10(kPeak * kPeak / mse);
}

double ssim(const Image8& a, const Image8& b) {
  check_shapes(a, b);
  if (a.width < kWindow || a.height < kWindow) {
    fail(ErrorCode::Shape, "SSIM needs images of at least 11x11 pixels");
  }
  const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
  const double c2 = (0.03 * kPeak) * (0.03 * kPeak);
  const auto k = gaussian_kernel();
  const int w = a.width, h = a.height;
  const std::size_t pixels = static_cast<std::size_t>(w) * h;

  std::vector<double> channel_means;
  for (int ch = 0; ch < a.channels; ++ch) {
    std::vector<double> pa(pixels), pb(pixels), paa(pixels), pbb(pixels), pab(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
      pa[i] = a.data[i * a.channels + ch];
      pb[i] = b.data[i * b.channels + ch];
      paa[i] = pa[i] * pa[i];
      pbb[i] = pb[i] * pb[i];
      pab[i] = pa[i] * pb[i];
    }
    const auto mu_a = filter_valid(pa, w, h, k);
    const auto mu_b = filter_valid(pb, w, h, k);
    const auto e_aa = filter_valid(paa, w, h, k);
    const auto e_bb = filter_valid(pbb, w, h, k);
    const auto e_ab = filter_valid(pab, w, h, k);

    std::vector<double> map(mu_a.size());
    for (std::size_t i = 0; i < map.size(); ++i) {
      const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
      const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
      const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
      map[i] = num / den;
    }
    channel_means.push_back(pairwise_mean(map));
  }
  return pairwise_mean(channel_means);
}

}  // namespace hoi

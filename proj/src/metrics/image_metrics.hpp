#pragma once

#include "raster/image.hpp"

namespace hoi {

inline constexpr double kPsnrCapDb = 100.0;

// 10 log10(255^2 / MSE), capped at 100 dB when MSE < 1e-10. Throws Shape.
double psnr(const Image8& a, const Image8& b);

// 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03, L = 255. Mean over
// every window that fits entirely inside the image, averaged over channels.
// Throws Shape on mismatched or smaller-than-window images.
double ssim(const Image8& a, const Image8& b);

}  // namespace hoi

#pragma once

#include <array>
#include <cstdint>

#include "handcap/imaging/random.hpp"
#include "handcap/imaging/raster.hpp"

namespace handcap::imaging {

/// BT.601 luminance (0.299 R + 0.587 G + 0.114 B), rounded.
/// A single-channel input is returned unchanged.
Raster to_grayscale(const Raster& img);

/// Normalized 3x3 Gaussian kernel, row-major.
std::array<double, 9> gaussian_kernel_3x3(double sigma);

/// 3x3 Gaussian low-pass at sigma = 0.5 with edge replication.
/// Throws "degenerate image" below 3x3.
RealImage gaussian_degrade(const RealImage& img);
Raster gaussian_degrade(const Raster& gray);

/// 3x3 convolution with edge replication (kernel row-major, not flipped).
RealImage convolve3x3(const RealImage& img, const std::array<double, 9>& kernel);

/// 256-bin intensity histogram of a gray raster.
std::array<std::uint64_t, 256> histogram(const Raster& gray);

/// Shannon entropy in bits of the 8-bit intensity distribution.
double entropy(const Raster& gray);

/// H(U | V) in bits from the joint histogram of position-paired pixels.
double conditional_entropy(const Raster& u, const Raster& v);

/// alpha * fg + (1 - alpha) * bg, rounded. alpha must lie in [0, 1].
Raster alpha_blend(const Raster& fg, const Raster& bg, double alpha);

/// out = 255 * (in / 255)^(1 / gamma); gamma > 1 brightens.
Raster gamma_correct(const Raster& img, double gamma);

/// Independently corrupts each pixel with probability `density` (all channels
/// of a pixel set to 0 or 255 with equal odds). density must be in [0.02, 0.05].
Raster salt_pepper_noise(const Raster& img, double density, RandomSource& rng);

/// Same as salt_pepper_noise without the range check; reports the number of
/// corrupted pixels.
Raster salt_pepper_noise_unchecked(const Raster& img, double density, RandomSource& rng,
                                   std::size_t* corrupted = nullptr);

/// Otsu threshold on a gray raster: pixels > threshold form the upper class.
int otsu_threshold(const Raster& gray);

/// Otsu threshold over arbitrary non-negative real samples (256 bins over
/// [0, max]). Returns the cut value.
double otsu_threshold(std::span<const double> samples);

/// Mean intensity over all channels.
double mean_intensity(const Raster& img);

}  // namespace handcap::imaging

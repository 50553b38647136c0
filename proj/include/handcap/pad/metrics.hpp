#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "handcap/imaging/raster.hpp"

namespace handcap::pad {

using imaging::Raster;
using imaging::RealImage;

enum class Metric { MSE, PSNR, AD, NAE, SC, NCC, SSIM, TCD, TED, ESSIM, WASH, TGD, TEnD, TFPD };

inline constexpr std::array<Metric, 14> kAllMetrics{Metric::MSE,  Metric::PSNR, Metric::AD,    Metric::NAE,
                                                    Metric::SC,   Metric::NCC,  Metric::SSIM,  Metric::TCD,
                                                    Metric::TED,  Metric::ESSIM, Metric::WASH, Metric::TGD,
                                                    Metric::TEnD, Metric::TFPD};

inline constexpr double kPsnrCap = 100.0;  // dB, reported when MSE is (numerically) zero

std::string_view metric_name(Metric m);
/// Case-insensitive; throws InvalidArgument("unknown metric: ...").
Metric parse_metric(std::string_view name);
/// Comma-separated list, or "all".
std::vector<Metric> parse_metric_list(std::string_view list);

/// Metric between a reference image and a second image of the same size
/// (0..255 scale). `flagged` is set when PSNR had to be capped.
double compare_metric(Metric m, const RealImage& ref, const RealImage& other, bool* flagged = nullptr);

/// Metric between a gray (or RGB, converted) image and its Gaussian-degraded
/// copy.
double compute_metric(Metric m, const Raster& img, bool* flagged = nullptr);

// Building blocks, exposed for tests.
double ssim(const RealImage& a, const RealImage& b);
std::size_t harris_corner_count(const RealImage& img);
std::size_t sobel_edge_count(const RealImage& img);
/// Anisotropic edge strength: max(|D0 - D90|, |D45 - D135|) over 3x3
/// directional derivatives.
RealImage edge_strength(const RealImage& img);
/// Half absolute forward differences; the last row / column is zero.
void half_gradients(const RealImage& img, RealImage& gx, RealImage& gy);

}  // namespace handcap::pad

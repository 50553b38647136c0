#include "handcap/imaging/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "handcap/common/error.hpp"

namespace handcap::imaging {

namespace {

std::uint8_t round_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

Raster to_grayscale(const Raster& img) {
    if (img.channels() == 1) return img;
    Raster out(img.width(), img.height(), 1);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double l = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = round_u8(l);
    }
    return out;
}

std::array<double, 9> gaussian_kernel_3x3(double sigma) {
    if (sigma <= 0.0) throw InvalidArgument("gaussian sigma must be positive");
    std::array<double, 9> k{};
    double sum = 0.0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k[(dy + 1) * 3 + (dx + 1)] = w;
            sum += w;
        }
    }
    for (double& w : k) w /= sum;
    return k;
}

RealImage convolve3x3(const RealImage& img, const std::array<double, 9>& kernel) {
    const int w = img.width();
    const int h = img.height();
    RealImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = std::clamp(x + dx, 0, w - 1);
                    acc += kernel[(dy + 1) * 3 + (dx + 1)] * img.at(xx, yy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

RealImage gaussian_degrade(const RealImage& img) {
    if (img.width() < 3 || img.height() < 3) throw InvalidArgument("degenerate image");
    static const auto kernel = gaussian_kernel_3x3(0.5);
    return convolve3x3(img, kernel);
}

Raster gaussian_degrade(const Raster& gray) {
    if (gray.channels() != 1) throw InvalidArgument("gaussian_degrade expects a gray raster");
    return gaussian_degrade(RealImage::from_raster(gray)).to_raster();
}

std::array<std::uint64_t, 256> histogram(const Raster& gray) {
    if (gray.channels() != 1) throw InvalidArgument("histogram expects a gray raster");
    std::array<std::uint64_t, 256> hist{};
    for (std::uint8_t v : gray.data()) ++hist[v];
    return hist;
}

double entropy(const Raster& gray) {
    if (gray.empty()) throw InvalidArgument("entropy of an empty image");
    const auto hist = histogram(gray);
    const double n = static_cast<double>(gray.pixel_count());
    double h = 0.0;
    for (auto c : hist) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double conditional_entropy(const Raster& u, const Raster& v) {
    if (u.channels() != 1 || v.channels() != 1) {
        throw InvalidArgument("conditional_entropy expects gray rasters");
    }
    if (u.size() != v.size()) throw InvalidArgument("dimension mismatch");
    if (u.empty()) throw InvalidArgument("conditional entropy of an empty image");
    std::vector<std::uint32_t> joint(256 * 256, 0);
    std::array<std::uint64_t, 256> marginal_v{};
    auto du = u.data();
    auto dv = v.data();
    for (std::size_t i = 0; i < du.size(); ++i) {
        ++joint[static_cast<std::size_t>(dv[i]) * 256 + du[i]];
        ++marginal_v[dv[i]];
    }
    const double n = static_cast<double>(du.size());
    double h = 0.0;
    for (int vv = 0; vv < 256; ++vv) {
        if (marginal_v[vv] == 0) continue;
        const double pv = static_cast<double>(marginal_v[vv]) / n;
        for (int uu = 0; uu < 256; ++uu) {
            const auto c = joint[static_cast<std::size_t>(vv) * 256 + uu];
            if (c == 0) continue;
            const double puv = c / n;
            h -= puv * std::log2(puv / pv);
        }
    }
    return std::max(h, 0.0);
}

Raster alpha_blend(const Raster& fg, const Raster& bg, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
    if (!fg.same_shape(bg)) throw InvalidArgument("alpha_blend: shape mismatch");
    Raster out(fg.width(), fg.height(), fg.channels());
    auto f = fg.data();
    auto b = bg.data();
    auto o = out.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = round_u8(alpha * f[i] + (1.0 - alpha) * b[i]);
    return out;
}

Raster gamma_correct(const Raster& img, double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    std::array<std::uint8_t, 256> lut{};
    for (int i = 0; i < 256; ++i) lut[i] = round_u8(255.0 * std::pow(i / 255.0, 1.0 / gamma));
    Raster out = img;
    for (auto& v : out.data()) v = lut[v];
    return out;
}

Raster salt_pepper_noise_unchecked(const Raster& img, double density, RandomSource& rng,
                                   std::size_t* corrupted) {
    Raster out = img;
    const int ch = img.channels();
    auto d = out.data();
    std::size_t count = 0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        if (!rng.bernoulli(density)) continue;
        const std::uint8_t value = rng.bernoulli(0.5) ? 255 : 0;
        for (int c = 0; c < ch; ++c) d[i * ch + c] = value;
        ++count;
    }
    if (corrupted) *corrupted = count;
    return out;
}

Raster salt_pepper_noise(const Raster& img, double density, RandomSource& rng) {
    if (!(density >= 0.02 && density <= 0.05)) {
        throw InvalidArgument("noise density must lie in [0.02, 0.05]");
    }
    return salt_pepper_noise_unchecked(img, density, rng);
}

int otsu_threshold(const Raster& gray) {
    const auto hist = histogram(gray);
    const double total = static_cast<double>(gray.pixel_count());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * static_cast<double>(hist[i]);
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int threshold = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += static_cast<double>(hist[t]);
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += t * static_cast<double>(hist[t]);
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            threshold = t;
        }
    }
    return threshold;
}

double otsu_threshold(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    const double hi = *std::max_element(samples.begin(), samples.end());
    if (hi <= 0.0) return 0.0;
    std::array<double, 256> hist{};
    auto bin = [hi](double v) { return std::clamp(static_cast<int>(v / hi * 255.0), 0, 255); };
    for (double v : samples) hist[bin(v)] += 1.0;
    const double total = static_cast<double>(samples.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[i];
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int t_best = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += t * hist[t];
        const double m0 = sum0 / w0;
        const double m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            t_best = t;
        }
    }
    return (t_best + 1) * hi / 255.0;
}

double mean_intensity(const Raster& img) {
    if (img.empty()) return 0.0;
    double s = 0.0;
    for (auto v : img.data()) s += v;
    return s / static_cast<double>(img.data().size());
}

}  // namespace handcap::imaging

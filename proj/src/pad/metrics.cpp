#include "handcap/pad/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "handcap/common/error.hpp"
#include "handcap/fingergeom/profile.hpp"
#include "handcap/imaging/ops.hpp"

namespace handcap::pad {

namespace {

constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);
constexpr double kSimilarityC = 400.0;  // stabilizer for the edge-strength and sharpness similarity maps
constexpr int kSsimWindow = 8;

double ratio_or(double num, double den, double fallback) { return den == 0.0 ? fallback : num / den; }

// Pixel (x, y) with edge replication.
double px(const RealImage& img, int x, int y) {
    x = std::clamp(x, 0, img.width() - 1);
    y = std::clamp(y, 0, img.height() - 1);
    return img.at(x, y);
}

RealImage filter3(const RealImage& img, const std::array<double, 9>& k) { return imaging::convolve3x3(img, k); }

constexpr std::array<double, 9> kSobelX{-1, 0, 1, -2, 0, 2, -1, 0, 1};
constexpr std::array<double, 9> kSobelY{-1, -2, -1, 0, 0, 0, 1, 2, 1};
constexpr std::array<double, 9> kSobel45{0, 1, 2, -1, 0, 1, -2, -1, 0};
constexpr std::array<double, 9> kSobel135{-2, -1, 0, -1, 0, 1, 0, 1, 2};

double similarity_mean(std::span<const double> a, std::span<const double> b) {
    if (a.empty()) return 1.0;
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (2 * a[i] * b[i] + kSimilarityC) / (a[i] * a[i] + b[i] * b[i] + kSimilarityC);
    }
    return s / static_cast<double>(a.size());
}

double change_ratio(std::size_t a, std::size_t b) {
    const auto hi = std::max(a, b);
    if (hi == 0) return 0.0;
    return static_cast<double>(a > b ? a - b : b - a) / static_cast<double>(hi);
}

struct Haar {
    RealImage ll;
    std::vector<double> sharp;  // detail magnitude per 2x2 block
};

Haar haar(const RealImage& img) {
    const int w = img.width() / 2, h = img.height() / 2;
    if (w < 1 || h < 1) throw InvalidArgument("degenerate image: too small for a wavelet level");
    Haar out{RealImage(w, h), {}};
    out.sharp.reserve(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double a = img.at(2 * x, 2 * y), b = img.at(2 * x + 1, 2 * y);
            const double c = img.at(2 * x, 2 * y + 1), d = img.at(2 * x + 1, 2 * y + 1);
            out.ll.at(x, y) = (a + b + c + d) / 2;
            const double lh = (a + b - c - d) / 2, hl = (a - b + c - d) / 2, hh = (a - b - c + d) / 2;
            out.sharp.push_back(std::sqrt(lh * lh + hl * hl + hh * hh));
        }
    }
    return out;
}

// Zero crossings of the 4-neighbour Laplacian: sign changes towards the right
// or lower neighbour with a jump above 1 gray level.
std::vector<char> zero_crossings(const RealImage& img) {
    const int w = img.width(), h = img.height();
    RealImage lap(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            lap.at(x, y) = px(img, x - 1, y) + px(img, x + 1, y) + px(img, x, y - 1) + px(img, x, y + 1) -
                           4 * img.at(x, y);
        }
    }
    std::vector<char> z(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = lap.at(x, y);
            auto crosses = [&](double n) { return v * n < 0 && std::abs(v - n) > 1.0; };
            if ((x + 1 < w && crosses(lap.at(x + 1, y))) || (y + 1 < h && crosses(lap.at(x, y + 1)))) {
                z[static_cast<std::size_t>(y) * w + x] = 1;
            }
        }
    }
    return z;
}

double wash(const RealImage& a, const RealImage& b) {
    const auto ha = haar(a), hb = haar(b);
    const double sharp_sim = similarity_mean(ha.sharp, hb.sharp);
    const auto za = zero_crossings(ha.ll), zb = zero_crossings(hb.ll);
    std::size_t both = 0, any = 0;
    for (std::size_t i = 0; i < za.size(); ++i) {
        both += za[i] && zb[i];
        any += za[i] || zb[i];
    }
    const double zc_sim = any == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(any);
    return sharp_sim * zc_sim;
}

double mean_gradient_difference(const RealImage& ax, const RealImage& ay, const RealImage& bx, const RealImage& by) {
    double s = 0;
    const auto n = ax.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = ax.values()[i] - bx.values()[i];
        const double dy = ay.values()[i] - by.values()[i];
        s += std::sqrt(dx * dx + dy * dy);
    }
    return s / static_cast<double>(n);
}

}  // namespace

std::string_view metric_name(Metric m) {
    switch (m) {
        case Metric::MSE: return "MSE";
        case Metric::PSNR: return "PSNR";
        case Metric::AD: return "AD";
        case Metric::NAE: return "NAE";
        case Metric::SC: return "SC";
        case Metric::NCC: return "NCC";
        case Metric::SSIM: return "SSIM";
        case Metric::TCD: return "TCD";
        case Metric::TED: return "TED";
        case Metric::ESSIM: return "ESSIM";
        case Metric::WASH: return "WASH";
        case Metric::TGD: return "TGD";
        case Metric::TEnD: return "TEnD";
        case Metric::TFPD: return "TFPD";
    }
    return "?";
}

Metric parse_metric(std::string_view name) {
    auto upper = [](std::string_view s) {
        std::string out(s);
        for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return out;
    };
    const auto want = upper(name);
    for (Metric m : kAllMetrics) {
        if (upper(metric_name(m)) == want) return m;
    }
    throw InvalidArgument("unknown metric: '" + std::string(name) + "'");
}

std::vector<Metric> parse_metric_list(std::string_view list) {
    if (list == "all") return {kAllMetrics.begin(), kAllMetrics.end()};
    std::vector<Metric> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        auto token = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        const Metric m = parse_metric(token);
        if (std::find(out.begin(), out.end(), m) != out.end()) {
            throw InvalidArgument("duplicate metric: '" + std::string(token) + "'");
        }
        out.push_back(m);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double ssim(const RealImage& a, const RealImage& b) {
    if (!a.same_shape(b)) throw InvalidArgument("image size mismatch");
    const int w = a.width(), h = a.height();
    const int win = std::min({kSsimWindow, w, h});
    if (win < 1) throw InvalidArgument("degenerate image");
    // Summed-area tables of a, b, a^2, b^2, ab with a zero first row/column.
    const int sw = w + 1;
    std::vector<std::array<double, 5>> sat(static_cast<std::size_t>(sw) * (h + 1), {0, 0, 0, 0, 0});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = a.at(x, y), v = b.at(x, y);
            const std::array<double, 5> here{u, v, u * u, v * v, u * v};
            auto& dst = sat[static_cast<std::size_t>(y + 1) * sw + x + 1];
            const auto& up = sat[static_cast<std::size_t>(y) * sw + x + 1];
            const auto& left = sat[static_cast<std::size_t>(y + 1) * sw + x];
            const auto& diag = sat[static_cast<std::size_t>(y) * sw + x];
            for (int k = 0; k < 5; ++k) dst[k] = here[k] + up[k] + left[k] - diag[k];
        }
    }
    const double n = static_cast<double>(win) * win;
    double total = 0;
    std::size_t windows = 0;
    for (int y = 0; y + win <= h; ++y) {
        for (int x = 0; x + win <= w; ++x) {
            std::array<double, 5> s;
            const auto& br = sat[static_cast<std::size_t>(y + win) * sw + x + win];
            const auto& tr = sat[static_cast<std::size_t>(y) * sw + x + win];
            const auto& bl = sat[static_cast<std::size_t>(y + win) * sw + x];
            const auto& tl = sat[static_cast<std::size_t>(y) * sw + x];
            for (int k = 0; k < 5; ++k) s[k] = (br[k] - tr[k] - bl[k] + tl[k]) / n;
            const double mu_a = s[0], mu_b = s[1];
            const double var_a = std::max(0.0, s[2] - mu_a * mu_a);
            const double var_b = std::max(0.0, s[3] - mu_b * mu_b);
            const double cov = s[4] - mu_a * mu_b;
            total += ((2 * mu_a * mu_b + kC1) * (2 * cov + kC2)) /
                     ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

std::size_t harris_corner_count(const RealImage& img) {
    const int w = img.width(), h = img.height();
    const auto ix = filter3(img, kSobelX), iy = filter3(img, kSobelY);
    RealImage xx(w, h), yy(w, h), xy(w, h);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        xx.values()[i] = ix.values()[i] * ix.values()[i];
        yy.values()[i] = iy.values()[i] * iy.values()[i];
        xy.values()[i] = ix.values()[i] * iy.values()[i];
    }
    static const auto smooth = imaging::gaussian_kernel_3x3(1.0);
    xx = filter3(xx, smooth);
    yy = filter3(yy, smooth);
    xy = filter3(xy, smooth);
    RealImage r(w, h);
    double peak = 0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        const double a = xx.values()[i], b = yy.values()[i], c = xy.values()[i];
        r.values()[i] = a * b - c * c - 0.04 * (a + b) * (a + b);
        peak = std::max(peak, r.values()[i]);
    }
    if (peak <= 0) return 0;
    std::size_t corners = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = r.at(x, y);
            if (v <= 0.01 * peak) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = x + dx, ny = y + dy;
                    if ((dx || dy) && nx >= 0 && ny >= 0 && nx < w && ny < h) {
                        const double o = r.at(nx, ny);
                        // Plateaus count once: ties resolve to the first pixel in scan order.
                        if (o > v || (o == v && (ny < y || (ny == y && nx < x)))) {
                            is_max = false;
                            break;
                        }
                    }
                }
            }
            corners += is_max;
        }
    }
    return corners;
}

std::size_t sobel_edge_count(const RealImage& img) {
    const auto gx = filter3(img, kSobelX), gy = filter3(img, kSobelY);
    std::vector<double> mag(img.pixel_count());
    for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::hypot(gx.values()[i], gy.values()[i]);
    const double t = imaging::otsu_threshold(mag);
    std::size_t n = 0;
    for (double m : mag) n += m > t && m > 1e-6;  // ignore rounding residue on flat regions
    return n;
}

RealImage edge_strength(const RealImage& img) {
    const auto d0 = filter3(img, kSobelX), d90 = filter3(img, kSobelY);
    const auto d45 = filter3(img, kSobel45), d135 = filter3(img, kSobel135);
    RealImage e(img.width(), img.height());
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        e.values()[i] = std::max(std::abs(d0.values()[i] - d90.values()[i]), std::abs(d45.values()[i] - d135.values()[i]));
    }
    return e;
}

void half_gradients(const RealImage& img, RealImage& gx, RealImage& gy) {
    const int w = img.width(), h = img.height();
    gx = RealImage(w, h);
    gy = RealImage(w, h);
    // i runs over rows and j over columns: G_x differences rows, G_y columns.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (y + 1 < h) gx.at(x, y) = 0.5 * std::abs(img.at(x, y) - img.at(x, y + 1));
            if (x + 1 < w) gy.at(x, y) = 0.5 * std::abs(img.at(x, y) - img.at(x + 1, y));
        }
    }
}

double compare_metric(Metric m, const RealImage& a, const RealImage& b, bool* flagged) {
    if (!a.same_shape(b)) throw InvalidArgument("image size mismatch");
    if (a.pixel_count() == 0) throw InvalidArgument("degenerate image");
    if (flagged) *flagged = false;
    const auto va = a.values(), vb = b.values();
    const double n = static_cast<double>(va.size());
    auto sum = [&](auto f) {
        double s = 0;
        for (std::size_t i = 0; i < va.size(); ++i) s += f(va[i], vb[i]);
        return s;
    };
    switch (m) {
        case Metric::MSE: return sum([](double u, double v) { return (u - v) * (u - v); }) / n;
        case Metric::PSNR: {
            const double mse = sum([](double u, double v) { return (u - v) * (u - v); }) / n;
            const double psnr = mse > 0 ? 10 * std::log10(255.0 * 255.0 / mse) : kPsnrCap;
            if (psnr >= kPsnrCap) {
                if (flagged) *flagged = true;
                return kPsnrCap;
            }
            return psnr;
        }
        case Metric::AD: return sum([](double u, double v) { return u - v; }) / n;
        case Metric::NAE:
            return ratio_or(sum([](double u, double v) { return std::abs(u - v); }),
                            sum([](double u, double) { return std::abs(u); }), 0.0);
        case Metric::SC:
            return ratio_or(sum([](double u, double) { return u * u; }), sum([](double, double v) { return v * v; }),
                            1.0);
        case Metric::NCC:
            return ratio_or(sum([](double u, double v) { return u * v; }), sum([](double u, double) { return u * u; }),
                            1.0);
        case Metric::SSIM: return ssim(a, b);
        case Metric::TCD: return change_ratio(harris_corner_count(a), harris_corner_count(b));
        case Metric::TED: return change_ratio(sobel_edge_count(a), sobel_edge_count(b));
        case Metric::ESSIM: {
            const auto ea = edge_strength(a), eb = edge_strength(b);
            return similarity_mean(ea.values(), eb.values());
        }
        case Metric::WASH: return wash(a, b);
        case Metric::TGD: {
            RealImage ax, ay, bx, by;
            half_gradients(a, ax, ay);
            half_gradients(b, bx, by);
            return mean_gradient_difference(ax, ay, bx, by);
        }
        case Metric::TEnD: {
            const double ha = imaging::entropy(a.to_raster()), hb = imaging::entropy(b.to_raster());
            return ratio_or(std::abs(ha - hb), std::max(ha, hb), 0.0);
        }
        case Metric::TFPD: {
            const auto pa = fingergeom::left_finger_profile(a), pb = fingergeom::left_finger_profile(b);
            return mean_gradient_difference(pa.fp_x, pa.fp_y, pb.fp_x, pb.fp_y);
        }
    }
    throw InvalidArgument("unknown metric");
}

double compute_metric(Metric m, const Raster& img, bool* flagged) {
    const auto ref = RealImage::from_raster(imaging::to_grayscale(img));
    return compare_metric(m, ref, imaging::gaussian_degrade(ref), flagged);
}

}  // namespace handcap::pad

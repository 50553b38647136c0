#include "handcap/imaging/binary.hpp"

#include <algorithm>
#include <vector>

#include "handcap/imaging/ops.hpp"

namespace handcap::imaging {

int label_components(const Raster& mask, std::vector<int>& labels) {
    const int w = mask.width();
    const int h = mask.height();
    labels.assign(static_cast<std::size_t>(w) * h, 0);
    int next = 0;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (mask.at(x, y) == 0 || labels[i] != 0) continue;
            ++next;
            labels[i] = next;
            stack.assign(1, static_cast<int>(i));
            while (!stack.empty()) {
                const int p = stack.back();
                stack.pop_back();
                const int px = p % w;
                const int py = p / w;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx;
                        const int ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.at(nx, ny) == 0 || labels[j] != 0) continue;
                        labels[j] = next;
                        stack.push_back(static_cast<int>(j));
                    }
                }
            }
        }
    }
    return next;
}

Raster largest_component(const Raster& mask) {
    std::vector<int> labels;
    const int n = label_components(mask, labels);
    Raster out(mask.width(), mask.height(), 1);
    if (n == 0) return out;
    std::vector<std::size_t> area(static_cast<std::size_t>(n) + 1, 0);
    for (int l : labels) ++area[l];
    area[0] = 0;
    const int best = static_cast<int>(std::max_element(area.begin(), area.end()) - area.begin());
    auto d = out.data();
    for (std::size_t i = 0; i < labels.size(); ++i) d[i] = labels[i] == best ? 255 : 0;
    return out;
}

Raster fill_holes(const Raster& mask) {
    const int w = mask.width();
    const int h = mask.height();
    // Flood the background from the border with 4-connectivity.
    std::vector<std::uint8_t> outside(static_cast<std::size_t>(w) * h, 0);
    std::vector<int> stack;
    auto seed = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (mask.at(x, y) == 0 && !outside[i]) {
            outside[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int px = p % w;
        const int py = p / w;
        const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (const auto& d : nbr) {
            const int nx = px + d[0];
            const int ny = py + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            seed(nx, ny);
        }
    }
    Raster out(w, h, 1);
    auto d = out.data();
    for (std::size_t i = 0; i < outside.size(); ++i) d[i] = outside[i] ? 0 : 255;
    return out;
}

std::size_t count_nonzero(const Raster& mask) {
    return static_cast<std::size_t>(
        std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

Raster foreground_mask(const Raster& img) {
    const Raster gray = to_grayscale(img);
    const int w = gray.width();
    const int h = gray.height();
    const int t = otsu_threshold(gray);
    double border = 0.0;
    int n = 0;
    for (int x = 0; x < w; ++x) {
        border += gray.at(x, 0) + gray.at(x, h - 1);
        n += 2;
    }
    for (int y = 0; y < h; ++y) {
        border += gray.at(0, y) + gray.at(w - 1, y);
        n += 2;
    }
    const bool bright_background = border / n > t;
    Raster fg(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool upper = gray.at(x, y) > t;
            fg.at(x, y) = (upper != bright_background) ? 255 : 0;
        }
    }
    Raster out = fill_holes(largest_component(fg));
    if (count_nonzero(out) == 0) return Raster(w, h, 1, 255);
    return out;
}

}  // namespace handcap::imaging

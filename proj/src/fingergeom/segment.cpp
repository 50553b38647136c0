#include "handcap/fingergeom/segment.hpp"

#include <algorithm>
#include <string>

#include "handcap/common/error.hpp"

namespace handcap::fingergeom {

namespace {

struct Chain {
    std::vector<RowRun> runs;
    bool open = true;
};

double median_width(const std::vector<RowRun>& runs) {
    std::vector<int> w;
    w.reserve(runs.size());
    for (const auto& r : runs) w.push_back(r.width());
    std::nth_element(w.begin(), w.begin() + w.size() / 2, w.end());
    return w[w.size() / 2];
}

bool touches(const RowRun& a, const RowRun& b) { return a.x0 <= b.x1 && b.x0 <= a.x1; }

}  // namespace

std::string_view finger_name(FingerKind k) {
    switch (k) {
        case FingerKind::Index: return "index";
        case FingerKind::Middle: return "middle";
        case FingerKind::Ring: return "ring";
        case FingerKind::Little: return "little";
    }
    return "?";
}

std::vector<std::vector<RowRun>> row_runs(const Raster& mask) {
    std::vector<std::vector<RowRun>> rows(static_cast<std::size_t>(mask.height()));
    for (int y = 0; y < mask.height(); ++y) {
        int prev = 0;
        int start = 0;
        for (int x = 0; x <= mask.width(); ++x) {
            const int cur = (x < mask.width() && mask.at(x, y)) ? 1 : 0;
            const int diff = cur - prev;
            if (diff == 1) start = x;
            if (diff == -1) rows[y].push_back({y, start, x});
            prev = cur;
        }
    }
    return rows;
}

std::array<Finger, 4> segment_fingers(const HandContour& hand) {
    const Raster& mask = hand.mask;
    const auto rows = row_runs(mask);

    std::vector<Chain> chains;
    std::vector<int> prev_owner;
    const std::vector<RowRun>* prev = nullptr;
    int widest = 0;
    for (const auto& cur : rows) {
        for (const auto& r : cur) widest = std::max(widest, r.width());
        std::vector<int> owner(cur.size(), -1);
        std::vector<int> down(prev ? prev->size() : 0, 0);
        std::vector<std::vector<int>> up(cur.size());
        if (prev) {
            for (std::size_t j = 0; j < cur.size(); ++j) {
                for (std::size_t i = 0; i < prev->size(); ++i) {
                    if (!touches(cur[j], (*prev)[i])) continue;
                    up[j].push_back(static_cast<int>(i));
                    ++down[i];
                }
            }
        }
        for (std::size_t j = 0; j < cur.size(); ++j) {
            if (up[j].empty()) {
                owner[j] = static_cast<int>(chains.size());
                chains.push_back({{cur[j]}, true});
                continue;
            }
            const int p = up[j][0];
            const int id = up[j].size() == 1 && down[p] == 1 ? prev_owner[p] : -1;
            if (id >= 0 && chains[id].open) {
                Chain& ch = chains[id];
                // Rounded tips are narrow, so only judge the width once past the tip.
                const double mw = median_width(ch.runs);
                if (static_cast<double>(ch.runs.size()) >= std::max(5.0, 1.5 * mw) && cur[j].width() > 1.6 * mw) {
                    ch.open = false;  // widening into the palm
                } else {
                    ch.runs.push_back(cur[j]);
                    owner[j] = id;
                }
                continue;
            }
            // Jagged fingertips can open two short chains that join a few rows
            // later; fold those into one instead of ending the finger.
            if (up[j].size() > 1) {
                int keep = -1;
                int long_chains = 0;
                bool foldable = true;
                for (int i : up[j]) {
                    const int o = prev_owner[i];
                    if (o < 0 || !chains[o].open || down[i] != 1) {
                        foldable = false;
                        break;
                    }
                    if (chains[o].runs.size() >= 5) ++long_chains;
                    if (keep < 0 || chains[o].runs.size() > chains[keep].runs.size()) keep = o;
                }
                if (foldable && long_chains <= 1) {
                    for (int i : up[j]) {
                        const int o = prev_owner[i];
                        if (o == keep) continue;
                        auto& donor = chains[o].runs;
                        chains[keep].runs.insert(chains[keep].runs.end(), donor.begin(), donor.end());
                        donor.clear();
                        chains[o].open = false;
                    }
                    // Coalesce same-row pieces so widths stay meaningful.
                    auto& runs = chains[keep].runs;
                    std::sort(runs.begin(), runs.end(), [](const RowRun& a, const RowRun& b) { return a.y < b.y; });
                    std::vector<RowRun> merged;
                    for (const auto& r : runs) {
                        if (!merged.empty() && merged.back().y == r.y) {
                            merged.back().x0 = std::min(merged.back().x0, r.x0);
                            merged.back().x1 = std::max(merged.back().x1, r.x1);
                        } else {
                            merged.push_back(r);
                        }
                    }
                    runs = std::move(merged);
                    runs.push_back(cur[j]);
                    owner[j] = keep;
                    continue;
                }
            }
            // Merge or split: the chains involved end here.
            for (int i : up[j]) {
                if (prev_owner[i] >= 0) chains[prev_owner[i]].open = false;
            }
        }
        prev = &cur;
        prev_owner = std::move(owner);
    }

    std::vector<const Chain*> cand;
    for (const auto& ch : chains) {
        if (ch.runs.empty()) continue;
        const double mw = median_width(ch.runs);
        if (static_cast<double>(ch.runs.size()) < std::max(10.0, mw)) continue;
        if (mw > 0.35 * widest) continue;
        cand.push_back(&ch);
    }

    const Chain* thumb = nullptr;
    if (cand.size() == 5) {
        // The thumb's tip sits lowest.
        auto it = std::max_element(cand.begin(), cand.end(),
                                   [](const Chain* a, const Chain* b) { return a->runs.front().y < b->runs.front().y; });
        thumb = *it;
        cand.erase(it);
    }
    if (cand.size() != 4) {
        throw Error("segmentation failure: " + std::to_string(cand.size()) + " candidate fingers");
    }

    auto tip_x = [](const Chain* c) { return (c->runs.front().x0 + c->runs.front().x1 - 1) / 2.0; };
    std::sort(cand.begin(), cand.end(), [&](const Chain* a, const Chain* b) { return tip_x(a) < tip_x(b); });
    bool index_left;
    if (thumb) {
        double mean = 0;
        for (auto* c : cand) mean += tip_x(c) / 4;
        index_left = tip_x(thumb) < mean;
    } else {
        // Without a thumb, the shorter end finger is the little finger.
        index_left = cand.front()->runs.size() >= cand.back()->runs.size();
    }
    if (!index_left) std::reverse(cand.begin(), cand.end());

    std::array<Finger, 4> out;
    for (int k = 0; k < 4; ++k) {
        Finger& f = out[k];
        f.kind = static_cast<FingerKind>(k);
        f.mask = Raster(mask.width(), mask.height(), 1);
        int x0 = mask.width(), x1 = 0, y0 = mask.height(), y1 = 0;
        double sx = 0, sy = 0, n = 0;
        for (const auto& r : cand[k]->runs) {
            for (int x = r.x0; x < r.x1; ++x) {
                f.mask.at(x, r.y) = 255;
                sx += x;
                sy += r.y;
                n += 1;
            }
            x0 = std::min(x0, r.x0);
            x1 = std::max(x1, r.x1);
            y0 = std::min(y0, r.y);
            y1 = std::max(y1, r.y + 1);
        }
        f.box = {x0, y0, x1 - x0, y1 - y0};
        const auto& top = cand[k]->runs.front();
        f.tip = {(top.x0 + top.x1 - 1) / 2, top.y};
        f.cx = sx / n;
        f.cy = sy / n;
    }
    return out;
}

}  // namespace handcap::fingergeom

#include "handcap/pad/quality.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "handcap/common/error.hpp"
#include "handcap/imaging/ops.hpp"
#include "handcap/imaging/png_io.hpp"

namespace fs = std::filesystem;

namespace handcap::pad {

double QualityVector::operator[](Metric m) const {
    const auto it = std::find(metrics.begin(), metrics.end(), m);
    if (it == metrics.end()) throw InvalidArgument("metric not in vector: " + std::string(metric_name(m)));
    return values[static_cast<std::size_t>(it - metrics.begin())];
}

QualityVector quality_vector(const Raster& img, const std::vector<Metric>& metrics,
                             const fingergeom::MinMaxNormalizer* normalizer, std::string id) {
    if (metrics.empty()) throw InvalidArgument("empty metric subset");
    if (normalizer && !normalizer->fitted()) throw InvalidArgument("normalizer not fitted");
    QualityVector q;
    q.id = std::move(id);
    q.metrics = metrics;
    const auto ref = RealImage::from_raster(imaging::to_grayscale(img));
    const auto degraded = imaging::gaussian_degrade(ref);
    for (Metric m : metrics) {
        bool capped = false;
        q.values.push_back(compare_metric(m, ref, degraded, &capped));
        q.psnr_capped = q.psnr_capped || capped;
    }
    if (normalizer) {
        q.values = normalizer->apply(q.values);
        q.normalized = true;
    }
    return q;
}

std::string_view label_name(Label l) { return l == Label::Real ? "real" : "fake"; }

Label parse_label(std::string_view s) {
    if (s == "real") return Label::Real;
    if (s == "fake") return Label::Fake;
    throw InvalidArgument("unknown label: '" + std::string(s) + "'");
}

void QualitySet::add(std::string id, Label label, std::span<const double> row) {
    if (row.size() != metrics.size()) throw InvalidArgument("dimension mismatch: quality row");
    values.append_row(row);
    ids.push_back(std::move(id));
    labels.push_back(label);
}

QualitySet QualitySet::select(const std::vector<Metric>& subset) const {
    std::vector<std::size_t> cols;
    for (Metric m : subset) {
        const auto it = std::find(metrics.begin(), metrics.end(), m);
        if (it == metrics.end()) throw InvalidArgument("metric not in set: " + std::string(metric_name(m)));
        cols.push_back(static_cast<std::size_t>(it - metrics.begin()));
    }
    QualitySet out;
    out.metrics = subset;
    out.ids = ids;
    out.labels = labels;
    out.values = values.select_columns(cols);
    return out;
}

QualitySet QualitySet::rows(const std::vector<std::size_t>& idx) const {
    QualitySet out;
    out.metrics = metrics;
    out.values = values.select_rows(idx);
    for (auto i : idx) {
        out.ids.push_back(ids.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

std::vector<int> QualitySet::int_labels() const {
    std::vector<int> out;
    for (auto l : labels) out.push_back(static_cast<int>(l));
    return out;
}

void QualitySet::write_csv(std::ostream& out) const {
    out << "id,label";
    for (Metric m : metrics) out << ',' << metric_name(m);
    out << '\n';
    out.precision(17);
    for (std::size_t r = 0; r < size(); ++r) {
        if (ids[r].find(',') != std::string::npos) throw InvalidArgument("id contains a comma: " + ids[r]);
        out << ids[r] << ',' << label_name(labels[r]);
        for (double v : values.row(r)) out << ',' << v;
        out << '\n';
    }
}

QualitySet QualitySet::read_csv(std::istream& in) {
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        return cells;
    };
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("malformed quality csv: empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "label") {
        throw InvalidArgument("malformed quality csv: header must start with id,label");
    }
    QualitySet set;
    for (std::size_t i = 2; i < header.size(); ++i) set.metrics.push_back(parse_metric(header[i]));
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw InvalidArgument("malformed quality csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells");
        }
        std::vector<double> row;
        for (std::size_t i = 2; i < cells.size(); ++i) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cells[i], &used));
                if (used != cells[i].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InvalidArgument("malformed quality csv: line " + std::to_string(lineno) + " bad number '" +
                                      cells[i] + "'");
            }
        }
        set.add(cells[0], parse_label(cells[1]), row);
    }
    return set;
}

void QualitySet::save_csv(const fs::path& p) const {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    write_csv(out);
}

QualitySet QualitySet::load_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    return read_csv(in);
}

QualitySet quality_set_from_dir(const fs::path& dir, const std::vector<Metric>& metrics) {
    if (!fs::is_directory(dir)) throw IoError("directory not found: " + dir.string());
    QualitySet set;
    set.metrics = metrics;
    for (Label label : {Label::Real, Label::Fake}) {
        const fs::path sub = dir / label_name(label);
        if (!fs::is_directory(sub)) continue;
        std::vector<fs::path> files;
        for (const auto& e : fs::recursive_directory_iterator(sub)) {
            if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            auto rel = fs::relative(f, sub);
            rel.replace_extension();
            auto q = quality_vector(imaging::read_png(f), metrics, nullptr, rel.generic_string());
            set.add(q.id, label, q.values);
        }
    }
    if (set.size() == 0) throw InvalidArgument("no images under " + dir.string() + "/{real,fake}");
    return set;
}

std::pair<std::string, std::string> split_id(const std::string& id) {
    const auto slash = id.rfind('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == id.size()) {
        throw InvalidArgument("id is not <subject>/<sample>: '" + id + "'");
    }
    return {id.substr(0, slash), id.substr(slash + 1)};
}

}  // namespace handcap::pad

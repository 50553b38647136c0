#include "handcap/verify/matrix.hpp"

#include <cmath>
#include <string>

#include "handcap/common/error.hpp"

namespace handcap::verify {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m;
    for (const auto& r : rows) {
        if (!m.empty() && r.size() != m.cols_) throw InvalidArgument("ragged rows");
        m.append_row(r);
    }
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    if (c >= cols_) throw InvalidArgument("column out of range");
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) {
        throw InvalidArgument("dimension mismatch: row of " + std::to_string(values.size()) + " into width " +
                              std::to_string(cols_));
    }
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
}

Matrix Matrix::select_rows(const std::vector<std::size_t>& idx) const {
    Matrix out(idx.size(), cols_);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= rows_) throw InvalidArgument("row out of range");
        const auto src = row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::select_columns(const std::vector<std::size_t>& idx) const {
    for (auto c : idx) {
        if (c >= cols_) throw InvalidArgument("column out of range");
    }
    Matrix out(rows_, idx.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
    }
    return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidArgument("dimension mismatch");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace handcap::verify

#include "rsub/matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <utility>

namespace rsub {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const DenseMatrix& m) {
    return ConstMap(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                    static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw ShapeError("DenseMatrix: data length does not match rows*cols");
    }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void DenseMatrix::require_finite(const char* who) const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(who) + ": non-finite entry");
        }
    }
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    MutMap(c.data().data(), static_cast<Eigen::Index>(c.rows()),
           static_cast<Eigen::Index>(c.cols())) = map_of(a) * map_of(b);
    c.require_finite("matmul");
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_tn: inner dimensions differ");
    DenseMatrix c(a.cols(), b.cols());
    MutMap(c.data().data(), static_cast<Eigen::Index>(c.rows()),
           static_cast<Eigen::Index>(c.cols())) = map_of(a).transpose() * map_of(b);
    c.require_finite("matmul_tn");
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("matmul_nt: inner dimensions differ");
    DenseMatrix c(a.rows(), b.rows());
    MutMap(c.data().data(), static_cast<Eigen::Index>(c.rows()),
           static_cast<Eigen::Index>(c.cols())) = map_of(a) * map_of(b).transpose();
    c.require_finite("matmul_nt");
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

DenseMatrix take_rows(const DenseMatrix& a, std::span<const std::size_t> idx) {
    DenseMatrix out(idx.size(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= a.rows()) throw ShapeError("take_rows: index out of range");
        auto src = a.row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom) {
    if (top.cols() != bottom.cols()) throw ShapeError("vstack: column counts differ");
    DenseMatrix out(top.rows() + bottom.rows(), top.cols());
    std::copy(top.data().begin(), top.data().end(), out.data().begin());
    std::copy(bottom.data().begin(), bottom.data().end(),
              out.data().begin() + static_cast<std::ptrdiff_t>(top.size()));
    return out;
}

}  // namespace rsub

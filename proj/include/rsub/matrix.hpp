#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "rsub/errors.hpp"

namespace rsub {

// Row-major dense matrix of doubles. The one numeric carrier used for
// sample batches, network activations and parameter blocks.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return at(r, c); }
    double operator()(std::size_t r, std::size_t c) const { return at(r, c); }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    // Throws NumericError if any entry is NaN or infinite.
    void require_finite(const char* who) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// C = A * B. Shapes checked, result validated finite.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// C = A^T * B without materializing the transpose.
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// C = A * B^T without materializing the transpose.
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// Rows of `a` selected by `idx`, in order (repeats allowed).
DenseMatrix take_rows(const DenseMatrix& a, std::span<const std::size_t> idx);

// Stack two matrices with equal column counts, `top` first.
DenseMatrix vstack(const DenseMatrix& top, const DenseMatrix& bottom);

}  // namespace rsub

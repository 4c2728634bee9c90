#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "chfsi/errors.hpp"

namespace chfsi {

using Complex = std::complex<double>;
using Index = std::ptrdiff_t;

class ConstMatrixView {
public:
    ConstMatrixView() = default;
    ConstMatrixView(const Complex* data, Index rows, Index cols, Index ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld) {}

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index ld() const noexcept { return ld_; }
    const Complex* data() const noexcept { return data_; }

    const Complex& operator()(Index i, Index j) const { return data_[i + j * ld_]; }
    std::span<const Complex> col(Index j) const {
        return {data_ + j * ld_, static_cast<std::size_t>(rows_)};
    }
    ConstMatrixView columns(Index first, Index count) const {
        CHFSI_REQUIRE(first >= 0 && count >= 0 && first + count <= cols_,
                      "column range out of bounds");
        return {data_ + first * ld_, rows_, count, ld_};
    }

private:
    const Complex* data_ = nullptr;
    Index rows_ = 0;
    Index cols_ = 0;
    Index ld_ = 0;
};

class MatrixView {
public:
    MatrixView() = default;
    MatrixView(Complex* data, Index rows, Index cols, Index ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld) {}

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index ld() const noexcept { return ld_; }
    Complex* data() const noexcept { return data_; }

    Complex& operator()(Index i, Index j) const { return data_[i + j * ld_]; }
    std::span<Complex> col(Index j) const {
        return {data_ + j * ld_, static_cast<std::size_t>(rows_)};
    }
    MatrixView columns(Index first, Index count) const {
        CHFSI_REQUIRE(first >= 0 && count >= 0 && first + count <= cols_,
                      "column range out of bounds");
        return {data_ + first * ld_, rows_, count, ld_};
    }
    operator ConstMatrixView() const { return {data_, rows_, cols_, ld_}; }

private:
    Complex* data_ = nullptr;
    Index rows_ = 0;
    Index cols_ = 0;
    Index ld_ = 0;
};

/// Dense complex matrix, column-major and owning.
class Matrix {
public:
    Matrix() = default;
    Matrix(Index rows, Index cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols)) {}
    Matrix(Index rows, Index cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        CHFSI_REQUIRE(static_cast<Index>(data_.size()) == rows * cols,
                      "matrix data length does not match its shape");
    }
    explicit Matrix(ConstMatrixView v) : Matrix(v.rows(), v.cols()) {
        for (Index j = 0; j < cols_; ++j)
            for (Index i = 0; i < rows_; ++i) (*this)(i, j) = v(i, j);
    }

    static Matrix identity(Index n) {
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(Index i, Index j) { return data_[i + j * rows_]; }
    const Complex& operator()(Index i, Index j) const { return data_[i + j * rows_]; }

    Complex* data() noexcept { return data_.data(); }
    const Complex* data() const noexcept { return data_.data(); }
    std::span<Complex> values() noexcept { return data_; }
    std::span<const Complex> values() const noexcept { return data_; }

    std::span<Complex> col(Index j) {
        return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)};
    }
    std::span<const Complex> col(Index j) const {
        return {data_.data() + j * rows_, static_cast<std::size_t>(rows_)};
    }

    MatrixView view() { return {data_.data(), rows_, cols_, rows_}; }
    ConstMatrixView view() const { return {data_.data(), rows_, cols_, rows_}; }
    MatrixView columns(Index first, Index count) { return view().columns(first, count); }
    ConstMatrixView columns(Index first, Index count) const {
        return view().columns(first, count);
    }

    operator ConstMatrixView() const { return view(); }
    operator MatrixView() { return view(); }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    static std::size_t checked_size(Index rows, Index cols) {
        CHFSI_REQUIRE(rows >= 0 && cols >= 0, "negative matrix dimension");
        return static_cast<std::size_t>(rows * cols);
    }

    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Complex> data_;
};

/// n x s block of column vectors. Shares storage and kernels with Matrix.
using VectorBlock = Matrix;

/// Square matrix satisfying H = H^H. Symmetrized on construction.
class HermitianMatrix {
public:
    HermitianMatrix() = default;

    /// Validates |H_ij - conj(H_ji)| <= rel_tol * max|H_ij| before symmetrizing.
    static HermitianMatrix from_raw(Matrix raw, double rel_tol = 1e-13);
    /// Symmetrizes (H + H^H)/2 without validation.
    static HermitianMatrix symmetrize(Matrix raw);

    Index order() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    ConstMatrixView view() const { return m_.view(); }
    const Complex& operator()(Index i, Index j) const { return m_(i, j); }
    operator ConstMatrixView() const { return m_.view(); }

    friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

private:
    explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

/// Largest |A_ij - conj(A_ji)| relative to max|A_ij|; zero for the zero matrix.
double hermitian_deviation(ConstMatrixView a);

/// Lower-triangular Cholesky factor L with real positive diagonal.
class CholeskyFactor {
public:
    CholeskyFactor() = default;
    explicit CholeskyFactor(Matrix lower) : l_(std::move(lower)) {}

    Index order() const noexcept { return l_.rows(); }
    const Matrix& lower() const noexcept { return l_; }

private:
    Matrix l_;
};

}  // namespace chfsi

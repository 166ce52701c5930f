#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sisfit {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense complex matrix, column-major. Columns are contiguous so that a
/// column can be handed out as a span (the fiber matrices are consumed
/// column by column).
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);

    static CMatrix identity(std::size_t dim);
    /// Builds a matrix whose columns are the given vectors (all of equal length).
    static CMatrix from_columns(std::span<const CVector> columns);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    [[nodiscard]] std::span<Complex> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
    [[nodiscard]] std::span<const Complex> col(std::size_t c) const noexcept {
        return {data_.data() + c * rows_, rows_};
    }
    [[nodiscard]] CVector col_vector(std::size_t c) const;

    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }

    [[nodiscard]] CMatrix adjoint() const;
    [[nodiscard]] CMatrix transpose() const;
    [[nodiscard]] CMatrix conj() const;

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, const CMatrix& a);

/// <x, y> = sum_k x_k conj(y_k); linear in the first argument.
/// Inputs longer than 4096 entries are accumulated with Kahan compensation.
Complex inner(std::span<const Complex> x, std::span<const Complex> y);
double norm_sq(std::span<const Complex> x);
double norm(std::span<const Complex> x);
double frobenius_sq(const CMatrix& a);
double frobenius(const CMatrix& a);

/// y += alpha * x
void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y);

[[nodiscard]] bool all_finite(std::span<const Complex> x) noexcept;

/// Orthonormal basis (as matrix columns) of span{columns of a}, by modified
/// Gram-Schmidt with one reorthogonalization pass. A column is dropped when
/// its remaining norm is at most rel_tol times its original norm, or at most
/// abs_tol.
CMatrix orthonormal_basis(const CMatrix& a, double rel_tol = 1e-10, double abs_tol = 0.0);

/// Orthogonal projector Q Q^* onto the span of the orthonormal columns of q.
CMatrix projector(const CMatrix& q);

} // namespace sisfit

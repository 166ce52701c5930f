#include "sisfit/dense.hpp"

#include "sisfit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sisfit {

namespace {

constexpr std::size_t kCompensatedThreshold = 4096;

// Neumaier variant of Kahan summation, one accumulator per real component.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InputError(std::string(what) + ": shape mismatch");
    }
}

} // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix CMatrix::identity(std::size_t dim) {
    CMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> columns) {
    if (columns.empty()) {
        return {};
    }
    const std::size_t rows = columns.front().size();
    CMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != rows) {
            throw InputError("CMatrix::from_columns: ragged columns");
        }
        std::copy(columns[c].begin(), columns[c].end(), m.col(c).begin());
    }
    return m;
}

CVector CMatrix::col_vector(std::size_t c) const {
    const auto s = col(c);
    return {s.begin(), s.end()};
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t r = 0; r < rows_; ++r) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

CMatrix CMatrix::transpose() const {
    CMatrix out(cols_, rows_);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t r = 0; r < rows_; ++r) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

CMatrix CMatrix::conj() const {
    CMatrix out = *this;
    for (auto& v : out.data_) {
        v = std::conj(v);
    }
    return out;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) {
        throw InputError("matrix product: inner dimension mismatch");
    }
    CMatrix out(a.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto dst = out.col(j);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            axpy(b(k, j), a.col(k), dst);
        }
    }
    return out;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "matrix difference");
    CMatrix out = a;
    auto dst = out.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] -= src[i];
    }
    return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    require_same_shape(a, b, "matrix sum");
    CMatrix out = a;
    auto dst = out.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += src[i];
    }
    return out;
}

CMatrix operator*(Complex s, const CMatrix& a) {
    CMatrix out = a;
    for (auto& v : out.data()) {
        v *= s;
    }
    return out;
}

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    if (x.size() != y.size()) {
        throw InputError("inner product: length mismatch");
    }
    if (x.size() <= kCompensatedThreshold) {
        Complex acc = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            acc += x[k] * std::conj(y[k]);
        }
        return acc;
    }
    CompensatedSum re;
    CompensatedSum im;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const Complex p = x[k] * std::conj(y[k]);
        re.add(p.real());
        im.add(p.imag());
    }
    return {re.value(), im.value()};
}

double norm_sq(std::span<const Complex> x) {
    if (x.size() <= kCompensatedThreshold) {
        double acc = 0.0;
        for (const auto& v : x) {
            acc += std::norm(v);
        }
        return acc;
    }
    CompensatedSum acc;
    for (const auto& v : x) {
        acc.add(std::norm(v));
    }
    return acc.value();
}

double norm(std::span<const Complex> x) { return std::sqrt(norm_sq(x)); }

double frobenius_sq(const CMatrix& a) { return norm_sq(a.data()); }

double frobenius(const CMatrix& a) { return std::sqrt(frobenius_sq(a)); }

void axpy(Complex alpha, std::span<const Complex> x, std::span<Complex> y) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        y[k] += alpha * x[k];
    }
}

bool all_finite(std::span<const Complex> x) noexcept {
    for (const auto& v : x) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            return false;
        }
    }
    return true;
}

CMatrix orthonormal_basis(const CMatrix& a, double rel_tol, double abs_tol) {
    std::vector<CVector> basis;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        CVector v = a.col_vector(c);
        const double original = norm(v);
        if (original == 0.0) {
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : basis) {
                axpy(-inner(v, e), e, v);
            }
        }
        const double remaining = norm(v);
        if (remaining <= rel_tol * original || remaining <= abs_tol) {
            continue;
        }
        for (auto& x : v) {
            x /= remaining;
        }
        basis.push_back(std::move(v));
    }
    if (basis.empty()) {
        return CMatrix(a.rows(), 0);
    }
    return CMatrix::from_columns(basis);
}

CMatrix projector(const CMatrix& q) {
    if (q.cols() == 0) {
        return CMatrix(q.rows(), q.rows());
    }
    return q * q.adjoint();
}

} // namespace sisfit

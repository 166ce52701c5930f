#include "sisfit/subspace_fit.hpp"

#include "sisfit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sisfit {

HermitianMatrix gram_matrix(const CMatrix& data) {
    const std::size_t m = data.cols();
    CMatrix g(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const Complex v = inner(data.col(i), data.col(j));
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
        g(j, j) = g(j, j).real();
    }
    return HermitianMatrix(std::move(g));
}

CMatrix left_eigenvectors(const EigenDecomposition& eig) { return eig.eigenvectors.conj(); }

double rank_cut(std::span<const double> eigenvalues, const FitOptions& options) {
    const double top = eigenvalues.empty() ? 0.0 : eigenvalues.front();
    return options.rank_tolerance * std::max(top, options.eigen_floor);
}

std::vector<double> inverse_roots(std::span<const double> eigenvalues, double cut) {
    std::vector<double> out(eigenvalues.size(), 0.0);
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues[i] > cut && eigenvalues[i] > 0.0) {
            out[i] = 1.0 / std::sqrt(eigenvalues[i]);
        }
    }
    return out;
}

CMatrix combine_columns(const CMatrix& data, const CMatrix& left, std::span<const double> sigma_tilde,
                        std::size_t n) {
    const std::size_t m = data.cols();
    CMatrix out(data.rows(), n);
    for (std::size_t i = 0; i < n && i < m; ++i) {
        if (sigma_tilde[i] == 0.0) {
            continue;
        }
        auto q = out.col(i);
        for (std::size_t j = 0; j < m; ++j) {
            axpy(sigma_tilde[i] * left(j, i), data.col(j), q);
        }
    }
    return out;
}

FitResult best_subspace(const CMatrix& data, int n, const FitOptions& options) {
    if (n < 0) {
        throw InputError("best_subspace: n must be non-negative");
    }
    if (data.cols() == 0 || data.rows() == 0) {
        throw InputError("best_subspace: at least one non-empty vector is required");
    }
    if (!all_finite(data.data())) {
        throw InputError("best_subspace: non-finite entry");
    }
    const std::size_t m = data.cols();
    const auto count = static_cast<std::size_t>(n);

    const EigenDecomposition eig = eigh_descending(gram_matrix(data));
    FitResult out;
    out.eigenvalues = eig.eigenvalues;
    out.left_eigenvectors = left_eigenvectors(eig);
    const double cut = rank_cut(out.eigenvalues, options);
    out.sigma_tilde = inverse_roots(out.eigenvalues, cut);
    out.effective_rank = static_cast<std::size_t>(
        std::count_if(out.sigma_tilde.begin(), out.sigma_tilde.end(), [](double s) { return s != 0.0; }));

    const CMatrix q = combine_columns(data, out.left_eigenvectors, out.sigma_tilde, count);
    out.frame_vectors.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.frame_vectors.push_back(q.col_vector(i));
    }

    for (std::size_t i = count; i < m; ++i) {
        out.error += out.eigenvalues[i];
    }
    if (count == 0) {
        out.gap_ok = true;
    } else {
        const double upper = count <= m ? out.eigenvalues[count - 1] : 0.0;
        const double lower = count < m ? out.eigenvalues[count] : 0.0;
        out.gap_ok = upper - lower > options.gap_tolerance * std::max(out.eigenvalues.front(), 1.0);
    }
    return out;
}

FitResult best_subspace(std::span<const CVector> vectors, int n, const FitOptions& options) {
    if (vectors.empty()) {
        throw InputError("best_subspace: at least one vector is required");
    }
    return best_subspace(CMatrix::from_columns(vectors), n, options);
}

double residual(const CMatrix& data, const CMatrix& basis) {
    if (basis.cols() > 0 && basis.rows() != data.rows()) {
        throw InputError("residual: basis vectors and data vectors differ in length");
    }
    const CMatrix e = basis.cols() > 0 ? orthonormal_basis(basis) : CMatrix(data.rows(), 0);
    double total = 0.0;
    for (std::size_t i = 0; i < data.cols(); ++i) {
        CVector r = data.col_vector(i);
        for (std::size_t c = 0; c < e.cols(); ++c) {
            axpy(-inner(r, e.col(c)), e.col(c), r);
        }
        total += norm_sq(r);
    }
    return total;
}

double residual(std::span<const CVector> vectors, std::span<const CVector> basis) {
    if (vectors.empty()) {
        return 0.0;
    }
    const CMatrix data = CMatrix::from_columns(vectors);
    const CMatrix b = basis.empty() ? CMatrix(data.rows(), 0) : CMatrix::from_columns(basis);
    return residual(data, b);
}

} // namespace sisfit

#pragma once

#include "sisfit/dense.hpp"

#include <cstddef>
#include <vector>

namespace sisfit {

/// Relative tolerance used to accept an input as Hermitian before it is
/// symmetrized exactly.
inline constexpr double kHermitianTolerance = 1e-12;
/// Eigenvalues closer than this (relative to the largest modulus) are
/// treated as one degenerate block.
inline constexpr double kEigenTieTolerance = 1e-12;
/// Default rank cut: sigma_k counts when sigma_k > kRankTolerance * max(sigma_1, 1).
inline constexpr double kRankTolerance = 1e-10;

/// A square complex matrix that is Hermitian by construction.
class HermitianMatrix {
public:
    /// Checks |h_ij - conj(h_ji)| <= 1e-12 * ||h||_F, then replaces h by
    /// (h + h^*) / 2. Throws InputError on non-square, empty or non-finite input.
    explicit HermitianMatrix(CMatrix entries);

    [[nodiscard]] std::size_t dim() const noexcept { return entries_.rows(); }
    [[nodiscard]] const CMatrix& entries() const noexcept { return entries_; }
    const Complex& operator()(std::size_t r, std::size_t c) const noexcept { return entries_(r, c); }

private:
    CMatrix entries_;
};

struct EigenDecomposition {
    std::vector<double> eigenvalues; ///< non-increasing
    CMatrix eigenvectors;            ///< column i pairs with eigenvalues[i]
};

struct SvdResult {
    std::vector<double> singular_values; ///< one per column of the input, non-increasing
    CMatrix left_vectors;                ///< N x min(N, m), orthonormal columns
    CMatrix right_vectors;               ///< m x m, unitary
    std::size_t rank = 0;
};

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The output is fully canonical, so bit-identical input gives bit-identical
/// output:
///  - eigenvalues are sorted descending, and values in [-1e-12 * lambda_max, 0)
///    are clamped to zero;
///  - inside a degenerate block the eigenvectors are rebuilt by projecting
///    e_0, e_1, ... onto the eigenspace and orthonormalizing in index order;
///  - each eigenvector is rotated so that its largest-modulus entry (lowest
///    index on ties) is real and non-negative.
EigenDecomposition eigh_descending(const HermitianMatrix& h);

/// Thin SVD of an N x m matrix built from the eigendecomposition of A^*A:
/// right vectors y_k are its eigenvectors, u_k = A y_k / sigma_k for the
/// sigma_k above the rank tolerance, and the remaining left vectors complete
/// an orthonormal set orthogonal to the column span.
SvdResult svd(const CMatrix& a, double rank_tolerance = kRankTolerance);

} // namespace sisfit

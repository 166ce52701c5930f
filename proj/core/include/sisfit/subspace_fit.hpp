#pragma once

#include "sisfit/dense.hpp"
#include "sisfit/spectral_core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sisfit {

struct FitOptions {
    /// lambda_i is treated as nonzero iff lambda_i > rank_tolerance * max(lambda_1, eigen_floor).
    double rank_tolerance = kRankTolerance;
    /// gap_ok iff lambda_n - lambda_{n+1} > gap_tolerance * max(lambda_1, 1).
    double gap_tolerance = 1e-8;
    /// Absolute floor for the rank cut, for callers that know the global scale.
    double eigen_floor = 0.0;
};

/// Best subspace of dimension <= n for a finite set of vectors.
struct FitResult {
    /// q_1..q_n. The ones with lambda_i above the rank cut are orthonormal,
    /// the rest are zero vectors.
    std::vector<CVector> frame_vectors;
    double error = 0.0;               ///< sum_{i>n} lambda_i
    std::vector<double> eigenvalues;  ///< of the Gram matrix, non-increasing
    CMatrix left_eigenvectors;        ///< column i is y_i
    std::vector<double> sigma_tilde;  ///< lambda_i^{-1/2} above the rank cut, else 0
    std::size_t effective_rank = 0;
    bool gap_ok = false;
};

/// Gram matrix with entries <a_i, a_j> of the columns of `data`.
HermitianMatrix gram_matrix(const CMatrix& data);

/// Left eigenvectors y_i (y_i^t G = lambda_i y_i^t) of a Hermitian G from its
/// eigendecomposition: the conjugates of the right eigenvectors.
CMatrix left_eigenvectors(const EigenDecomposition& eig);

/// Threshold below which an eigenvalue counts as zero.
double rank_cut(std::span<const double> eigenvalues, const FitOptions& options);

/// lambda_i^{-1/2} where lambda_i > cut, else 0.
std::vector<double> inverse_roots(std::span<const double> eigenvalues, double cut);

/// q_i = sigma_tilde_i * sum_j y_ij a_j for i < n; data is D x m, left is m x m.
CMatrix combine_columns(const CMatrix& data, const CMatrix& left, std::span<const double> sigma_tilde,
                        std::size_t n);

/// Solves min over subspaces S with dim S <= n of sum_i ||a_i - P_S a_i||^2.
/// The returned span lies inside span{a_i}. Indices beyond the effective rank
/// (including all indices >= m) yield zero vectors. Throws InputError for
/// n < 0, an empty input or vectors of unequal length.
FitResult best_subspace(std::span<const CVector> vectors, int n, const FitOptions& options = {});
FitResult best_subspace(const CMatrix& data, int n, const FitOptions& options = {});

/// sum_i ||a_i - P_S a_i||^2 with S = span(basis); dependent basis vectors are dropped.
double residual(std::span<const CVector> vectors, std::span<const CVector> basis);
double residual(const CMatrix& data, const CMatrix& basis);

} // namespace sisfit

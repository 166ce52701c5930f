#pragma once

#include "sisfit/dense.hpp"
#include "sisfit/fiber_transform.hpp"
#include "sisfit/spectral_core.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sisfit {

struct Tolerances {
    /// Per fiber, lambda_i(omega) counts as nonzero iff it exceeds
    /// rank * max(lambda_1(omega), rank * lambda_max) with lambda_max the
    /// largest eigenvalue over all fibers.
    double rank = kRankTolerance;
    /// The spectral gap lambda_n - lambda_{n+1} must exceed gap * max(lambda_max, 1).
    double gap = 1e-8;
};

/// Per-fiber Gramians G(omega)_ij = sum_k A(omega)_ki conj(A(omega)_kj).
struct FiberGramian {
    GridSpec grid;
    std::size_t signal_count = 0;
    std::vector<HermitianMatrix> matrices;
};

/// Per-fiber eigenvalues (descending) and left eigenvectors of the Gramian.
struct SpectralProfile {
    GridSpec grid;
    std::size_t signal_count = 0;
    std::vector<std::vector<double>> eigenvalues; ///< [omega][i]
    std::vector<CMatrix> left_vectors;            ///< [omega], column i is y_i(omega)
    std::vector<double> cuts;                     ///< [omega] rank threshold used
    std::vector<std::size_t> ranks;               ///< [omega]
    Tolerances tolerances;

    [[nodiscard]] std::size_t r_min() const;
    [[nodiscard]] std::size_t r_max() const;
    [[nodiscard]] double lambda_max() const;
    [[nodiscard]] double total() const; ///< sum of all eigenvalues
};

struct ModelDiagnostics {
    int requested = 0;             ///< n as requested (may exceed m)
    std::size_t length_actual = 0; ///< generators that are nonzero on some fiber
    std::size_t r_min = 0;
    std::size_t r_max = 0;
    bool unique_flag = false;
    double min_gap = 0.0;          ///< min over omega of lambda_n - lambda_{n+1}; 0 when n = 0
};

/// A finitely generated shift-invariant model: n generators and their fibers.
/// Immutable once built; the per-fiber orthonormal bases used for projection
/// are computed up front.
class SisModel {
public:
    /// Fibers are computed from the time-domain generators.
    SisModel(GridSpec grid, std::vector<CVector> generators, ModelDiagnostics diagnostics = {});
    /// Uses the given per-fiber forms (Q x n per omega) as the cached fibers.
    SisModel(GridSpec grid, std::vector<CVector> generators, std::vector<CMatrix> fibers,
             std::vector<std::vector<double>> sigma_tilde, ModelDiagnostics diagnostics);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return generators_.size(); }
    [[nodiscard]] const std::vector<CVector>& generators() const noexcept { return generators_; }
    [[nodiscard]] const CMatrix& fiber(std::size_t omega) const { return fibers_.at(omega); }
    [[nodiscard]] const std::vector<CMatrix>& fibers() const noexcept { return fibers_; }
    /// Orthonormal basis of the fiber space V_omega.
    [[nodiscard]] const CMatrix& fiber_basis(std::size_t omega) const { return bases_.at(omega); }
    /// [omega][i]; empty when the model was not synthesized from data.
    [[nodiscard]] const std::vector<std::vector<double>>& sigma_tilde() const noexcept { return sigma_tilde_; }
    [[nodiscard]] const ModelDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    void build_bases();

    GridSpec grid_;
    std::vector<CVector> generators_;
    std::vector<CMatrix> fibers_;
    std::vector<CMatrix> bases_;
    std::vector<std::vector<double>> sigma_tilde_;
    ModelDiagnostics diagnostics_;
};

/// Strictly positive, finite weights, one per signal.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> weights);
    [[nodiscard]] const std::vector<double>& values() const noexcept { return weights_; }
    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }

private:
    std::vector<double> weights_;
};

struct FrameBounds {
    double lower = 1.0;
    double upper = 1.0;
    std::size_t samples = 0; ///< 0 when the model space is {0} and the bounds are vacuous
};

struct UniquenessReport {
    bool unique = false;
    double min_gap = 0.0;
    std::size_t r_min = 0;
    bool within_rank = false;        ///< n <= r_min
    /// Set only by the model overload: P * G_Phi(omega) = I_n on every fiber within 1e-8.
    std::optional<bool> orthonormal_translates;
    double max_translate_deviation = 0.0;
};

struct ApproximationReport {
    int order = 0;                    ///< n the error refers to
    double error = 0.0;               ///< E(F, order)
    std::vector<double> curve;        ///< E(F, 0..m)
    double total_energy = 0.0;
    std::optional<FrameBounds> frame_bounds;
    bool unique_flag = false;
    double min_gap = 0.0;
    std::size_t r_min = 0;
    std::size_t r_max = 0;
    std::size_t length_actual = 0;
    bool weighted = false;
    std::optional<double> gamma;
    std::optional<std::size_t> selected_order; ///< argmin_n E(F,n) + gamma * n
};

struct CurveOptions {
    Tolerances tolerances;
    std::optional<double> gamma;
    /// Order the scalar error refers to; defaults to the selected order when
    /// gamma is set and to m otherwise.
    std::optional<int> order;
};

struct FitSettings {
    Tolerances tolerances;
    std::optional<WeightVector> weights;
    std::optional<double> gamma;
    int parseval_trials = 16;
    std::uint64_t seed = 0x5eed5eedULL;
};

struct FitOutcome {
    SisModel model;
    SpectralProfile profile;
    ApproximationReport report;
};

FiberGramian gramian(const FiberSet& fibers);

SpectralProfile spectral_profile(const FiberGramian& gramian, const Tolerances& tolerances = {});

/// Generators whose lattice translates form a Parseval frame of an optimal
/// space with at most n generators. n > m is reduced to m. Throws InputError for n < 0.
SisModel synthesize(const SignalSet& signals, int n, const Tolerances& tolerances = {});
SisModel synthesize(const FiberSet& fibers, const SpectralProfile& profile, int n);

/// sum_omega sum_{i > n} lambda_i(omega). Throws InputError unless 0 <= n <= m.
double error_formula(const SpectralProfile& profile, int n);

/// E(F, n) for n = 0..m.
std::vector<double> error_curve_values(const SpectralProfile& profile);

/// Orthogonal projection onto the model space, fiber by fiber.
CVector project(const SisModel& model, std::span<const Complex> signal);

/// sum_j ||f_j - P_V f_j||^2.
double direct_error(const SisModel& model, const SignalSet& signals);

/// sum_{i,k} |<f, T_k phi_i>|^2 over all generators and lattice translates,
/// evaluated directly in the sample domain.
double translate_frame_energy(const SisModel& model, std::span<const Complex> signal);

/// G_Phi(omega): Gram matrix of the generator fibers at omega.
CMatrix translate_gramian(const SisModel& model, std::size_t omega);

/// Extreme values of translate_frame_energy(f) / ||f||^2 over random f in the model space.
FrameBounds verify_parseval(const SisModel& model, int trials, std::uint64_t seed = 0x5eed5eedULL);

/// Spectral-gap test for uniqueness of the optimal space. Throws InputError unless 1 <= n <= m.
UniquenessReport uniqueness_check(const SpectralProfile& profile, int n);
/// As above with n = model.size(); also checks that the translates are orthonormal.
UniquenessReport uniqueness_check(const SpectralProfile& profile, const SisModel& model);

/// f_i <- sqrt(w_i) f_i.
SignalSet apply_weights(const SignalSet& signals, const WeightVector& weights);

/// Smallest n minimizing curve[n] + gamma * n. Throws InputError for gamma < 0.
std::size_t select_order(std::span<const double> curve, double gamma);

ApproximationReport error_curve(const SignalSet& signals, const CurveOptions& options = {});

/// Full pipeline: weights, fibers, spectrum, generators, curve and frame bounds.
FitOutcome fit(const SignalSet& signals, int n, const FitSettings& settings = {});

} // namespace sisfit

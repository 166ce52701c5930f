#include "sisfit/sis_model.hpp"

#include "sisfit/errors.hpp"
#include "sisfit/subspace_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace sisfit {

namespace {

constexpr double kBasisTolerance = 1e-10;
constexpr double kOrthonormalTranslateTolerance = 1e-8;

void require_order(int n, std::size_t m, const char* what) {
    if (n < 0 || static_cast<std::size_t>(n) > m) {
        throw InputError(std::string(what) + ": order " + std::to_string(n) + " outside [0, " + std::to_string(m) +
                         "]");
    }
}

double eigenvalue_or_zero(const std::vector<double>& values, std::size_t index) {
    return index < values.size() ? values[index] : 0.0;
}

// min over omega of lambda_n(omega) - lambda_{n+1}(omega), 1-based n >= 1.
double minimum_gap(const SpectralProfile& profile, std::size_t n) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& values : profile.eigenvalues) {
        gap = std::min(gap, eigenvalue_or_zero(values, n - 1) - eigenvalue_or_zero(values, n));
    }
    return gap;
}

bool gap_exceeds(const SpectralProfile& profile, double gap) {
    return gap > profile.tolerances.gap * std::max(profile.lambda_max(), 1.0);
}

std::size_t active_generators(const SpectralProfile& profile, std::size_t n) {
    std::size_t count = 0;
    for (std::size_t w = 0; w < profile.eigenvalues.size(); ++w) {
        std::size_t active = 0;
        while (active < n && active < profile.eigenvalues[w].size() &&
               profile.eigenvalues[w][active] > profile.cuts[w] && profile.eigenvalues[w][active] > 0.0) {
            ++active;
        }
        count = std::max(count, active);
    }
    return count;
}

std::vector<CMatrix> fibers_of(const GridSpec& grid, const std::vector<CVector>& generators) {
    std::vector<CMatrix> out(grid.fiber_count(), CMatrix(grid.fiber_length(), generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) {
        const auto per_fiber = fiberize(generators[i], grid);
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            std::copy(per_fiber[w].begin(), per_fiber[w].end(), out[w].col(i).begin());
        }
    }
    return out;
}

} // namespace

std::size_t SpectralProfile::r_min() const {
    return ranks.empty() ? 0 : *std::min_element(ranks.begin(), ranks.end());
}

std::size_t SpectralProfile::r_max() const {
    return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
}

double SpectralProfile::lambda_max() const {
    double top = 0.0;
    for (const auto& values : eigenvalues) {
        if (!values.empty()) {
            top = std::max(top, values.front());
        }
    }
    return top;
}

double SpectralProfile::total() const {
    double sum = 0.0;
    for (const auto& values : eigenvalues) {
        for (double v : values) {
            sum += v;
        }
    }
    return sum;
}

SisModel::SisModel(GridSpec grid, std::vector<CVector> generators, ModelDiagnostics diagnostics)
    : grid_(std::move(grid)), generators_(std::move(generators)), diagnostics_(diagnostics) {
    for (const auto& g : generators_) {
        if (g.size() != grid_.total()) {
            throw InputError("SisModel: generator length does not match the grid");
        }
        if (!all_finite(g)) {
            throw InputError("SisModel: non-finite generator sample");
        }
    }
    fibers_ = fibers_of(grid_, generators_);
    build_bases();
}

SisModel::SisModel(GridSpec grid, std::vector<CVector> generators, std::vector<CMatrix> fibers,
                   std::vector<std::vector<double>> sigma_tilde, ModelDiagnostics diagnostics)
    : grid_(std::move(grid)),
      generators_(std::move(generators)),
      fibers_(std::move(fibers)),
      sigma_tilde_(std::move(sigma_tilde)),
      diagnostics_(diagnostics) {
    if (fibers_.size() != grid_.fiber_count()) {
        throw InputError("SisModel: expected one fiber matrix per fiber index");
    }
    for (const auto& f : fibers_) {
        if (f.rows() != grid_.fiber_length() || f.cols() != generators_.size()) {
            throw InputError("SisModel: fiber matrix has the wrong shape");
        }
    }
    build_bases();
}

void SisModel::build_bases() {
    double largest = 0.0;
    for (const auto& f : fibers_) {
        for (std::size_t i = 0; i < f.cols(); ++i) {
            largest = std::max(largest, norm(f.col(i)));
        }
    }
    bases_.clear();
    bases_.reserve(fibers_.size());
    for (const auto& f : fibers_) {
        bases_.push_back(orthonormal_basis(f, kBasisTolerance, kBasisTolerance * largest));
    }
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
            throw InputError("WeightVector: weight " + std::to_string(i) + " is not a positive finite number");
        }
    }
}

FiberGramian gramian(const FiberSet& fibers) {
    FiberGramian out{fibers.grid, fibers.signal_count, {}};
    out.matrices.reserve(fibers.fibers.size());
    for (const auto& a : fibers.fibers) {
        out.matrices.push_back(gram_matrix(a));
    }
    return out;
}

SpectralProfile spectral_profile(const FiberGramian& gramian, const Tolerances& tolerances) {
    SpectralProfile out{gramian.grid, gramian.signal_count, {}, {}, {}, {}, tolerances};
    const std::size_t p = gramian.matrices.size();
    out.eigenvalues.reserve(p);
    out.left_vectors.reserve(p);
    for (const auto& g : gramian.matrices) {
        EigenDecomposition eig = eigh_descending(g);
        for (double& l : eig.eigenvalues) {
            l = std::max(l, 0.0);
        }
        out.left_vectors.push_back(left_eigenvectors(eig));
        out.eigenvalues.push_back(std::move(eig.eigenvalues));
    }
    const FitOptions cut_options{tolerances.rank, tolerances.gap, tolerances.rank * out.lambda_max()};
    out.cuts.resize(p);
    out.ranks.resize(p);
    for (std::size_t w = 0; w < p; ++w) {
        out.cuts[w] = rank_cut(out.eigenvalues[w], cut_options);
        out.ranks[w] = static_cast<std::size_t>(std::count_if(
            out.eigenvalues[w].begin(), out.eigenvalues[w].end(), [&](double l) { return l > out.cuts[w] && l > 0.0; }));
    }
    return out;
}

SisModel synthesize(const FiberSet& fibers, const SpectralProfile& profile, int n) {
    if (n < 0) {
        throw InputError("synthesize: n must be non-negative");
    }
    if (!(fibers.grid == profile.grid) || fibers.signal_count != profile.signal_count) {
        throw InputError("synthesize: fibers and spectral profile describe different data");
    }
    const GridSpec& grid = fibers.grid;
    const std::size_t m = fibers.signal_count;
    const std::size_t count = std::min(static_cast<std::size_t>(n), m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.fiber_count()));

    std::vector<CMatrix> generator_fibers;
    std::vector<std::vector<double>> sigma_tilde;
    generator_fibers.reserve(grid.fiber_count());
    sigma_tilde.reserve(grid.fiber_count());
    for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
        std::vector<double> s = inverse_roots(profile.eigenvalues[w], profile.cuts[w]);
        s.resize(count);
        generator_fibers.push_back(scale * combine_columns(fibers.fibers[w], profile.left_vectors[w], s, count));
        sigma_tilde.push_back(std::move(s));
    }

    std::vector<CVector> generators;
    generators.reserve(count);
    std::vector<CVector> per_fiber(grid.fiber_count());
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            per_fiber[w] = generator_fibers[w].col_vector(i);
        }
        generators.push_back(defiberize(per_fiber, grid));
    }

    ModelDiagnostics diag;
    diag.requested = n;
    diag.length_actual = active_generators(profile, count);
    diag.r_min = profile.r_min();
    diag.r_max = profile.r_max();
    if (count == 0) {
        diag.unique_flag = true;
        diag.min_gap = 0.0;
    } else {
        diag.min_gap = minimum_gap(profile, count);
        diag.unique_flag = gap_exceeds(profile, diag.min_gap);
    }
    return SisModel(grid, std::move(generators), std::move(generator_fibers), std::move(sigma_tilde), diag);
}

SisModel synthesize(const SignalSet& signals, int n, const Tolerances& tolerances) {
    if (n < 0) {
        throw InputError("synthesize: n must be non-negative");
    }
    const FiberSet fibers = fiberize(signals);
    return synthesize(fibers, spectral_profile(gramian(fibers), tolerances), n);
}

double error_formula(const SpectralProfile& profile, int n) {
    require_order(n, profile.signal_count, "error_formula");
    // Same summation order as error_curve_values, so both agree bit for bit.
    double sum = 0.0;
    for (const auto& values : profile.eigenvalues) {
        double tail = 0.0;
        for (std::size_t i = values.size(); i-- > static_cast<std::size_t>(n);) {
            tail += values[i];
        }
        sum += tail;
    }
    return sum;
}

std::vector<double> error_curve_values(const SpectralProfile& profile) {
    std::vector<double> curve(profile.signal_count + 1, 0.0);
    for (const auto& values : profile.eigenvalues) {
        double tail = 0.0;
        for (std::size_t i = values.size(); i-- > 0;) {
            tail += values[i];
            curve[i] += tail;
        }
    }
    return curve;
}

CVector project(const SisModel& model, std::span<const Complex> signal) {
    const GridSpec& grid = model.grid();
    if (signal.size() != grid.total()) {
        throw InputError("project: signal has " + std::to_string(signal.size()) + " samples, model grid has " +
                         std::to_string(grid.total()));
    }
    std::vector<CVector> fibers = fiberize(signal, grid);
    for (std::size_t w = 0; w < fibers.size(); ++w) {
        const CMatrix& basis = model.fiber_basis(w);
        CVector projected(grid.fiber_length(), 0.0);
        for (std::size_t c = 0; c < basis.cols(); ++c) {
            axpy(inner(fibers[w], basis.col(c)), basis.col(c), projected);
        }
        fibers[w] = std::move(projected);
    }
    return defiberize(fibers, grid);
}

double direct_error(const SisModel& model, const SignalSet& signals) {
    if (!(signals.grid() == model.grid())) {
        throw InputError("direct_error: signals and model live on different grids");
    }
    double total = 0.0;
    for (const auto& f : signals.signals()) {
        CVector r = project(model, f);
        for (std::size_t k = 0; k < r.size(); ++k) {
            r[k] = f[k] - r[k];
        }
        total += norm_sq(r);
    }
    return total;
}

double translate_frame_energy(const SisModel& model, std::span<const Complex> signal) {
    const GridSpec& grid = model.grid();
    if (signal.size() != grid.total()) {
        throw InputError("translate_frame_energy: signal length does not match the model grid");
    }
    double energy = 0.0;
    for (const auto& g : model.generators()) {
        for (std::size_t shift = 0; shift < grid.fiber_count(); ++shift) {
            energy += std::norm(inner(signal, lattice_shift(g, grid, shift)));
        }
    }
    return energy;
}

CMatrix translate_gramian(const SisModel& model, std::size_t omega) {
    const CMatrix& f = model.fiber(omega);
    return f.transpose() * f.conj();
}

FrameBounds verify_parseval(const SisModel& model, int trials, std::uint64_t seed) {
    if (trials < 1) {
        throw InputError("verify_parseval: at least one trial is required");
    }
    const GridSpec& grid = model.grid();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    FrameBounds bounds{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
    std::vector<CVector> fibers(grid.fiber_count(), CVector(grid.fiber_length()));
    for (int t = 0; t < trials; ++t) {
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            std::fill(fibers[w].begin(), fibers[w].end(), Complex{});
            const CMatrix& basis = model.fiber_basis(w);
            for (std::size_t c = 0; c < basis.cols(); ++c) {
                axpy(Complex{normal(rng), normal(rng)}, basis.col(c), fibers[w]);
            }
        }
        CVector f = defiberize(fibers, grid);
        const double len = norm(f);
        if (len == 0.0) {
            break;
        }
        for (auto& x : f) {
            x /= len;
        }
        const double ratio = translate_frame_energy(model, f);
        bounds.lower = std::min(bounds.lower, ratio);
        bounds.upper = std::max(bounds.upper, ratio);
        ++bounds.samples;
    }
    if (bounds.samples == 0) {
        return FrameBounds{};
    }
    return bounds;
}

UniquenessReport uniqueness_check(const SpectralProfile& profile, int n) {
    if (n < 1 || static_cast<std::size_t>(n) > profile.signal_count) {
        throw InputError("uniqueness_check: order " + std::to_string(n) + " outside [1, " +
                         std::to_string(profile.signal_count) + "]");
    }
    UniquenessReport out;
    out.min_gap = minimum_gap(profile, static_cast<std::size_t>(n));
    out.unique = gap_exceeds(profile, out.min_gap);
    out.r_min = profile.r_min();
    out.within_rank = static_cast<std::size_t>(n) <= out.r_min;
    return out;
}

UniquenessReport uniqueness_check(const SpectralProfile& profile, const SisModel& model) {
    if (!(profile.grid == model.grid())) {
        throw InputError("uniqueness_check: model and profile live on different grids");
    }
    UniquenessReport out = uniqueness_check(profile, static_cast<int>(model.size()));
    const auto p = static_cast<double>(model.grid().fiber_count());
    double deviation = 0.0;
    for (std::size_t w = 0; w < model.grid().fiber_count(); ++w) {
        const CMatrix g = translate_gramian(model, w);
        for (std::size_t c = 0; c < g.cols(); ++c) {
            for (std::size_t r = 0; r < g.rows(); ++r) {
                const Complex expected = r == c ? 1.0 : 0.0;
                deviation = std::max(deviation, std::abs(p * g(r, c) - expected));
            }
        }
    }
    out.max_translate_deviation = deviation;
    out.orthonormal_translates = deviation <= kOrthonormalTranslateTolerance;
    return out;
}

SignalSet apply_weights(const SignalSet& signals, const WeightVector& weights) {
    if (weights.size() != signals.count()) {
        throw InputError("apply_weights: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(signals.count()) + " signals");
    }
    std::vector<CVector> scaled = signals.signals();
    for (std::size_t j = 0; j < scaled.size(); ++j) {
        const double factor = std::sqrt(weights.values()[j]);
        for (auto& x : scaled[j]) {
            x *= factor;
        }
    }
    return SignalSet(signals.grid(), std::move(scaled));
}

std::size_t select_order(std::span<const double> curve, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
        throw InputError("select_order: gamma must be a finite non-negative number");
    }
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < curve.size(); ++n) {
        const double cost = curve[n] + gamma * static_cast<double>(n);
        if (cost < best_cost) {
            best = n;
            best_cost = cost;
        }
    }
    return best;
}

namespace {

ApproximationReport report_from_profile(const SpectralProfile& profile, const std::optional<double>& gamma,
                                        std::optional<int> order, double energy) {
    ApproximationReport out;
    out.curve = error_curve_values(profile);
    out.total_energy = energy;
    out.gamma = gamma;
    if (gamma) {
        out.selected_order = select_order(out.curve, *gamma);
    }
    const std::size_t m = profile.signal_count;
    if (!order) {
        order = out.selected_order ? static_cast<int>(*out.selected_order) : static_cast<int>(m);
    }
    out.order = std::min(*order, static_cast<int>(m));
    require_order(out.order, m, "error_curve");
    out.error = out.curve[static_cast<std::size_t>(out.order)];
    out.r_min = profile.r_min();
    out.r_max = profile.r_max();
    out.length_actual = active_generators(profile, static_cast<std::size_t>(out.order));
    if (out.order == 0) {
        out.unique_flag = true;
    } else {
        const UniquenessReport u = uniqueness_check(profile, out.order);
        out.unique_flag = u.unique;
        out.min_gap = u.min_gap;
    }
    return out;
}

} // namespace

ApproximationReport error_curve(const SignalSet& signals, const CurveOptions& options) {
    const FiberSet fibers = fiberize(signals);
    const SpectralProfile profile = spectral_profile(gramian(fibers), options.tolerances);
    return report_from_profile(profile, options.gamma, options.order, signals.energy());
}

FitOutcome fit(const SignalSet& signals, int n, const FitSettings& settings) {
    if (n < 0) {
        throw InputError("fit: n must be non-negative");
    }
    const SignalSet data = settings.weights ? apply_weights(signals, *settings.weights) : signals;
    const FiberSet fibers = fiberize(data);
    SpectralProfile profile = spectral_profile(gramian(fibers), settings.tolerances);
    SisModel model = synthesize(fibers, profile, n);
    ApproximationReport report =
        report_from_profile(profile, settings.gamma, static_cast<int>(model.size()), data.energy());
    report.weighted = settings.weights.has_value();
    report.frame_bounds = verify_parseval(model, settings.parseval_trials, settings.seed);
    return FitOutcome{std::move(model), std::move(profile), std::move(report)};
}

} // namespace sisfit

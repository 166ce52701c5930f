#pragma once

#include "oracles.hpp"

#include "sisfit/fiber_transform.hpp"
#include "sisfit/sis_model.hpp"

#include <vector>

namespace sisfit::testing {

/// Signals whose fibers are the columns of the given Q x m matrices.
inline SignalSet signals_from_fibers(const GridSpec& grid, const std::vector<CMatrix>& fibers) {
    const std::size_t m = fibers.front().cols();
    std::vector<CVector> out;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<CVector> per_fiber;
        for (const auto& a : fibers) {
            per_fiber.push_back(a.col_vector(j));
        }
        out.push_back(defiberize(per_fiber, grid));
    }
    return SignalSet(grid, std::move(out));
}

/// Unit deltas at samples 0 and 1 on N = 8, P = 4: orthonormal, G(omega) = I/4.
inline SignalSet orthonormal_pair() {
    GridSpec grid({8}, {4});
    CVector a(8);
    CVector b(8);
    a[0] = 1.0;
    b[1] = 1.0;
    return SignalSet(grid, {a, b});
}

/// Same idea with one fiber: G = I_2 exactly.
inline SignalSet orthonormal_pair_single_fiber() {
    GridSpec grid({4}, {1});
    CVector a(4);
    CVector b(4);
    a[0] = 1.0;
    b[2] = 1.0;
    return SignalSet(grid, {a, b});
}

/// m signals in the span of the translates of k random generators plus noise.
inline SignalSet generated_data(Rng& rng, const GridSpec& grid, std::size_t k, std::size_t m, double noise) {
    std::vector<CMatrix> fibers;
    for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
        const CMatrix basis = rng.matrix(grid.fiber_length(), k);
        CMatrix a = basis * rng.matrix(k, m);
        for (auto& x : a.data()) {
            x += noise * rng.cnormal();
        }
        fibers.push_back(std::move(a));
    }
    return signals_from_fibers(grid, fibers);
}

/// Real signals sum_i sum_k c_ijk T_k phi_i of k real generators with real
/// coefficients, plus real noise.
inline SignalSet real_generated_data(Rng& rng, const GridSpec& grid, std::size_t k, std::size_t m, double noise) {
    std::vector<CVector> generators;
    for (std::size_t i = 0; i < k; ++i) {
        generators.push_back(rng.real_vector(grid.total()));
    }
    std::vector<CVector> out;
    for (std::size_t j = 0; j < m; ++j) {
        CVector f(grid.total());
        for (const auto& phi : generators) {
            for (std::size_t shift = 0; shift < grid.fiber_count(); ++shift) {
                axpy(rng.normal(), lattice_shift(phi, grid, shift), f);
            }
        }
        for (auto& x : f) {
            x += noise * rng.normal();
        }
        out.push_back(std::move(f));
    }
    return SignalSet(grid, std::move(out));
}

inline CMatrix fiber_projector(const SisModel& model, std::size_t omega) { return projector(model.fiber_basis(omega)); }

inline double max_projector_difference(const SisModel& a, const SisModel& b) {
    double d = 0.0;
    for (std::size_t w = 0; w < a.grid().fiber_count(); ++w) {
        d = std::max(d, max_abs_diff(fiber_projector(a, w), fiber_projector(b, w)));
    }
    return d;
}

inline CVector difference(std::span<const Complex> a, std::span<const Complex> b) {
    CVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

} // namespace sisfit::testing

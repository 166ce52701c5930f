// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "fixtures.hpp"

#include "sisfit/sis_model.hpp"
#include "sisfit/subspace_fit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

using namespace sisfit;
using namespace sisfit::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

CVector unit_random(Rng& rng, std::size_t n) {
    CVector v = rng.vector(n);
    const double len = norm(v);
    for (auto& x : v) {
        x /= len;
    }
    return v;
}

// 1 ---------------------------------------------------------------------------
Outcome orthonormal_pair_example() {
    double worst = 0.0;
    bool flag = false;
    for (const SignalSet& s : {orthonormal_pair(), orthonormal_pair_single_fiber()}) {
        const FitOutcome out = fit(s, 1);
        worst = std::max(worst, std::abs(out.report.error - 1.0));
        worst = std::max(worst, std::abs(direct_error(out.model, s) - 1.0));
        flag = flag || out.report.unique_flag;
    }
    return {worst <= 1e-9 && !flag, fmt("max |E - 1| = %.3e, unique flag ", worst) + (flag ? "set" : "clear")};
}

// 2 ---------------------------------------------------------------------------
Outcome formula_vs_direct() {
    Rng rng(2002);
    const GridSpec grid({64}, {8});
    double worst = 0.0;
    int violations = 0;
    for (int instance = 0; instance < 50; ++instance) {
        const SignalSet s(grid, rng.signals(5, 64));
        const FiberSet f = fiberize(s);
        const SpectralProfile p = spectral_profile(gramian(f));
        for (int n = 0; n <= 5; ++n) {
            const double formula = error_formula(p, n);
            const double direct = direct_error(synthesize(f, p, n), s);
            const double ratio = std::abs(formula - direct) / (1.0 + formula);
            worst = std::max(worst, ratio);
            if (ratio > 1e-9) {
                ++violations;
            }
        }
    }
    return {violations == 0, fmt("300 cases, max |formula - direct| / (1 + E) = %.3e", worst)};
}

// 3 ---------------------------------------------------------------------------
Outcome parseval_property() {
    Rng rng(3003);
    struct Case {
        GridSpec grid;
        std::size_t m;
        int n;
    };
    const std::vector<Case> cases{{GridSpec({64}, {8}), 5, 2}, {GridSpec({24}, {6}), 3, 3}, {GridSpec({30}, {5}), 4, 1},
                                  {GridSpec({6, 8}, {3, 4}), 3, 2}, {GridSpec({36}, {36}), 2, 1},
                                  {GridSpec({16}, {1}), 4, 3}};
    double worst = 0.0;
    std::size_t models = 0;
    for (const auto& c : cases) {
        for (int rep = 0; rep < 3; ++rep) {
            // One rank-deficient instance per case exercises zero fibers.
            const SignalSet s = rep == 2 ? generated_data(rng, c.grid, 1, c.m, 0.0)
                                         : SignalSet(c.grid, rng.signals(c.m, c.grid.total()));
            const SisModel model = fit(s, c.n).model;
            ++models;
            for (int t = 0; t < 100; ++t) {
                const CVector f = unit_random(rng, c.grid.total());
                const double lhs = translate_frame_energy(model, f);
                const double rhs = norm_sq(project(model, f));
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return {worst <= 1e-9, fmt("%.0f models x 100 unit signals, max |frame sum - ||P f||^2| = %.3e",
                               static_cast<double>(models), worst)};
}

// 4 ---------------------------------------------------------------------------
Outcome optimality() {
    Rng rng(4004);
    const GridSpec grid({32}, {8});
    const std::size_t q = grid.fiber_length();
    int violations = 0;
    double tightest = std::numeric_limits<double>::infinity();
    for (int instance = 0; instance < 20; ++instance) {
        const std::size_t m = 3 + static_cast<std::size_t>(instance % 3);
        const int n = 1 + instance % 3;
        const SignalSet s = instance % 4 == 0 ? generated_data(rng, grid, 2, m, 0.1)
                                              : SignalSet(grid, rng.signals(m, grid.total()));
        const SisModel model = fit(s, n).model;
        const double best = direct_error(model, s);
        for (int trial = 0; trial < 1000; ++trial) {
            // Even trials: random unit fiber vectors. Odd trials: the optimum's fibers
            // perturbed at radii from 1 down to 1e-6.
            std::vector<CMatrix> fibers;
            const double radius = std::pow(10.0, -static_cast<double>(trial % 13) / 2.0);
            for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
                CMatrix phi(q, static_cast<std::size_t>(n));
                for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
                    CVector v = unit_random(rng, q);
                    if (trial % 2 == 1 && i < model.fiber(w).cols()) {
                        for (std::size_t k = 0; k < q; ++k) {
                            v[k] = model.fiber(w)(k, i) * std::sqrt(8.0) + radius * v[k];
                        }
                    }
                    std::copy(v.begin(), v.end(), phi.col(i).begin());
                }
                fibers.push_back(std::move(phi));
            }
            std::vector<CVector> generators;
            for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
                std::vector<CVector> per_fiber;
                for (const auto& phi : fibers) {
                    per_fiber.push_back(phi.col_vector(i));
                }
                generators.push_back(defiberize(per_fiber, grid));
            }
            const SisModel competitor(grid, generators);
            const double e = direct_error(competitor, s);
            const double slack = e - (best - 1e-10 * (1.0 + best));
            tightest = std::min(tightest, slack);
            if (slack < 0.0) {
                ++violations;
            }
        }
    }
    return {violations == 0,
            fmt("20 instances x 1000 competitors, %.0f violations, min slack %.3e", violations, tightest)};
}

// 5 ---------------------------------------------------------------------------
Outcome eckart_young() {
    Rng rng(5005);
    double worst = 0.0;
    std::size_t checks = 0;
    for (int instance = 0; instance < 100; ++instance) {
        const std::size_t rows = 1 + rng.index(8);
        const std::size_t cols = 1 + rng.index(6);
        CMatrix a = rng.matrix(rows, cols);
        if (instance % 4 == 3 && std::min(rows, cols) > 1) {
            const std::size_t r = 1 + rng.index(std::min(rows, cols) - 1);
            a = rng.matrix(rows, r) * rng.matrix(r, cols);
        }
        const auto sigma = reference_singular_values(a);
        std::size_t rank = 0;
        while (rank < sigma.size() && sigma[rank] > 1e-10 * std::max(sigma[0], 1.0)) {
            ++rank;
        }
        for (std::size_t n = 0; n <= rank; ++n) {
            const FitResult r = best_subspace(a, static_cast<int>(n));
            double tail = 0.0;
            for (std::size_t j = n; j < sigma.size(); ++j) {
                tail += sigma[j] * sigma[j];
            }
            std::vector<CVector> live;
            for (const auto& v : r.frame_vectors) {
                if (norm(v) > 0.0) {
                    live.push_back(v);
                }
            }
            const double measured = residual(a, live.empty() ? CMatrix(rows, 0) : CMatrix::from_columns(live));
            worst = std::max({worst, std::abs(measured - tail), std::abs(r.error - tail)});
            ++checks;
        }
    }
    return {worst <= 1e-10,
            fmt("%.0f (matrix, n) pairs, max |residual - tail| = %.3e", static_cast<double>(checks), worst)};
}

// 6 ---------------------------------------------------------------------------
Outcome uniqueness_orthonormality() {
    Rng rng(6006);
    double worst_gram = 0.0;
    double worst_perm = 0.0;
    bool flagged = true;
    for (int instance = 0; instance < 10; ++instance) {
        const GridSpec grid = instance % 2 == 0 ? GridSpec({40}, {8}) : GridSpec({6, 10}, {3, 2});
        const std::size_t q = grid.fiber_length();
        const std::size_t m = 3;
        const int n = 1 + instance % 2;
        // A(omega) = U diag(sqrt(lambda)) V^* with lambda = (6, 4, 2) + shift: gaps of 2.
        std::vector<CMatrix> fibers;
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            const double shift = rng.uniform(0.0, 1.0);
            const CMatrix u = random_unitary(rng, q);
            const CMatrix v = random_unitary(rng, m);
            CMatrix s(q, m);
            for (std::size_t i = 0; i < m; ++i) {
                s(i, i) = std::sqrt(6.0 - 2.0 * static_cast<double>(i) + shift);
            }
            fibers.push_back(u * s * v.adjoint());
        }
        const SignalSet data = signals_from_fibers(grid, fibers);
        const FitOutcome out = fit(data, n);
        const UniquenessReport report = uniqueness_check(out.profile, out.model);
        flagged = flagged && report.unique && report.orthonormal_translates.value_or(false);
        const double p = static_cast<double>(grid.fiber_count());
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            const CMatrix g = p * translate_gramian(out.model, w);
            worst_gram = std::max(worst_gram, max_abs_diff(g, CMatrix::identity(static_cast<std::size_t>(n))));
        }
        std::vector<CVector> permuted{data.signal(2), data.signal(0), data.signal(1)};
        const FitOutcome again = fit(SignalSet(grid, permuted), n);
        worst_perm = std::max(worst_perm, max_projector_difference(out.model, again.model));
    }
    return {flagged && worst_gram <= 1e-8 && worst_perm <= 1e-8,
            fmt("max |P G_Phi - I| = %.3e, permuted-refit projector gap %.3e", worst_gram, worst_perm) +
                (flagged ? ", all flagged unique" : ", uniqueness flag missing")};
}

// 7 ---------------------------------------------------------------------------
Outcome monotone_curve() {
    Rng rng(7007);
    bool monotone = true;
    double worst_tail = 0.0;
    const std::vector<GridSpec> grids{GridSpec({64}, {8}), GridSpec({12}, {12}), GridSpec({20}, {1}),
                                      GridSpec({6, 4}, {2, 2}), GridSpec({45}, {9})};
    std::size_t instances = 0;
    for (const auto& grid : grids) {
        for (int rep = 0; rep < 10; ++rep) {
            const std::size_t m = 1 + rng.index(6);
            std::vector<CVector> signals = rng.signals(m, grid.total());
            if (rep == 9) {
                signals.back().assign(grid.total(), Complex(0.0));
            }
            const SignalSet s = rep == 8 ? generated_data(rng, grid, 1, m, 0.0) : SignalSet(grid, signals);
            const ApproximationReport r = error_curve(s);
            for (std::size_t n = 1; n < r.curve.size(); ++n) {
                monotone = monotone && r.curve[n] <= r.curve[n - 1];
            }
            worst_tail = std::max(worst_tail, r.curve.back() / std::max(s.energy(), 1e-300));
            ++instances;
        }
    }
    return {monotone && worst_tail <= 1e-10,
            fmt("%.0f instances, max E(F,m) / energy = %.3e", static_cast<double>(instances), worst_tail) +
                (monotone ? ", curves non-increasing" : ", a curve increases")};
}

// 8 ---------------------------------------------------------------------------
Outcome weighted_equivalence() {
    Rng rng(8008);
    double worst_scaled = 0.0;
    double worst_oracle = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const GridSpec grid = instance % 2 == 0 ? GridSpec({32}, {8}) : GridSpec({6, 6}, {2, 3});
        const std::size_t m = 2 + rng.index(4);
        const int n = 1 + static_cast<int>(rng.index(m));
        const SignalSet s(grid, rng.signals(m, grid.total()));
        std::vector<double> w(m);
        for (auto& x : w) {
            x = std::exp(rng.uniform(-3.0, 3.0));
        }
        FitSettings settings;
        settings.weights = WeightVector(w);
        const FitOutcome weighted = fit(s, n, settings);

        std::vector<CVector> scaled = s.signals();
        for (std::size_t j = 0; j < m; ++j) {
            for (auto& x : scaled[j]) {
                x *= std::sqrt(w[j]);
            }
        }
        const FitOutcome plain = fit(SignalSet(grid, scaled), n);
        worst_scaled = std::max(worst_scaled, max_projector_difference(weighted.model, plain.model));

        // Independent oracle: top eigenvectors of D G D pulled back through A D.
        const FiberSet f = fiberize(s);
        for (std::size_t om = 0; om < grid.fiber_count(); ++om) {
            CMatrix d(m, m);
            for (std::size_t i = 0; i < m; ++i) {
                d(i, i) = std::sqrt(w[i]);
            }
            const CMatrix ad = f.fibers[om] * d;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(ad.adjoint() * ad));
            const auto k = static_cast<Eigen::Index>(std::min<std::size_t>(static_cast<std::size_t>(n), grid.fiber_length()));
            const CMatrix span = from_eigen(to_eigen(ad) * solver.eigenvectors().rightCols(k));
            const double diff = max_abs_diff(fiber_projector(weighted.model, om), reference_projector(span));
            worst_oracle = std::max(worst_oracle, diff);
        }
    }
    return {worst_scaled <= 1e-10 && worst_oracle <= 1e-10,
            fmt("max projector gap vs scaled-data fit %.3e, vs D G D oracle %.3e", worst_scaled, worst_oracle)};
}

// 9 ---------------------------------------------------------------------------
Outcome transform_layer() {
    Rng rng(9009);
    const std::vector<GridSpec> grids{
        GridSpec({1}, {1}),        GridSpec({2}, {2}),         GridSpec({7}, {1}),         GridSpec({12}, {4}),
        GridSpec({30}, {6}),       GridSpec({64}, {8}),        GridSpec({90}, {9}),        GridSpec({97}, {1}),
        GridSpec({120}, {10}),     GridSpec({210}, {14}),      GridSpec({243}, {27}),      GridSpec({360}, {12}),
        GridSpec({360}, {360}),    GridSpec({12, 30}, {4, 5}), GridSpec({6, 6, 10}, {3, 2, 5})};
    double parseval = 0.0;
    double round_trip = 0.0;
    double naive = 0.0;
    for (const auto& grid : grids) {
        for (int rep = 0; rep < 3; ++rep) {
            const CVector x = rng.vector(grid.total());
            const CVector xhat = unitary_dft(x, grid);
            parseval = std::max(parseval, std::abs(norm_sq(xhat) - norm_sq(x)) / norm_sq(x));
            round_trip = std::max(round_trip, max_abs_diff(inverse_dft(xhat, grid), x));
            round_trip = std::max(round_trip, max_abs_diff(defiberize(fiberize(x, grid), grid), x));
            naive = std::max(naive, max_abs_diff(xhat, naive_dft(x, grid)));
        }
    }
    return {parseval <= 1e-12 && round_trip <= 1e-12 && naive <= 1e-12,
            fmt("relative Parseval defect %.3e, round-trip %.3e, naive-DFT gap %.3e", parseval, round_trip, naive)};
}

// 10 --------------------------------------------------------------------------
Outcome spectral_core_identities() {
    Rng rng(10010);
    double recon = 0.0;
    double unitary = 0.0;
    double trace = 0.0;
    double frob = 0.0;
    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t n = 1 + static_cast<std::size_t>(instance % 8);
        CMatrix h = rng.hermitian(n);
        if (instance % 10 == 9) {
            // Repeated eigenvalues and a null space.
            const CMatrix u = random_unitary(rng, n);
            CMatrix d(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                d(i, i) = static_cast<double>(i / 2);
            }
            h = u * d * u.adjoint();
        }
        const auto e = eigh_descending(HermitianMatrix(h));
        const double hf = std::max(frobenius(h), 1e-300);
        CMatrix scaled = e.eigenvectors;
        for (std::size_t c = 0; c < n; ++c) {
            for (auto& x : scaled.col(c)) {
                x *= e.eigenvalues[c];
            }
        }
        recon = std::max(recon, frobenius(scaled * e.eigenvectors.adjoint() - h) / hf);
        unitary = std::max(unitary, max_abs_diff(e.eigenvectors.adjoint() * e.eigenvectors, CMatrix::identity(n)));
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            tr += h(i, i).real();
        }
        const double sum = std::accumulate(e.eigenvalues.begin(), e.eigenvalues.end(), 0.0);
        double sum_sq = 0.0;
        for (double l : e.eigenvalues) {
            sum_sq += l * l;
        }
        trace = std::max(trace, std::abs(sum - tr) / hf);
        frob = std::max(frob, std::abs(sum_sq - hf * hf) / (hf * hf));
    }
    return {recon <= 1e-10 && unitary <= 1e-10 && trace <= 1e-10 && frob <= 1e-10,
            fmt("reconstruction %.3e, unitarity %.3e, ", recon, unitary) +
                fmt("trace %.3e, Frobenius %.3e (relative)", trace, frob)};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        double time_limit; // seconds, <= 0 for none
    };
    const std::vector<Criterion> criteria{
        {1, "orthonormal pair, n = 1", orthonormal_pair_example, 0.1},
        {2, "error formula equals direct error", formula_vs_direct, 5.0},
        {3, "translates form a Parseval frame", parseval_property, 0.0},
        {4, "optimality against random competitors", optimality, 0.0},
        {5, "Eckart-Young residual", eckart_young, 0.0},
        {6, "uniqueness and orthonormal translates", uniqueness_orthonormality, 0.0},
        {7, "monotone error curve, E(F,m) = 0", monotone_curve, 0.0},
        {8, "weighted fit equivalence", weighted_equivalence, 0.0},
        {9, "transform layer identities", transform_layer, 0.0},
        {10, "spectral core identities", spectral_core_identities, 0.0},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, "threw"};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool timed_ok = c.time_limit <= 0.0 || seconds < c.time_limit;
        const bool pass = o.pass && timed_ok;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %2d  %-40s %s; %.3f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    seconds, timed_ok ? "" : fmt(" (limit %.1f s)", c.time_limit).c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

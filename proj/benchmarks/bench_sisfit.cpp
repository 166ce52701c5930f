#include "sisfit/fiber_transform.hpp"
#include "sisfit/sis_model.hpp"
#include "sisfit/spectral_core.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

sisfit::CVector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    sisfit::CVector v(n);
    for (auto& x : v) {
        x = {normal(rng), normal(rng)};
    }
    return v;
}

void BM_UnitaryDft(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const sisfit::GridSpec grid({n}, {1});
    std::mt19937_64 rng(1);
    const auto x = random_vector(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sisfit::unitary_dft(x, grid));
    }
}
BENCHMARK(BM_UnitaryDft)->Arg(64)->Arg(360)->Arg(1024)->Arg(1009)->Arg(4096);

void BM_EighDescending(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    sisfit::CMatrix a(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        const auto col = random_vector(n, rng);
        std::copy(col.begin(), col.end(), a.col(c).begin());
    }
    const sisfit::HermitianMatrix h(a.adjoint() * a);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sisfit::eigh_descending(h));
    }
}
BENCHMARK(BM_EighDescending)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_Fit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = static_cast<std::size_t>(state.range(1));
    const sisfit::GridSpec grid({n}, {p});
    std::mt19937_64 rng(3);
    std::vector<sisfit::CVector> signals;
    for (int j = 0; j < 6; ++j) {
        signals.push_back(random_vector(n, rng));
    }
    const sisfit::SignalSet data(grid, signals);
    sisfit::FitSettings settings;
    settings.parseval_trials = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sisfit::fit(data, 3, settings));
    }
}
BENCHMARK(BM_Fit)->Args({64, 8})->Args({512, 16})->Args({4096, 64});

} // namespace

BENCHMARK_MAIN();

#include "sisfit/fiber_transform.hpp"

#include "sisfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sisfit {

namespace {

std::vector<std::size_t> prime_factors(std::size_t n) {
    std::vector<std::size_t> out;
    for (std::size_t p = 2; p * p <= n; ++p) {
        while (n % p == 0) {
            out.push_back(p);
            n /= p;
        }
    }
    if (n > 1) {
        out.push_back(n);
    }
    return out;
}

// Unnormalized 1-D DFT of one fixed length, decimation in time.
class Plan1d {
public:
    explicit Plan1d(std::size_t n) : n_(n), factors_(prime_factors(n)), roots_(n) {
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n);
            roots_[t] = {std::cos(angle), std::sin(angle)};
        }
        scratch_.resize(factors_.empty() ? 1 : *std::max_element(factors_.begin(), factors_.end()));
    }

    void execute(const Complex* in, Complex* out, bool inverse) {
        inverse_ = inverse;
        recurse(in, 1, out, n_, 0);
    }

private:
    void recurse(const Complex* in, std::size_t stride, Complex* out, std::size_t len, std::size_t level) {
        if (len == 1) {
            out[0] = in[0];
            return;
        }
        const std::size_t radix = factors_[level];
        const std::size_t sub = len / radix;
        for (std::size_t r = 0; r < radix; ++r) {
            recurse(in + r * stride, stride * radix, out + r * sub, sub, level + 1);
        }
        const std::size_t step = n_ / len;
        for (std::size_t k = 0; k < sub; ++k) {
            for (std::size_t r = 0; r < radix; ++r) {
                scratch_[r] = out[r * sub + k];
            }
            for (std::size_t s = 0; s < radix; ++s) {
                const std::size_t bin = k + s * sub;
                Complex acc = scratch_[0];
                for (std::size_t r = 1; r < radix; ++r) {
                    const Complex w = roots_[((r * bin) % len) * step];
                    acc += scratch_[r] * (inverse_ ? std::conj(w) : w);
                }
                out[bin] = acc;
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> factors_;
    std::vector<Complex> roots_;
    std::vector<Complex> scratch_;
    bool inverse_ = false;
};

CVector transform(std::span<const Complex> input, const GridSpec& grid, bool inverse, const char* name) {
    if (input.size() != grid.total()) {
        throw InputError(std::string(name) + ": expected " + std::to_string(grid.total()) + " samples, got " +
                         std::to_string(input.size()));
    }
    CVector data(input.begin(), input.end());
    std::size_t inner_stride = grid.total();
    std::size_t outer = 1;
    CVector line_in;
    CVector line_out;
    for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
        const std::size_t len = grid.axes()[axis];
        inner_stride /= len;
        if (len > 1) {
            Plan1d plan(len);
            line_in.resize(len);
            line_out.resize(len);
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t a = 0; a < inner_stride; ++a) {
                    const std::size_t base = o * len * inner_stride + a;
                    for (std::size_t i = 0; i < len; ++i) {
                        line_in[i] = data[base + i * inner_stride];
                    }
                    plan.execute(line_in.data(), line_out.data(), inverse);
                    for (std::size_t i = 0; i < len; ++i) {
                        data[base + i * inner_stride] = line_out[i];
                    }
                }
            }
        }
        outer *= len;
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.total()));
    for (auto& v : data) {
        v *= scale;
    }
    return data;
}

} // namespace

GridSpec::GridSpec(std::vector<std::size_t> axes, std::vector<std::size_t> phases)
    : axes_(std::move(axes)), phases_(std::move(phases)) {
    if (axes_.empty()) {
        throw InputError("GridSpec: at least one axis is required");
    }
    if (axes_.size() != phases_.size()) {
        throw InputError("GridSpec: " + std::to_string(axes_.size()) + " axis sizes but " +
                         std::to_string(phases_.size()) + " phase counts");
    }
    total_ = 1;
    fiber_count_ = 1;
    fiber_length_ = 1;
    fiber_axes_.resize(axes_.size());
    for (std::size_t j = 0; j < axes_.size(); ++j) {
        if (axes_[j] == 0 || phases_[j] == 0) {
            throw InputError("GridSpec: axis " + std::to_string(j) + " has a zero size or phase count");
        }
        if (axes_[j] % phases_[j] != 0) {
            throw InputError("GridSpec: phase count " + std::to_string(phases_[j]) + " does not divide axis size " +
                             std::to_string(axes_[j]) + " on axis " + std::to_string(j));
        }
        fiber_axes_[j] = axes_[j] / phases_[j];
        total_ *= axes_[j];
        fiber_count_ *= phases_[j];
        fiber_length_ *= fiber_axes_[j];
    }
}

std::size_t GridSpec::frequency_index(std::size_t omega, std::size_t k) const noexcept {
    std::size_t flat = 0;
    std::size_t omega_rest = omega;
    std::size_t k_rest = k;
    std::size_t weight = 1;
    for (std::size_t j = dims(); j-- > 0;) {
        const std::size_t w = omega_rest % phases_[j];
        const std::size_t kk = k_rest % fiber_axes_[j];
        omega_rest /= phases_[j];
        k_rest /= fiber_axes_[j];
        flat += (w + kk * phases_[j]) * weight;
        weight *= axes_[j];
    }
    return flat;
}

std::size_t GridSpec::translate_index(std::size_t index, std::size_t shift) const noexcept {
    std::size_t flat = 0;
    std::size_t rest = index;
    std::size_t shift_rest = shift;
    std::size_t weight = 1;
    for (std::size_t j = dims(); j-- > 0;) {
        const std::size_t x = rest % axes_[j];
        const std::size_t s = shift_rest % phases_[j];
        rest /= axes_[j];
        shift_rest /= phases_[j];
        flat += ((x + s * fiber_axes_[j]) % axes_[j]) * weight;
        weight *= axes_[j];
    }
    return flat;
}

SignalSet::SignalSet(GridSpec grid, std::vector<CVector> samples) : grid_(std::move(grid)), samples_(std::move(samples)) {
    for (std::size_t j = 0; j < samples_.size(); ++j) {
        if (samples_[j].size() != grid_.total()) {
            throw InputError("SignalSet: signal " + std::to_string(j) + " has " + std::to_string(samples_[j].size()) +
                             " samples, grid has " + std::to_string(grid_.total()));
        }
        if (!all_finite(samples_[j])) {
            throw InputError("SignalSet: signal " + std::to_string(j) + " has a non-finite sample");
        }
    }
}

double SignalSet::energy() const {
    double e = 0.0;
    for (const auto& s : samples_) {
        e += norm_sq(s);
    }
    return e;
}

double FiberSet::energy() const {
    double e = 0.0;
    for (const auto& a : fibers) {
        e += frobenius_sq(a);
    }
    return e;
}

CVector unitary_dft(std::span<const Complex> signal, const GridSpec& grid) {
    return transform(signal, grid, false, "unitary_dft");
}

CVector inverse_dft(std::span<const Complex> spectrum, const GridSpec& grid) {
    return transform(spectrum, grid, true, "inverse_dft");
}

std::vector<CVector> fiberize(std::span<const Complex> signal, const GridSpec& grid) {
    const CVector spectrum = unitary_dft(signal, grid);
    std::vector<CVector> out(grid.fiber_count(), CVector(grid.fiber_length()));
    for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
        for (std::size_t k = 0; k < grid.fiber_length(); ++k) {
            out[w][k] = spectrum[grid.frequency_index(w, k)];
        }
    }
    return out;
}

FiberSet fiberize(const SignalSet& signals) {
    const GridSpec& grid = signals.grid();
    FiberSet out{grid, signals.count(), {}};
    out.fibers.assign(grid.fiber_count(), CMatrix(grid.fiber_length(), signals.count()));
    for (std::size_t j = 0; j < signals.count(); ++j) {
        const CVector spectrum = unitary_dft(signals.signal(j), grid);
        for (std::size_t w = 0; w < grid.fiber_count(); ++w) {
            for (std::size_t k = 0; k < grid.fiber_length(); ++k) {
                out.fibers[w](k, j) = spectrum[grid.frequency_index(w, k)];
            }
        }
    }
    return out;
}

CVector defiberize(std::span<const CVector> fibers, const GridSpec& grid) {
    if (fibers.size() != grid.fiber_count()) {
        throw InputError("defiberize: expected " + std::to_string(grid.fiber_count()) + " fibers, got " +
                         std::to_string(fibers.size()));
    }
    CVector spectrum(grid.total());
    for (std::size_t w = 0; w < fibers.size(); ++w) {
        if (fibers[w].size() != grid.fiber_length()) {
            throw InputError("defiberize: fiber " + std::to_string(w) + " has length " +
                             std::to_string(fibers[w].size()) + ", expected " + std::to_string(grid.fiber_length()));
        }
        for (std::size_t k = 0; k < grid.fiber_length(); ++k) {
            spectrum[grid.frequency_index(w, k)] = fibers[w][k];
        }
    }
    return inverse_dft(spectrum, grid);
}

CVector lattice_shift(std::span<const Complex> signal, const GridSpec& grid, std::size_t shift) {
    if (signal.size() != grid.total()) {
        throw InputError("lattice_shift: signal length does not match the grid");
    }
    if (shift >= grid.fiber_count()) {
        throw InputError("lattice_shift: shift index out of range");
    }
    CVector out(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        out[grid.translate_index(i, shift)] = signal[i];
    }
    return out;
}

} // namespace sisfit

#pragma once

#include "sisfit/dense.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sisfit {

/// A d-dimensional periodic sampling grid together with its shift lattice.
///
/// Axis j has `axes[j]` samples and the lattice steps by Q_j = axes[j] / phases[j]
/// samples along it, so there are P = prod(phases) distinct lattice translates
/// and every fiber has Q = prod(Q_j) entries. Multi-indices are flattened
/// row-major (axis 0 slowest).
class GridSpec {
public:
    /// Throws InputError unless both lists are non-empty, of equal length,
    /// strictly positive, and phases[j] divides axes[j].
    GridSpec(std::vector<std::size_t> axes, std::vector<std::size_t> phases);

    [[nodiscard]] std::size_t dims() const noexcept { return axes_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& axes() const noexcept { return axes_; }
    [[nodiscard]] const std::vector<std::size_t>& phases() const noexcept { return phases_; }
    [[nodiscard]] const std::vector<std::size_t>& fiber_axes() const noexcept { return fiber_axes_; }

    [[nodiscard]] std::size_t total() const noexcept { return total_; }            ///< N
    [[nodiscard]] std::size_t fiber_count() const noexcept { return fiber_count_; } ///< P
    [[nodiscard]] std::size_t fiber_length() const noexcept { return fiber_length_; } ///< Q

    /// Flat frequency index of entry k of fiber omega (both flat, row-major).
    [[nodiscard]] std::size_t frequency_index(std::size_t omega, std::size_t k) const noexcept;

    /// Flat index of the lattice translate of sample `index` by lattice
    /// point `shift` (flat index into prod(phases)), with periodic wrap.
    [[nodiscard]] std::size_t translate_index(std::size_t index, std::size_t shift) const noexcept;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    std::vector<std::size_t> axes_;
    std::vector<std::size_t> phases_;
    std::vector<std::size_t> fiber_axes_;
    std::size_t total_ = 0;
    std::size_t fiber_count_ = 0;
    std::size_t fiber_length_ = 0;
};

/// m sampled signals on a shared grid.
class SignalSet {
public:
    /// Throws InputError if any signal has the wrong length or a non-finite sample.
    SignalSet(GridSpec grid, std::vector<CVector> samples);

    [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t count() const noexcept { return samples_.size(); }
    [[nodiscard]] const CVector& signal(std::size_t j) const { return samples_.at(j); }
    [[nodiscard]] const std::vector<CVector>& signals() const noexcept { return samples_; }
    [[nodiscard]] double energy() const;

private:
    GridSpec grid_;
    std::vector<CVector> samples_;
};

/// For each fiber index omega, the Q x m matrix whose column j is the fiber
/// of the spectrum of signal j at omega.
struct FiberSet {
    GridSpec grid;
    std::size_t signal_count = 0;
    std::vector<CMatrix> fibers; ///< size P

    [[nodiscard]] double energy() const;
};

/// Forward DFT over all axes with unitary scaling N^{-1/2} and kernel
/// exp(-2 pi i <x, xi> / N). Mixed-radix Cooley-Tukey; prime factors are
/// combined by direct summation.
CVector unitary_dft(std::span<const Complex> signal, const GridSpec& grid);
CVector inverse_dft(std::span<const Complex> spectrum, const GridSpec& grid);

/// Fiber matrices of every signal.
FiberSet fiberize(const SignalSet& signals);

/// Fibers of a single signal: P vectors of length Q.
std::vector<CVector> fiberize(std::span<const Complex> signal, const GridSpec& grid);

/// Scatters per-fiber vectors back into a spectrum and inverts the DFT.
/// Throws InputError unless there are exactly P fibers of length Q.
CVector defiberize(std::span<const CVector> fibers, const GridSpec& grid);

/// Circular translate of a signal by a lattice point (flat index into prod(phases)),
/// i.e. g(x) = f(x - shift * Q) with periodic wrap.
CVector lattice_shift(std::span<const Complex> signal, const GridSpec& grid, std::size_t shift);

} // namespace sisfit

#include "sisfit/spectral_core.hpp"

#include "sisfit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sisfit {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-14;
constexpr double kCompletionTolerance = 1e-8;
constexpr double kPhaseTieTolerance = 1e-12;

double off_diagonal_norm(const CMatrix& a) {
    double acc = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r != c) {
                acc += std::norm(a(r, c));
            }
        }
    }
    return std::sqrt(acc);
}

// Zeroes a(p,q) with the unitary U = diag(1, conj(phase)) * [[c, s], [-s, c]],
// applied as A <- U^* A U and V <- V U.
void rotate(CMatrix& a, CMatrix& v, std::size_t p, std::size_t q) {
    const Complex apq = a(p, q);
    const double mag = std::abs(apq);
    const Complex phase = apq / mag;
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * mag);
    double t = 0.0;
    if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
    } else {
        t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    }
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;
    const Complex d = std::conj(phase);

    const Complex u_pp = c;
    const Complex u_pq = s;
    const Complex u_qp = -s * d;
    const Complex u_qq = c * d;

    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * u_pp + akq * u_qp;
        a(k, q) = akp * u_pq + akq * u_qq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
        a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = app - t * mag;
    a(q, q) = aqq + t * mag;

    for (std::size_t k = 0; k < n; ++k) {
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * u_pp + vkq * u_qp;
        v(k, q) = vkp * u_pq + vkq * u_qq;
    }
}

void jacobi(CMatrix& a, CMatrix& v) {
    const double scale = frobenius(a);
    if (scale == 0.0) {
        return;
    }
    const std::size_t n = a.rows();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= kOffDiagonalTolerance * scale) {
            return;
        }
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag == 0.0) {
                    continue;
                }
                // Once converging, an entry that cannot change either diagonal
                // value is dropped outright.
                const double app = std::abs(a(p, p).real());
                const double aqq = std::abs(a(q, q).real());
                if (sweep > 3 && app + 100.0 * mag == app && aqq + 100.0 * mag == aqq) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
                rotated = true;
            }
        }
        if (!rotated) {
            return;
        }
    }
    if (off_diagonal_norm(a) > kOffDiagonalTolerance * scale) {
        throw NumericalError("eigh_descending: Jacobi iteration did not converge in " +
                             std::to_string(kMaxSweeps) + " sweeps");
    }
}

// Replaces the columns [first, last) of v (an orthonormal basis of one
// eigenspace) by the Gram-Schmidt orthonormalization of the projections of
// e_0, e_1, ... onto that eigenspace.
void canonicalize_block(CMatrix& v, std::size_t first, std::size_t last) {
    const std::size_t dim = v.rows();
    const std::size_t want = last - first;
    std::vector<CVector> chosen;
    for (std::size_t j = 0; j < dim && chosen.size() < want; ++j) {
        CVector w(dim, 0.0);
        for (std::size_t c = first; c < last; ++c) {
            axpy(std::conj(v(j, c)), v.col(c), w);
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : chosen) {
                axpy(-inner(w, e), e, w);
            }
        }
        const double len = norm(w);
        if (len <= kCompletionTolerance) {
            continue;
        }
        for (auto& x : w) {
            x /= len;
        }
        chosen.push_back(std::move(w));
    }
    if (chosen.size() != want) {
        throw NumericalError("eigh_descending: could not canonicalize a degenerate eigenspace");
    }
    for (std::size_t i = 0; i < want; ++i) {
        std::copy(chosen[i].begin(), chosen[i].end(), v.col(first + i).begin());
    }
}

void fix_phase(std::span<Complex> vec) {
    std::size_t best = 0;
    double best_mod = std::abs(vec[0]);
    for (std::size_t i = 1; i < vec.size(); ++i) {
        const double m = std::abs(vec[i]);
        if (m > best_mod * (1.0 + kPhaseTieTolerance)) {
            best = i;
            best_mod = m;
        }
    }
    if (best_mod == 0.0) {
        return;
    }
    const Complex rot = std::conj(vec[best]) / best_mod;
    for (auto& x : vec) {
        x *= rot;
    }
    vec[best] = best_mod;
}

} // namespace

HermitianMatrix::HermitianMatrix(CMatrix entries) : entries_(std::move(entries)) {
    const std::size_t n = entries_.rows();
    if (n == 0 || entries_.cols() != n) {
        throw InputError("HermitianMatrix: expected a non-empty square matrix");
    }
    if (!all_finite(entries_.data())) {
        throw InputError("HermitianMatrix: non-finite entry");
    }
    const double tol = kHermitianTolerance * frobenius(entries_);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t r = c; r < n; ++r) {
            const Complex lo = entries_(r, c);
            const Complex hi = std::conj(entries_(c, r));
            if (std::abs(lo - hi) > tol) {
                throw InputError("HermitianMatrix: entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                 ") differs from the conjugate of its transpose");
            }
            const Complex avg = 0.5 * (lo + hi);
            if (r == c) {
                entries_(r, c) = avg.real();
            } else {
                entries_(r, c) = avg;
                entries_(c, r) = std::conj(avg);
            }
        }
    }
}

EigenDecomposition eigh_descending(const HermitianMatrix& h) {
    const std::size_t n = h.dim();
    CMatrix a = h.entries();
    CMatrix v = CMatrix::identity(n);
    jacobi(a, v);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.eigenvalues[i] = a(order[i], order[i]).real();
        std::copy(v.col(order[i]).begin(), v.col(order[i]).end(), out.eigenvectors.col(i).begin());
    }

    double lambda_max = 0.0;
    for (double l : out.eigenvalues) {
        lambda_max = std::max(lambda_max, std::abs(l));
    }
    for (double& l : out.eigenvalues) {
        if (l < 0.0 && l >= -kEigenTieTolerance * lambda_max) {
            l = 0.0;
        }
    }

    const double tie = kEigenTieTolerance * lambda_max;
    std::size_t first = 0;
    while (first < n) {
        std::size_t last = first + 1;
        while (last < n && out.eigenvalues[last - 1] - out.eigenvalues[last] <= tie) {
            ++last;
        }
        if (last - first > 1) {
            canonicalize_block(out.eigenvectors, first, last);
        }
        first = last;
    }
    for (std::size_t i = 0; i < n; ++i) {
        fix_phase(out.eigenvectors.col(i));
    }
    return out;
}

SvdResult svd(const CMatrix& a, double rank_tolerance) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (rows == 0 || cols == 0) {
        throw InputError("svd: empty matrix");
    }
    if (!all_finite(a.data())) {
        throw InputError("svd: non-finite entry");
    }

    CMatrix gram(cols, cols);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i <= j; ++i) {
            const Complex g = inner(a.col(j), a.col(i));
            gram(i, j) = g;
            gram(j, i) = std::conj(g);
        }
        gram(j, j) = gram(j, j).real();
    }
    const EigenDecomposition eig = eigh_descending(HermitianMatrix(std::move(gram)));

    SvdResult out;
    out.right_vectors = eig.eigenvectors;
    out.singular_values.resize(cols);
    std::vector<CVector> images(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        CVector ay(rows, 0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            axpy(eig.eigenvectors(j, k), a.col(j), ay);
        }
        // ||A y_k|| equals sqrt(lambda_k) but keeps absolute accuracy near zero.
        double sigma = norm(ay);
        if (k > 0) {
            sigma = std::min(sigma, out.singular_values[k - 1]);
        }
        out.singular_values[k] = sigma;
        images[k] = std::move(ay);
    }

    const double cut = rank_tolerance * std::max(out.singular_values.front(), 1.0);
    out.rank = 0;
    while (out.rank < cols && out.singular_values[out.rank] > cut) {
        ++out.rank;
    }

    const std::size_t width = std::min(rows, cols);
    std::vector<CVector> left;
    left.reserve(width);
    for (std::size_t k = 0; k < out.rank && left.size() < width; ++k) {
        CVector u = std::move(images[k]);
        for (auto& x : u) {
            x /= out.singular_values[k];
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : left) {
                axpy(-inner(u, e), e, u);
            }
        }
        const double len = norm(u);
        for (auto& x : u) {
            x /= len;
        }
        left.push_back(std::move(u));
    }
    for (std::size_t j = 0; j < rows && left.size() < width; ++j) {
        CVector e(rows, 0.0);
        e[j] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : left) {
                axpy(-inner(e, b), b, e);
            }
        }
        const double len = norm(e);
        if (len <= kCompletionTolerance) {
            continue;
        }
        for (auto& x : e) {
            x /= len;
        }
        left.push_back(std::move(e));
    }
    out.left_vectors = CMatrix::from_columns(left);
    return out;
}

} // namespace sisfit

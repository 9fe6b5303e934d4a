#ifndef GTQW_LINALG_HPP
#define GTQW_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "gtqw/error.hpp"

namespace gtqw {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Which exponential to apply: exp(-i t H) for unitary evolution, or
/// exp(t M) for a real semigroup (classical rate matrices).
enum class PhaseSign { kMinusI, kPlusOne };

struct SymTridiagonal {
    std::vector<double> diagonal;
    std::vector<double> off_diagonal;

    std::size_t size() const { return diagonal.size(); }

    void validate() const {
        if (diagonal.empty()) {
            throw ParameterError("tridiagonal matrix must have at least one row");
        }
        if (off_diagonal.size() + 1 != diagonal.size()) {
            throw ParameterError("off-diagonal length must be one less than the diagonal length");
        }
        const auto finite = [](double x) { return std::isfinite(x); };
        if (!std::all_of(diagonal.begin(), diagonal.end(), finite) ||
            !std::all_of(off_diagonal.begin(), off_diagonal.end(), finite)) {
            throw ParameterError("tridiagonal matrix has non-finite entries");
        }
    }
};

/// Real symmetric matrix in compressed-row form. Rows keep their column
/// indices sorted; diagonal entries are ordinary entries with col == row.
class SparseSymmetric {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseSymmetric() = default;

    /// Builds from entries of the upper or lower triangle (each off-diagonal
    /// pair given once); the mirror entry is added automatically and
    /// duplicates are summed.
    static SparseSymmetric from_half_entries(std::size_t dim, std::span<const Entry> entries) {
        std::vector<Entry> full;
        full.reserve(entries.size() * 2);
        for (const auto& e : entries) {
            if (e.row >= dim || e.col >= dim) {
                throw ParameterError("sparse entry outside matrix dimension");
            }
            full.push_back(e);
            if (e.row != e.col) {
                full.push_back({e.col, e.row, e.value});
            }
        }
        std::sort(full.begin(), full.end(),
                  [](const Entry& a, const Entry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });

        SparseSymmetric m;
        m.dim_ = dim;
        m.row_offsets_.assign(dim + 1, 0);
        for (std::size_t k = 0; k < full.size(); ++k) {
            if (!m.col_indices_.empty() && k > 0 && full[k].row == full[k - 1].row &&
                full[k].col == full[k - 1].col) {
                m.values_.back() += full[k].value;
                continue;
            }
            m.col_indices_.push_back(full[k].col);
            m.values_.push_back(full[k].value);
            ++m.row_offsets_[full[k].row + 1];
        }
        std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
        return m;
    }

    std::size_t dimension() const { return dim_; }
    std::size_t nonzeros() const { return values_.size(); }
    std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    std::span<const std::size_t> col_indices() const { return col_indices_; }
    std::span<const double> values() const { return values_; }

    /// out = A * in
    template <typename T>
    void apply(std::span<const T> in, std::span<T> out) const {
        for (std::size_t i = 0; i < dim_; ++i) {
            T acc{};
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                acc += values_[k] * in[col_indices_[k]];
            }
            out[i] = acc;
        }
    }

    /// Maximum absolute row sum; an upper bound on the 2-norm.
    double norm_bound() const {
        double best = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                s += std::abs(values_[k]);
            }
            best = std::max(best, s);
        }
        return best;
    }

    double at(std::size_t i, std::size_t j) const {
        const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
        const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
        const auto it = std::lower_bound(first, last, j);
        return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - col_indices_.begin())] : 0.0;
    }

    bool is_symmetric() const {
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                if (at(col_indices_[k], i) != values_[k]) {
                    return false;
                }
            }
        }
        return true;
    }

    /// Row-major dense copy, for small instances only.
    std::vector<double> to_dense() const {
        std::vector<double> d(dim_ * dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
                d[i * dim_ + col_indices_[k]] = values_[k];
            }
        }
        return d;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
struct EigenSystem {
    std::vector<double> eigenvalues;
    std::vector<double> vectors;  // column k (eigenvector k) stored contiguously

    std::size_t size() const { return eigenvalues.size(); }
    double component(std::size_t row, std::size_t k) const { return vectors[k * size() + row]; }
    std::span<const double> vector(std::size_t k) const { return {vectors.data() + k * size(), size()}; }
};

/// Implicit-shift QL on a symmetric tridiagonal matrix with eigenvector
/// accumulation. Total iterations are capped at 30*m.
inline EigenSystem eigh_tridiagonal(const SymTridiagonal& h) {
    h.validate();
    const std::size_t m = h.size();
    std::vector<double> d = h.diagonal;
    std::vector<double> e(m, 0.0);
    std::copy(h.off_diagonal.begin(), h.off_diagonal.end(), e.begin());

    // z[i][k] stored as z[k*m + i] so each eigenvector is contiguous.
    std::vector<double> z(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        z[i * m + i] = 1.0;
    }

    const std::size_t budget = 30 * m;
    std::size_t iterations = 0;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (std::size_t l = 0; l < m; ++l) {
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < m; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) {
                    break;
                }
            }
            if (mm == l) {
                break;
            }
            if (++iterations > budget) {
                throw NumericalError("tridiagonal eigensolver did not converge within " + std::to_string(budget) +
                                     " iterations (stuck at row " + std::to_string(l) +
                                     ", residual off-diagonal " + std::to_string(std::abs(e[l])) + ")");
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t ii = mm; ii-- > l;) {
                const double f = s * e[ii];
                const double b = c * e[ii];
                r = std::hypot(f, g);
                e[ii + 1] = r;
                if (r == 0.0) {
                    d[ii + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[ii + 1] - p;
                r = (d[ii] - g) * s + 2.0 * c * b;
                p = s * r;
                d[ii + 1] = g + p;
                g = c * r - b;
                double* zi = &z[ii * m];
                double* zi1 = &z[(ii + 1) * m];
                for (std::size_t k = 0; k < m; ++k) {
                    const double t = zi1[k];
                    zi1[k] = s * zi[k] + c * t;
                    zi[k] = c * zi[k] - s * t;
                }
            }
            if (underflow) {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        } while (mm != l);
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    EigenSystem out;
    out.eigenvalues.resize(m);
    out.vectors.resize(m * m);
    for (std::size_t k = 0; k < m; ++k) {
        out.eigenvalues[k] = d[order[k]];
        std::copy_n(&z[order[k] * m], m, &out.vectors[k * m]);
    }
    return out;
}

namespace detail {

inline cplx exp_factor(PhaseSign sign, double lambda, double t) {
    return sign == PhaseSign::kMinusI ? std::polar(1.0, -lambda * t) : cplx(std::exp(lambda * t), 0.0);
}

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (const auto& x : v) {
        s += std::norm(x);
    }
    return std::sqrt(s);
}

}  // namespace detail

/// V exp(sign * Lambda * t) V^T v.
inline CVector expm_action_eigen(const EigenSystem& es, PhaseSign sign, double t, std::span<const cplx> v) {
    const std::size_t m = es.size();
    if (v.size() != m) {
        throw ParameterError("vector length " + std::to_string(v.size()) + " does not match matrix dimension " +
                             std::to_string(m));
    }
    if (t == 0.0) {
        return CVector(v.begin(), v.end());
    }
    CVector out(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const auto vk = es.vector(k);
        cplx coeff = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            coeff += vk[i] * v[i];
        }
        coeff *= detail::exp_factor(sign, es.eigenvalues[k], t);
        for (std::size_t i = 0; i < m; ++i) {
            out[i] += vk[i] * coeff;
        }
    }
    return out;
}

struct KrylovOptions {
    double tol = 1e-10;
    std::size_t subspace_dim = 30;
    std::size_t max_steps = 100000;
};

/// exp(sign * t * A) v by Lanczos with adaptive time stepping. The local
/// error estimate beta_m |e_m^T exp(sign h T) e_1| is held below
/// tol * |v| * h / t on every accepted step.
inline CVector expm_action_krylov(const SparseSymmetric& A, PhaseSign sign, double t, std::span<const cplx> v,
                                  const KrylovOptions& opts = {}) {
    const std::size_t N = A.dimension();
    if (v.size() != N) {
        throw ParameterError("vector length " + std::to_string(v.size()) + " does not match operator dimension " +
                             std::to_string(N));
    }
    if (!(opts.tol > 0.0)) {
        throw ParameterError("Krylov tolerance must be positive");
    }
    if (opts.subspace_dim < 1) {
        throw ParameterError("Krylov subspace dimension must be positive");
    }
    if (!std::isfinite(t)) {
        throw ParameterError("evolution time must be finite");
    }
    CVector w(v.begin(), v.end());
    const double beta0 = detail::norm2(v);
    if (t == 0.0 || beta0 == 0.0) {
        return w;
    }

    const double anorm = std::max(A.norm_bound(), std::numeric_limits<double>::min());
    const std::size_t mmax = std::min(opts.subspace_dim, N);
    const double total = std::abs(t);
    const double direction = t > 0 ? 1.0 : -1.0;

    std::vector<CVector> basis(mmax + 1, CVector(N));
    CVector u(N);
    double done = 0.0;
    double h = total;
    std::size_t steps = 0;

    while (done < total) {
        if (++steps > opts.max_steps) {
            throw NumericalError("Krylov exponential exceeded " + std::to_string(opts.max_steps) +
                                 " steps at time " + std::to_string(done) + " of " + std::to_string(total));
        }
        const double wnorm = detail::norm2(w);
        if (wnorm == 0.0) {
            break;
        }
        for (std::size_t i = 0; i < N; ++i) {
            basis[0][i] = w[i] / wnorm;
        }

        // Lanczos with full reorthogonalization.
        std::vector<double> alpha, beta;
        bool happy = false;
        std::size_t dim = 0;
        for (std::size_t k = 0; k < mmax; ++k) {
            A.apply<cplx>(basis[k], u);
            cplx a = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                a += std::conj(basis[k][i]) * u[i];
            }
            alpha.push_back(a.real());
            for (int pass = 0; pass < 2; ++pass) {
                for (std::size_t j = 0; j <= k; ++j) {
                    cplx proj = 0.0;
                    for (std::size_t i = 0; i < N; ++i) {
                        proj += std::conj(basis[j][i]) * u[i];
                    }
                    for (std::size_t i = 0; i < N; ++i) {
                        u[i] -= proj * basis[j][i];
                    }
                }
            }
            const double b = detail::norm2(u);
            dim = k + 1;
            beta.push_back(b);
            if (b <= 1e-13 * anorm) {
                happy = true;
                break;
            }
            for (std::size_t i = 0; i < N; ++i) {
                basis[k + 1][i] = u[i] / b;
            }
        }
        if (dim == N) {
            happy = true;
        }

        SymTridiagonal T;
        T.diagonal = alpha;
        T.off_diagonal.assign(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(dim - 1));
        const EigenSystem es = eigh_tridiagonal(T);
        CVector e1(dim, 0.0);
        e1[0] = 1.0;

        h = std::min(h, total - done);
        if (happy) {
            h = total - done;
        }
        CVector y;
        for (;;) {
            y = expm_action_eigen(es, sign, direction * h, e1);
            if (happy) {
                break;
            }
            const double err = beta[dim - 1] * std::abs(y[dim - 1]) * wnorm;
            const double allowed = opts.tol * beta0 * h / total;
            if (err <= allowed) {
                done += h;
                if (err < 0.1 * allowed) {
                    h *= std::min(2.0, 0.9 * std::pow(allowed / std::max(err, 1e-300),
                                                      1.0 / static_cast<double>(dim)));
                }
                break;
            }
            const double factor = 0.9 * std::pow(allowed / err, 1.0 / static_cast<double>(dim));
            h *= std::clamp(factor, 0.1, 0.5);
            if (h < total * 1e-14) {
                throw NumericalError("Krylov step size underflow at time " + std::to_string(done) +
                                     " (error estimate " + std::to_string(err) + ")");
            }
        }
        if (happy) {
            done = total;
        }

        std::fill(w.begin(), w.end(), cplx(0.0));
        for (std::size_t k = 0; k < dim; ++k) {
            const cplx c = wnorm * y[k];
            for (std::size_t i = 0; i < N; ++i) {
                w[i] += c * basis[k][i];
            }
        }
    }
    return w;
}

inline CVector expm_action_krylov(const SparseSymmetric& A, PhaseSign sign, double t, std::span<const cplx> v,
                                  double tol) {
    KrylovOptions opts;
    opts.tol = tol;
    return expm_action_krylov(A, sign, t, v, opts);
}

}  // namespace gtqw

#endif

#ifndef GTQW_TESTS_ORACLES_HPP
#define GTQW_TESTS_ORACLES_HPP

// Reference computations used only by the tests. Nothing here calls into the
// library's exponential or eigensolver code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "gtqw/photonics.hpp"

namespace gtqw::oracle {

using cplx = std::complex<double>;

/// Dense row-major complex matrix.
struct Dense {
    std::size_t n = 0;
    std::vector<cplx> a;

    explicit Dense(std::size_t size) : n(size), a(size * size, 0.0) {}
    cplx& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline Dense multiply(const Dense& x, const Dense& y) {
    Dense z(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        for (std::size_t k = 0; k < x.n; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx(0.0)) {
                continue;
            }
            for (std::size_t j = 0; j < x.n; ++j) {
                z(i, j) += xik * y(k, j);
            }
        }
    }
    return z;
}

/// exp(scale * M) by scaling and squaring with a long Taylor series.
inline Dense expm(const std::vector<double>& m_row_major, std::size_t n, cplx scale) {
    Dense x(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            x(i, j) = scale * m_row_major[i * n + j];
            row += std::abs(x(i, j));
        }
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.25) {
        norm *= 0.5;
        ++squarings;
    }
    const double shrink = std::ldexp(1.0, -squarings);
    for (auto& v : x.a) {
        v *= shrink;
    }
    Dense result(n), term(n);
    for (std::size_t i = 0; i < n; ++i) {
        result(i, i) = 1.0;
        term(i, i) = 1.0;
    }
    for (int k = 1; k <= 30; ++k) {
        term = multiply(term, x);
        for (auto& v : term.a) {
            v /= static_cast<double>(k);
        }
        for (std::size_t i = 0; i < result.a.size(); ++i) {
            result.a[i] += term.a[i];
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = multiply(result, result);
    }
    return result;
}

inline std::vector<cplx> apply(const Dense& m, const std::vector<cplx>& v) {
    std::vector<cplx> out(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j) {
            out[i] += m(i, j) * v[j];
        }
    }
    return out;
}

/// Eigenvalues of a dense real symmetric matrix by cyclic Jacobi rotations,
/// returned ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[i] = a[i * n + i];
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Dense tridiagonal matrix, row-major.
inline std::vector<double> dense_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t n = diag.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = diag[i];
        if (i + 1 < n) {
            m[i * n + i + 1] = off[i];
            m[(i + 1) * n + i] = off[i];
        }
    }
    return m;
}

/// Brute-force argmax on a uniform grid up to the first strict drop after
/// the value has exceeded `floor`.
struct GridPeak {
    double tau;
    double value;
};

template <typename F>
GridPeak grid_first_peak(F&& f, double step, double tau_max, double floor = 1e-9) {
    GridPeak best{0.0, f(0.0)};
    bool rising = false;
    for (std::size_t k = 1; static_cast<double>(k) * step <= tau_max; ++k) {
        const double tau = static_cast<double>(k) * step;
        const double v = f(tau);
        if (v > best.value) {
            rising = rising || v > floor;
            best = {tau, v};
        } else if (rising && v < best.value) {
            break;
        }
    }
    return best;
}

struct RenderedSpot {
    double x, y, sigma, amplitude;
};

/// Gaussian spots on a dark frame; amplitude is the integrated intensity.
inline Frame render_gaussian_frame(std::size_t width, std::size_t height, const std::vector<RenderedSpot>& spots,
                                   double background = 0.0) {
    Frame f;
    f.width = width;
    f.height = height;
    f.intensities.assign(width * height, background);
    for (const auto& s : spots) {
        const double norm = s.amplitude / (2.0 * M_PI * s.sigma * s.sigma);
        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double dx = static_cast<double>(x) - s.x;
                const double dy = static_cast<double>(y) - s.y;
                f.at(x, y) += norm * std::exp(-(dx * dx + dy * dy) / (2.0 * s.sigma * s.sigma));
            }
        }
    }
    return f;
}

/// Heralded-source counts: each trigger yields a detection in arm 1 or arm 2
/// with probability p_arm; the three-fold rate is true_alpha * p_arm^2.
inline CoincidenceCounts simulate_counts(std::mt19937_64& rng, double n3_mean, double p_arm, double true_alpha) {
    std::poisson_distribution<std::uint64_t> trig(n3_mean);
    const std::uint64_t n3 = trig(rng);
    std::poisson_distribution<std::uint64_t> c13(static_cast<double>(n3) * p_arm);
    std::poisson_distribution<std::uint64_t> c23(static_cast<double>(n3) * p_arm);
    std::poisson_distribution<std::uint64_t> c123(static_cast<double>(n3) * p_arm * p_arm * true_alpha);
    return {n3, c13(rng), c23(rng), c123(rng)};
}

}  // namespace gtqw::oracle

#endif

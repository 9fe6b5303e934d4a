#ifndef GTQW_WALKS_HPP
#define GTQW_WALKS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gtqw/error.hpp"
#include "gtqw/graphs.hpp"
#include "gtqw/linalg.hpp"

namespace gtqw {

enum class WalkKind { kQwChain, kQwFull, kCrwFull, kCrwLumped };

inline const char* to_string(WalkKind kind) {
    switch (kind) {
        case WalkKind::kQwChain: return "qw-chain";
        case WalkKind::kQwFull: return "qw-full";
        case WalkKind::kCrwFull: return "crw-full";
        case WalkKind::kCrwLumped: return "crw-lumped";
    }
    return "?";
}

inline WalkKind walk_kind_from_string(const std::string& s) {
    for (auto k : {WalkKind::kQwChain, WalkKind::kQwFull, WalkKind::kCrwFull, WalkKind::kCrwLumped}) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw ParameterError("unknown walk kind '" + s + "' (expected qw-chain, qw-full, crw-full or crw-lumped)");
}

/// Hard cap on explicit graph size for full-graph walks.
inline constexpr std::size_t kDefaultFullGraphNodeBudget = 5'000'000;

/// Sampled exit probability. Times are dimensionless tau = gamma * t unless
/// `gamma_phys_per_mm` is set, in which case `times` holds lengths in mm.
struct HittingCurve {
    WalkKind kind = WalkKind::kQwChain;
    int branching = 0;
    int depth = 0;
    double gamma = 1.0;
    std::vector<double> times;
    std::vector<double> values;
    std::optional<double> gamma_phys_per_mm;  // set when times are lengths
};

/// Rate matrix M = gamma (A - D) of the continuous-time random walk.
struct CrwGenerator {
    SparseSymmetric rates;
};

inline SparseSymmetric adjacency_matrix(const GluedTreeGraph& g, double weight = 1.0) {
    std::vector<SparseSymmetric::Entry> entries;
    entries.reserve(g.edges.size());
    for (const auto& [a, b] : g.edges) {
        entries.push_back({a, b, weight});
    }
    return SparseSymmetric::from_half_entries(g.node_count(), entries);
}

inline CrwGenerator crw_generator(const GluedTreeGraph& g, double gamma) {
    std::vector<double> degree(g.node_count(), 0.0);
    std::vector<SparseSymmetric::Entry> entries;
    entries.reserve(g.edges.size() + g.node_count());
    for (const auto& [a, b] : g.edges) {
        entries.push_back({a, b, gamma});
        degree[a] += 1.0;
        degree[b] += 1.0;
    }
    for (std::size_t v = 0; v < degree.size(); ++v) {
        entries.push_back({v, v, -gamma * degree[v]});
    }
    return {SparseSymmetric::from_half_entries(g.node_count(), entries)};
}

namespace detail {

inline void check_tau(double tau) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ParameterError("evolution time tau must be finite and >= 0");
    }
}

inline void check_budget(const GluedTreeGraph& g, std::size_t budget) {
    if (g.node_count() > budget) {
        throw ParameterError("graph has " + std::to_string(g.node_count()) + " nodes, above the full-graph budget of " +
                             std::to_string(budget));
    }
}

inline CVector indicator(std::size_t size, std::size_t at) {
    CVector v(size, 0.0);
    v[at] = 1.0;
    return v;
}

}  // namespace detail

/// Quantum walk on the reduced chain. The spectrum of H/gamma is computed
/// once, so repeated evaluations at different tau are cheap.
class ChainQuantumWalk {
public:
    explicit ChainQuantumWalk(const ChainHamiltonian& chain) : sites_(chain.size()) {
        SymTridiagonal scaled;
        scaled.diagonal.reserve(chain.size());
        for (double d : chain.diagonal) {
            scaled.diagonal.push_back(d / chain.gamma);
        }
        for (double c : chain.off_diagonal) {
            scaled.off_diagonal.push_back(c / chain.gamma);
        }
        eigen_ = eigh_tridiagonal(scaled);
        entrance_ = detail::indicator(sites_, 0);
    }

    std::size_t sites() const { return sites_; }

    CVector amplitudes(double tau) const {
        detail::check_tau(tau);
        return expm_action_eigen(eigen_, PhaseSign::kMinusI, tau, entrance_);
    }

    std::vector<double> distribution(double tau) const {
        const CVector psi = amplitudes(tau);
        std::vector<double> p(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            p[i] = std::norm(psi[i]);
        }
        return p;
    }

    /// |<exit| exp(-i H tau / gamma) |entrance>|^2
    double exit_probability(double tau) const {
        detail::check_tau(tau);
        if (tau == 0.0) {
            return sites_ == 1 ? 1.0 : 0.0;
        }
        cplx amp = 0.0;
        const std::size_t last = sites_ - 1;
        for (std::size_t k = 0; k < sites_; ++k) {
            amp += eigen_.component(last, k) * eigen_.component(0, k) *
                   std::polar(1.0, -eigen_.eigenvalues[k] * tau);
        }
        return std::norm(amp);
    }

    const EigenSystem& eigen() const { return eigen_; }

private:
    std::size_t sites_;
    EigenSystem eigen_;
    CVector entrance_;
};

inline double qw_hitting_chain(const ChainHamiltonian& chain, double tau) {
    return ChainQuantumWalk(chain).exit_probability(tau);
}

/// Node probabilities of the full-graph quantum walk with H = gamma A,
/// started on the entrance. Since t = tau / gamma, the evolution is exp(-i A tau).
inline std::vector<double> qw_distribution_full(const GluedTreeGraph& g, double gamma, double tau,
                                                const KrylovOptions& opts = {},
                                                std::size_t node_budget = kDefaultFullGraphNodeBudget) {
    detail::check_tau(tau);
    if (!(gamma > 0.0)) {
        throw ParameterError("hopping rate gamma must be positive");
    }
    detail::check_budget(g, node_budget);
    const SparseSymmetric A = adjacency_matrix(g);
    const CVector psi = expm_action_krylov(A, PhaseSign::kMinusI, tau, detail::indicator(g.node_count(), g.entrance), opts);
    std::vector<double> p(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        p[i] = std::norm(psi[i]);
    }
    return p;
}

/// Node probabilities of the continuous-time random walk exp(M t) e_entrance.
inline std::vector<double> crw_distribution_full(const GluedTreeGraph& g, double gamma, double tau,
                                                 const KrylovOptions& opts = {},
                                                 std::size_t node_budget = kDefaultFullGraphNodeBudget) {
    detail::check_tau(tau);
    if (!(gamma > 0.0)) {
        throw ParameterError("hopping rate gamma must be positive");
    }
    detail::check_budget(g, node_budget);
    // Evolving M/gamma = A - D over tau is the same as M over t = tau/gamma.
    const CrwGenerator gen = crw_generator(g, 1.0);
    const CVector p = expm_action_krylov(gen.rates, PhaseSign::kPlusOne, tau, detail::indicator(g.node_count(), g.entrance), opts);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i].real();
    }
    return out;
}

/// Classical walk lumped onto columns. The column process is a birth-death
/// chain (forward rate B, backward 1 on the left tree, B both ways across
/// the glue, mirrored on the right). It is reversible with stationary law
/// proportional to the column sizes N_j, so Pi^(1/2) Q Pi^(-1/2) is symmetric
/// tridiagonal and the exponential goes through eigh_tridiagonal.
class LumpedRandomWalk {
public:
    LumpedRandomWalk(int B, int n) : branching_(B), depth_(n) {
        detail::check_tree_params(B, n);
        const std::size_t m = 2 * static_cast<std::size_t>(n) + 2;
        const double b = static_cast<double>(B);
        SymTridiagonal s;
        s.diagonal.assign(m, -(b + 1.0));
        s.diagonal.front() = -b;
        s.diagonal.back() = -b;
        s.off_diagonal.assign(m - 1, std::sqrt(b));
        s.off_diagonal[static_cast<std::size_t>(n)] = b;
        eigen_ = eigh_tridiagonal(s);

        // sqrt(N_j), computed in floating point so large depths do not overflow.
        sqrt_sizes_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const int e = static_cast<int>(j) <= n ? static_cast<int>(j) : 2 * n + 1 - static_cast<int>(j);
            sqrt_sizes_[j] = std::pow(b, 0.5 * e);
        }
    }

    /// Column occupation probabilities at time tau (in units of 1/gamma).
    std::vector<double> distribution(double tau) const {
        detail::check_tau(tau);
        const std::size_t m = sqrt_sizes_.size();
        // p0 = e_0 and sqrt(N_0) = 1, so the symmetrized start vector is e_0.
        const CVector q = expm_action_eigen(eigen_, PhaseSign::kPlusOne, tau, detail::indicator(m, 0));
        std::vector<double> p(m);
        for (std::size_t j = 0; j < m; ++j) {
            p[j] = sqrt_sizes_[j] * q[j].real();
        }
        return p;
    }

    double exit_probability(double tau) const {
        detail::check_tau(tau);
        if (tau == 0.0) {
            return 0.0;
        }
        const std::size_t last = sqrt_sizes_.size() - 1;
        double acc = 0.0;
        for (std::size_t k = 0; k < eigen_.size(); ++k) {
            acc += eigen_.component(last, k) * eigen_.component(0, k) * std::exp(eigen_.eigenvalues[k] * tau);
        }
        return std::max(acc, 0.0);
    }

    int branching() const { return branching_; }
    int depth() const { return depth_; }

private:
    int branching_;
    int depth_;
    EigenSystem eigen_;
    std::vector<double> sqrt_sizes_;
};

inline double crw_hitting_lumped(int B, int n, double gamma, double tau) {
    if (!(gamma > 0.0)) {
        throw ParameterError("hopping rate gamma must be positive");
    }
    return LumpedRandomWalk(B, n).exit_probability(tau);
}

struct SweepOptions {
    std::uint64_t gluing_seed = 0;  // full-graph kinds only
    KrylovOptions krylov{};
    std::size_t node_budget = kDefaultFullGraphNodeBudget;
};

/// Samples the exit probability of the chosen walk on an ascending tau grid.
inline HittingCurve sweep_curve(WalkKind kind, int B, int n, double gamma, std::span<const double> tau_grid,
                                const SweepOptions& opts = {}) {
    if (tau_grid.empty()) {
        throw ParameterError("tau grid is empty");
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        detail::check_tau(tau_grid[i]);
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1])) {
            throw ParameterError("tau grid must be strictly increasing");
        }
    }
    HittingCurve curve;
    curve.kind = kind;
    curve.branching = B;
    curve.depth = n;
    curve.gamma = gamma;
    curve.times.assign(tau_grid.begin(), tau_grid.end());
    curve.values.reserve(tau_grid.size());

    switch (kind) {
        case WalkKind::kQwChain: {
            const ChainQuantumWalk walk(reduce_to_chain(B, n, gamma));
            for (double tau : tau_grid) {
                curve.values.push_back(std::clamp(walk.exit_probability(tau), 0.0, 1.0));
            }
            break;
        }
        case WalkKind::kCrwLumped: {
            if (!(gamma > 0.0)) {
                throw ParameterError("hopping rate gamma must be positive");
            }
            const LumpedRandomWalk walk(B, n);
            for (double tau : tau_grid) {
                curve.values.push_back(std::clamp(walk.exit_probability(tau), 0.0, 1.0));
            }
            break;
        }
        case WalkKind::kQwFull:
        case WalkKind::kCrwFull: {
            detail::check_tree_params(B, n);
            if (glued_tree_node_count(B, n) > opts.node_budget) {
                throw ParameterError("glued tree (B=" + std::to_string(B) + ", n=" + std::to_string(n) +
                                     ") exceeds the full-graph node budget");
            }
            const GluedTreeGraph g = build_glued_tree({B, n, opts.gluing_seed});
            for (double tau : tau_grid) {
                const auto p = kind == WalkKind::kQwFull
                                   ? qw_distribution_full(g, gamma, tau, opts.krylov, opts.node_budget)
                                   : crw_distribution_full(g, gamma, tau, opts.krylov, opts.node_budget);
                curve.values.push_back(std::clamp(p[g.exit], 0.0, 1.0));
            }
            break;
        }
    }
    return curve;
}

/// Re-expresses a dimensionless curve in evolution length z = tau / gamma_phys (mm).
inline HittingCurve to_physical_units(HittingCurve curve, double gamma_phys_per_mm) {
    if (!(gamma_phys_per_mm > 0.0)) {
        throw ParameterError("physical hopping rate must be positive");
    }
    if (curve.gamma_phys_per_mm) {
        throw ParameterError("curve is already in physical units");
    }
    for (double& t : curve.times) {
        t /= gamma_phys_per_mm;
    }
    curve.gamma_phys_per_mm = gamma_phys_per_mm;
    return curve;
}

/// Twelve significant digits, locale independent.
inline std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline void write_curve_csv(std::ostream& os, const HittingCurve& curve) {
    os << (curve.gamma_phys_per_mm ? "z_mm,value\n" : "tau,value\n");
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        os << format_number(curve.times[i]) << ',' << format_number(curve.values[i]) << '\n';
    }
}

}  // namespace gtqw

#endif

#ifndef GTQW_ANALYSIS_HPP
#define GTQW_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <future>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gtqw/error.hpp"
#include "gtqw/graphs.hpp"
#include "gtqw/walks.hpp"

namespace gtqw {

/// First local maximum of a hitting curve.
struct PeakResult {
    double tau_star = 0.0;
    double p_star = 0.0;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    int refinement_iterations = 0;
};

struct PeakConfig {
    /// Coarse scan step in tau; 0 selects default_coarse_step(B).
    double coarse_step = 0.0;
    double refine_tol = 1e-9;
    double tau_max = 200.0;
    /// Samples at or below this value never count as "rising". The exit
    /// amplitude near tau = 0 is O(tau^(2n+1)) and sits in round-off, where
    /// spurious wiggles would otherwise register as peaks.
    double noise_floor = 1e-9;
};

/// 0.02 divided by the chain hopping scale sqrt(B) (tau units).
inline double default_coarse_step(int B) { return 0.02 / std::sqrt(static_cast<double>(B)); }

/// Scans tau = 0, step, 2 step, ... until the value has risen above the
/// noise floor and then strictly dropped, then golden-section refines the
/// maximum inside the two-step bracket around the best coarse sample.
template <typename Evaluator>
    requires std::invocable<Evaluator&, double>
PeakResult find_first_peak(Evaluator&& f, double coarse_step, double refine_tol, double tau_max = 200.0,
                           double noise_floor = 1e-9) {
    if (!(coarse_step > 0.0) || !(refine_tol > 0.0) || !(tau_max > 0.0)) {
        throw ParameterError("peak search needs positive coarse step, refine tolerance and tau_max");
    }

    double lo = 0.0;  // last coarse sample strictly below the current running value
    double prev_tau = 0.0;
    double prev = static_cast<double>(f(0.0));
    bool rising = false;
    double hi = 0.0;
    bool bracketed = false;

    for (std::size_t k = 1;; ++k) {
        const double tau = static_cast<double>(k) * coarse_step;
        if (tau > tau_max) {
            break;
        }
        const double value = static_cast<double>(f(tau));
        if (value > prev) {
            if (value > noise_floor) {
                rising = true;
            }
            lo = prev_tau;
        } else if (rising && value < prev) {
            hi = tau;
            bracketed = true;
            break;
        }
        prev_tau = tau;
        prev = value;
    }
    if (!bracketed) {
        throw SearchError("no hitting peak found for tau <= " + std::to_string(tau_max));
    }

    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    int iterations = 0;
    while (b - a > refine_tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++iterations;
    }
    PeakResult out;
    out.tau_star = fc >= fd ? c : d;
    out.p_star = fc >= fd ? fc : fd;
    out.tau_lo = lo;
    out.tau_hi = hi;
    out.refinement_iterations = iterations;
    return out;
}

inline PeakResult find_first_peak(const ChainQuantumWalk& walk, int B, const PeakConfig& cfg) {
    const double step = cfg.coarse_step > 0.0 ? cfg.coarse_step : default_coarse_step(B);
    return find_first_peak([&](double tau) { return walk.exit_probability(tau); }, step, cfg.refine_tol,
                           cfg.tau_max, cfg.noise_floor);
}

struct ScalingRecord {
    int branching = 0;
    int depth = 0;
    double tau_star = 0.0;
    double p_star_qw = 0.0;
    double p_crw_at_tau_star = 0.0;
    double p_crw_stationary = 0.0;
    double enhancement_ratio = 0.0;
};

/// Long-time CRW exit probability: one over the node count.
inline double crw_stationary_hitting(int B, int n) {
    detail::check_tree_params(B, n);
    const double b = static_cast<double>(B);
    const double count = 2.0 * (std::pow(b, n + 1) - 1.0) / (b - 1.0);
    return 1.0 / count;
}

inline double enhancement_ratio(const ScalingRecord& r) { return r.p_star_qw / r.p_crw_stationary; }

inline ScalingRecord scaling_record(int B, int n, double gamma, const PeakConfig& cfg) {
    const ChainQuantumWalk walk(reduce_to_chain(B, n, gamma));
    const PeakResult peak = find_first_peak(walk, B, cfg);
    ScalingRecord r;
    r.branching = B;
    r.depth = n;
    r.tau_star = peak.tau_star;
    r.p_star_qw = peak.p_star;
    r.p_crw_at_tau_star = LumpedRandomWalk(B, n).exit_probability(peak.tau_star);
    r.p_crw_stationary = crw_stationary_hitting(B, n);
    r.enhancement_ratio = enhancement_ratio(r);
    return r;
}

/// One record per (B, n), B-major. Records are computed concurrently; each
/// is a pure function of its inputs so the output does not depend on
/// scheduling.
inline std::vector<ScalingRecord> scaling_sweep(std::span<const int> B_set, std::span<const int> n_set, double gamma,
                                                const PeakConfig& cfg, unsigned max_threads = 0) {
    if (B_set.empty() || n_set.empty()) {
        throw ParameterError("scaling sweep needs nonempty B and n sets");
    }
    struct Job {
        int B, n;
    };
    std::vector<Job> jobs;
    for (int B : B_set) {
        for (int n : n_set) {
            detail::check_tree_params(B, n);
            jobs.push_back({B, n});
        }
    }
    std::vector<ScalingRecord> out(jobs.size());
    const unsigned hw = max_threads ? max_threads : std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < jobs.size(); start += hw) {
        std::vector<std::future<ScalingRecord>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + hw); ++i) {
            batch.push_back(std::async(std::launch::async, [&, i] { return scaling_record(jobs[i].B, jobs[i].n, gamma, cfg); }));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            out[start + i] = batch[i].get();
        }
    }
    return out;
}

/// Records where p_star_qw increases with n at fixed B. Reported, not fatal.
inline std::vector<std::string> depth_monotonicity_warnings(std::span<const ScalingRecord> records) {
    std::vector<std::string> warnings;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        if (a.branching == b.branching && b.depth > a.depth && b.p_star_qw > a.p_star_qw) {
            warnings.push_back("p_star_qw rises from n=" + std::to_string(a.depth) + " to n=" +
                               std::to_string(b.depth) + " at B=" + std::to_string(a.branching));
        }
    }
    return warnings;
}

enum class FitModel { kPowerLaw, kLinear };

/// Least-squares fit. For kPowerLaw, y = prefactor * x^exponent is fitted in
/// log-log space: `slope` is the exponent and `intercept` the prefactor.
struct FitResult {
    FitModel model = FitModel::kLinear;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

namespace detail {

inline FitResult least_squares(std::span<const double> x, std::span<const double> y) {
    const auto m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw ParameterError("degenerate fit: all abscissae are equal");
    }
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
    // A flat series fits exactly up to round-off.
    if (syy <= 1e-30 * std::max(1.0, my * my)) {
        f.r_squared = 1.0;
    }
    f.points = x.size();
    return f;
}

inline void check_fit_input(std::size_t nx, std::size_t ny) {
    if (nx != ny) {
        throw ParameterError("fit inputs have different lengths");
    }
    if (nx < 3) {
        throw ParameterError("fit needs at least 3 points (got " + std::to_string(nx) + ")");
    }
}

}  // namespace detail

inline FitResult fit_linear(std::span<const double> xs, std::span<const double> ys) {
    detail::check_fit_input(xs.size(), ys.size());
    FitResult f = detail::least_squares(xs, ys);
    f.model = FitModel::kLinear;
    return f;
}

inline FitResult fit_power_law(std::span<const double> xs, std::span<const double> ys) {
    detail::check_fit_input(xs.size(), ys.size());
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
            throw ParameterError("power-law fit needs strictly positive inputs");
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    FitResult f = detail::least_squares(lx, ly);
    f.model = FitModel::kPowerLaw;
    f.intercept = std::exp(f.intercept);
    return f;
}

inline void write_scaling_csv(std::ostream& os, std::span<const ScalingRecord> records) {
    os << "B,n,tau_star,p_qw,p_crw_at_tau_star,p_crw_stationary,ratio\n";
    for (const auto& r : records) {
        os << r.branching << ',' << r.depth << ',' << format_number(r.tau_star) << ',' << format_number(r.p_star_qw)
           << ',' << format_number(r.p_crw_at_tau_star) << ',' << format_number(r.p_crw_stationary) << ','
           << format_number(r.enhancement_ratio) << '\n';
    }
}

inline nlohmann::json fit_to_json(const FitResult& f) {
    nlohmann::json j;
    if (f.model == FitModel::kPowerLaw) {
        j["model"] = "power_law";
        j["exponent"] = f.slope;
        j["prefactor"] = f.intercept;
    } else {
        j["model"] = "linear";
        j["slope"] = f.slope;
        j["intercept"] = f.intercept;
    }
    j["r_squared"] = f.r_squared;
    j["points"] = f.points;
    return j;
}

}  // namespace gtqw

#endif

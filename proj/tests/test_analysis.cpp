#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gtqw/analysis.hpp"
#include "oracles.hpp"

using namespace gtqw;

namespace {

// First peaks from an independent numpy/scipy computation (eigh + bounded
// Brent on the coarse bracket).
constexpr double kTauStarB2N16 = 13.044148639605806;
constexpr double kPeakB2N16 = 0.44608661855437715;
constexpr double kPeakB5N16 = 0.26802210158744133;
constexpr double kPeakB3N4 = 0.5899899666964995;
constexpr double kExponentB2N8to16 = -0.39806607647487857;

std::vector<double> to_double(std::vector<int> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(FindFirstPeak, SineSquared) {
    // A quadratic maximum is only resolvable to ~sqrt(machine eps) in tau.
    const double tol = 1e-7;
    const auto peak = find_first_peak([](double t) { return std::pow(std::sin(t), 2); }, 0.05, tol);
    EXPECT_NEAR(peak.tau_star, std::numbers::pi / 2, tol);
    EXPECT_NEAR(peak.p_star, 1.0, 1e-15);
    EXPECT_LT(peak.tau_lo, peak.tau_star);
    EXPECT_LT(peak.tau_star, peak.tau_hi);
    EXPECT_GT(peak.refinement_iterations, 0);
}

TEST(FindFirstPeak, ReturnsFirstNotGlobalMaximum) {
    // Local max 0.5 at t = pi/2, global max later.
    const auto f = [](double t) { return std::pow(std::sin(t), 2) * (t < 2.5 ? 0.5 : 1.0); };
    const auto peak = find_first_peak(f, 0.01, 1e-7);
    EXPECT_NEAR(peak.tau_star, std::numbers::pi / 2, 1e-7);
    EXPECT_NEAR(peak.p_star, 0.5, 1e-12);
}

TEST(FindFirstPeak, BinaryDepthTwoChain) {
    const ChainQuantumWalk walk(reduce_to_chain(2, 2, 1.0));
    const auto peak = find_first_peak(walk, 2, PeakConfig{});
    EXPECT_NEAR(peak.p_star, 0.82, 0.01);
    EXPECT_NEAR(peak.p_star, 0.8244910639861175, 1e-12);
    EXPECT_NEAR(peak.tau_star, 2.599367549847205, 1e-7);
}

TEST(FindFirstPeak, AgreesWithDenseGridOracleAtDepthSixteen) {
    const ChainQuantumWalk walk(reduce_to_chain(2, 16, 1.0));
    PeakConfig cfg;
    const auto peak = find_first_peak(walk, 2, cfg);
    const double step = 1e-4;
    const auto grid = oracle::grid_first_peak([&](double t) { return walk.exit_probability(t); }, step, 30.0);
    // The grid only resolves tau to step/2; the value is compared tightly.
    EXPECT_LE(std::abs(peak.tau_star - grid.tau), step / 2 + 10 * cfg.refine_tol);
    EXPECT_GE(peak.p_star, grid.value - 10 * cfg.refine_tol);
    EXPECT_NEAR(peak.tau_star, kTauStarB2N16, 1e-6);
    EXPECT_NEAR(peak.p_star, kPeakB2N16, 1e-12);
}

TEST(FindFirstPeak, NoEarlierCoarseSampleExceedsPeak) {
    for (int B : {2, 3, 5}) {
        for (int n : {2, 7, 12}) {
            const ChainQuantumWalk walk(reduce_to_chain(B, n, 1.0));
            const auto peak = find_first_peak(walk, B, PeakConfig{});
            const double step = default_coarse_step(B);
            for (double t = 0.0; t < peak.tau_lo; t += step) {
                EXPECT_LE(walk.exit_probability(t), peak.p_star);
            }
            EXPECT_GE(peak.p_star, walk.exit_probability(peak.tau_lo));
            EXPECT_GE(peak.p_star, walk.exit_probability(peak.tau_hi));
        }
    }
}

TEST(FindFirstPeak, IgnoresRoundOffNearZero) {
    // Without the noise floor this chain reports a spurious peak of ~1e-31.
    const ChainQuantumWalk walk(reduce_to_chain(4, 4, 1.0));
    const auto peak = find_first_peak(walk, 4, PeakConfig{});
    EXPECT_GT(peak.p_star, 0.4);
}

TEST(FindFirstPeak, ErrorsWhenNoPeakBeforeHorizon) {
    EXPECT_THROW(find_first_peak([](double t) { return t; }, 0.1, 1e-9, 5.0), SearchError);
    EXPECT_THROW(find_first_peak([](double t) { return t; }, 0.0, 1e-9), ParameterError);
    EXPECT_THROW(find_first_peak([](double t) { return t; }, 0.1, -1.0), ParameterError);
}

TEST(ScalingSweep, BinaryDepthTwoRecord) {
    const std::vector<int> Bs{2}, ns{2};
    const auto recs = scaling_sweep(Bs, ns, 1.0, PeakConfig{});
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_NEAR(recs[0].p_star_qw, 0.82, 0.01);
    EXPECT_NEAR(recs[0].p_crw_at_tau_star, 0.044, 0.010);
    EXPECT_NEAR(recs[0].p_crw_at_tau_star, 0.043258900866049756, 1e-9);
    EXPECT_DOUBLE_EQ(recs[0].p_crw_stationary, 1.0 / 14.0);
}

TEST(ScalingSweep, BranchingContrastAtDepthSixteen) {
    const std::vector<int> Bs{2, 5}, ns{16};
    const auto recs = scaling_sweep(Bs, ns, 1.0, PeakConfig{});
    const double crw_ratio = recs[1].p_crw_stationary / recs[0].p_crw_stationary;
    EXPECT_GT(crw_ratio, 4.29e-7 / 2);
    EXPECT_LT(crw_ratio, 4.29e-7 * 2);
    EXPECT_LE(recs[0].p_star_qw / recs[1].p_star_qw, 2.0);
    EXPECT_NEAR(recs[0].p_star_qw, kPeakB2N16, 1e-12);
    EXPECT_NEAR(recs[1].p_star_qw, kPeakB5N16, 1e-12);
}

TEST(ScalingSweep, StationaryValueIsInverseNodeCount) {
    const std::vector<int> Bs{2, 3, 4, 7}, ns{1, 2, 5, 9};
    for (const auto& r : scaling_sweep(Bs, ns, 1.0, PeakConfig{})) {
        EXPECT_EQ(r.p_crw_stationary, 1.0 / static_cast<double>(glued_tree_node_count(r.branching, r.depth)));
        EXPECT_EQ(r.enhancement_ratio, r.p_star_qw / r.p_crw_stationary);
        EXPECT_GT(r.enhancement_ratio, 0.0);
    }
}

TEST(ScalingSweep, DeterministicAcrossThreadCounts) {
    const std::vector<int> Bs{2, 3, 4}, ns{2, 3, 4, 5};
    const auto a = scaling_sweep(Bs, ns, 1.0, PeakConfig{}, 1);
    const auto b = scaling_sweep(Bs, ns, 1.0, PeakConfig{}, 5);
    std::ostringstream sa, sb;
    write_scaling_csv(sa, a);
    write_scaling_csv(sb, b);
    EXPECT_EQ(sa.str(), sb.str());
    ASSERT_EQ(a.size(), 12u);
    EXPECT_EQ(a[4].branching, 3);
    EXPECT_EQ(a[4].depth, 2);
}

TEST(ScalingSweep, DepthTrendIsNonincreasing) {
    const std::vector<int> Bs{2, 3, 4, 5}, ns{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    const auto recs = scaling_sweep(Bs, ns, 1.0, PeakConfig{});
    const auto warnings = depth_monotonicity_warnings(recs);
    for (const auto& w : warnings) {
        ADD_FAILURE() << "trend warning: " << w;
    }
}

TEST(ScalingSweep, MonotonicityWarningsAreReportedNotThrown) {
    std::vector<ScalingRecord> recs(2);
    recs[0] = {2, 3, 1.0, 0.5, 0.0, 0.1, 5.0};
    recs[1] = {2, 4, 1.0, 0.6, 0.0, 0.1, 6.0};
    EXPECT_EQ(depth_monotonicity_warnings(recs).size(), 1u);
}

TEST(ScalingSweep, RejectsEmptySets) {
    const std::vector<int> none, some{2};
    EXPECT_THROW(scaling_sweep(none, some, 1.0, PeakConfig{}), ParameterError);
    EXPECT_THROW(scaling_sweep(some, none, 1.0, PeakConfig{}), ParameterError);
}

TEST(FitPowerLaw, ExactSyntheticLaw) {
    const auto ns = to_double({2, 3, 5, 8, 13});
    std::vector<double> ps;
    for (double n : ns) ps.push_back(std::pow(n, -2.0 / 3.0));
    const auto f = fit_power_law(ns, ps);
    EXPECT_EQ(f.model, FitModel::kPowerLaw);
    EXPECT_NEAR(f.slope, -2.0 / 3.0, 1e-9);
    EXPECT_NEAR(f.intercept, 1.0, 1e-9);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitPowerLaw, ConstantSeriesHasZeroExponent) {
    const auto f = fit_power_law(to_double({1, 2, 3, 4}), std::vector<double>{0.3, 0.3, 0.3, 0.3});
    EXPECT_NEAR(f.slope, 0.0, 1e-15);
    EXPECT_GE(f.r_squared, 0.0);
    EXPECT_LE(f.r_squared, 1.0);
}

TEST(FitPowerLaw, QuantumPeaksOverModerateDepths) {
    std::vector<double> ns, ps;
    for (int n = 8; n <= 16; ++n) {
        const ChainQuantumWalk walk(reduce_to_chain(2, n, 1.0));
        ns.push_back(n);
        ps.push_back(find_first_peak(walk, 2, PeakConfig{}).p_star);
    }
    const auto f = fit_power_law(ns, ps);
    // Local exponent at these depths; the n^(-2/3) law is only approached
    // for much larger n.
    EXPECT_NEAR(f.slope, kExponentB2N8to16, 1e-8);
}

TEST(FitPowerLaw, RejectsBadInput) {
    EXPECT_THROW(fit_power_law(to_double({1, 2, 3}), std::vector<double>{1, 0, 1}), ParameterError);
    EXPECT_THROW(fit_power_law(to_double({1, 2}), std::vector<double>{1, 1}), ParameterError);
    EXPECT_THROW(fit_power_law(to_double({1, 2, 3}), std::vector<double>{1, 1}), ParameterError);
}

TEST(FitLinear, ExactLine) {
    const auto ns = to_double({1, 2, 3, 4, 5});
    std::vector<double> ts;
    for (double n : ns) ts.push_back(2 * n + 1);
    const auto f = fit_linear(ns, ts);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-13);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-15);
}

TEST(FitLinear, OptimalTimeIsLinearInDepth) {
    std::vector<double> ns, ts;
    for (int n = 2; n <= 16; ++n) {
        const ChainQuantumWalk walk(reduce_to_chain(2, n, 1.0));
        ns.push_back(n);
        ts.push_back(find_first_peak(walk, 2, PeakConfig{}).tau_star);
    }
    const auto f = fit_linear(ns, ts);
    EXPECT_GT(f.r_squared, 0.999);
    EXPECT_NEAR(f.slope, 0.74323153, 1e-6);
}

TEST(FitLinear, OutlierLowersRSquared) {
    const auto ns = to_double({1, 2, 3, 4, 5, 6});
    std::vector<double> ts{1.1, 2.0, 2.9, 4.1, 5.0, 6.0};
    const double clean = fit_linear(ns, ts).r_squared;
    ts[3] = 9.0;
    EXPECT_LT(fit_linear(ns, ts).r_squared, clean);
}

TEST(FitLinear, DegenerateAbscissae) {
    EXPECT_THROW(fit_linear(to_double({3, 3, 3}), std::vector<double>{1, 2, 3}), ParameterError);
}

TEST(EnhancementRatio, SyntheticAndBranchingTrend) {
    ScalingRecord same;
    same.p_star_qw = 0.25;
    same.p_crw_stationary = 0.25;
    EXPECT_EQ(enhancement_ratio(same), 1.0);

    std::vector<int> Bs;
    for (int B = 2; B <= 10; ++B) Bs.push_back(B);
    const std::vector<int> ns{4};
    const auto recs = scaling_sweep(Bs, ns, 1.0, PeakConfig{});
    for (std::size_t i = 1; i < recs.size(); ++i) {
        EXPECT_GT(recs[i].enhancement_ratio, recs[i - 1].enhancement_ratio);
    }
    EXPECT_NEAR(recs[1].p_star_qw, kPeakB3N4, 1e-12);

    std::vector<double> bs, rs;
    for (const auto& r : recs) {
        if (r.branching >= 6) {
            bs.push_back(r.branching);
            rs.push_back(r.enhancement_ratio);
        }
    }
    EXPECT_NEAR(fit_power_law(bs, rs).slope, 3.0, 0.5);
}

TEST(FitJson, NamesParametersByModel) {
    FitResult f;
    f.model = FitModel::kPowerLaw;
    f.slope = -0.5;
    f.intercept = 2.0;
    f.r_squared = 0.9;
    f.points = 4;
    const auto j = fit_to_json(f);
    EXPECT_EQ(j.at("model"), "power_law");
    EXPECT_EQ(j.at("exponent"), -0.5);
    EXPECT_EQ(j.at("prefactor"), 2.0);
}

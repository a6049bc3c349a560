#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tailcovar/covar_core.hpp"
#include "tailcovar/error.hpp"
#include "tailcovar/models.hpp"

using namespace tailcovar;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::BadInput;
}

double solve(const TailFamily& fam, double theta, double p, AdjustmentVariant v = AdjustmentVariant::Exceedance,
             double ratio = 1.0) {
    std::vector<double> th{theta};
    return solve_eta_star(AdjustmentQuery{p, v, ratio, &fam, th, fam.eta(th)});
}

}  // namespace

TEST(SolveEtaStar, ReferenceClosedFormPoints) {
    InvertedHuslerReissFamily ihr;
    ParetoMixtureFamily pm;
    const double ihr_expect = std::pow(0.05, (2 - 2 * 0.93) / 0.93);
    EXPECT_NEAR(solve(ihr, 0.93, 0.05), ihr_expect, 1e-10);
    EXPECT_NEAR(ihr_expect, 0.6370, 5e-5);
    const double a = 0.85 / 0.45;
    const double pm_expect = std::pow(0.05, 2 * 0.45 / 0.85 - 1) * std::pow(2.0, 0.45 / 0.85 - 1);
    EXPECT_NEAR(solve(pm, a, 0.05), pm_expect, 1e-10);
    EXPECT_NEAR(pm_expect, 0.6051, 5e-5);
}

TEST(SolveEtaStar, ClosedFormGrid) {
    InvertedHuslerReissFamily ihr;
    ParetoMixtureFamily pm;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            double p = 0.001 + (0.3 - 0.001) * j / 19.0;
            double t = 0.5 + 0.5 * (i + 0.5) / 20.0;
            EXPECT_NEAR(solve(ihr, t, p), std::pow(p, (2 - 2 * t) / t), 1e-10);
            double a = 1.0 + (i + 0.5) / 20.0;
            EXPECT_NEAR(solve(pm, a, p), std::pow(p, 2 / a - 1) * std::pow(2.0, 1 / a - 1), 1e-10);
        }
    }
}

TEST(SolveEtaStar, IndependenceBoundary) {
    InvertedHuslerReissFamily ihr;
    const double t = 1 - 1e-9;
    for (double p : {0.01, 0.05, 0.2}) {
        double s = solve(ihr, t, p);
        EXPECT_NEAR(s, std::pow(p, (2 - 2 * t) / t), 1e-6);
        EXPECT_NEAR(s, 1.0, 1e-6);
    }
}

TEST(SolveEtaStar, NonIncreasingInEta) {
    InvertedHuslerReissFamily ihr;
    ParetoMixtureFamily pm;
    double prev_eta = 0.0, prev = 2.0;
    for (double t = 0.99; t > 0.5; t -= 0.025) {  // eta = 1/(2t) increasing
        double s = solve(ihr, t, 0.05);
        EXPECT_GT(1 / (2 * t), prev_eta);
        EXPECT_LE(s, prev + 1e-15);
        prev = s;
        prev_eta = 1 / (2 * t);
    }
    prev = 2.0;
    for (double a = 1.975; a >= 1.0; a -= 0.05) {
        double s = solve(pm, a, 0.05);
        EXPECT_LE(s, prev + 1e-15);
        prev = s;
    }
}

TEST(SolveEtaStar, TwoLevelWithUnitRatioEqualsSingleLevel) {
    InvertedHuslerReissFamily ihr;
    ParetoMixtureFamily pm;
    for (double p : {0.01, 0.05, 0.1}) {
        EXPECT_EQ(solve(ihr, 0.8, p, AdjustmentVariant::ExceedanceTwoLevel, 1.0), solve(ihr, 0.8, p));
        EXPECT_EQ(solve(pm, 1.7, p, AdjustmentVariant::ExceedanceTwoLevel, 1.0), solve(pm, 1.7, p));
        EXPECT_EQ(solve(ihr, 0.8, p, AdjustmentVariant::EqualityTwoLevel, 1.0),
                  solve(ihr, 0.8, p, AdjustmentVariant::Equality));
    }
}

TEST(SolveEtaStar, ExtensionClosedForms) {
    InvertedHuslerReissFamily ihr;
    const double p = 0.05, t = 0.8, target = std::pow(p, 2 - 2 * t);
    // c(1, C s) = C target  ->  s = (C target)^(1/t) / C
    for (double C : {0.5, 2.0}) {
        EXPECT_NEAR(solve(ihr, t, p, AdjustmentVariant::ExceedanceTwoLevel, C),
                    std::pow(C * target, 1 / t) / C, 1e-10);
    }
    // c_x(1, s) = t s^t = target
    EXPECT_NEAR(solve(ihr, t, p, AdjustmentVariant::Equality), std::pow(target / t, 1 / t), 1e-10);
    EXPECT_NEAR(solve(ihr, t, p, AdjustmentVariant::EqualityTwoLevel, 0.5), std::pow(0.5 * target / t, 1 / t) / 0.5,
                1e-10);
}

TEST(SolveEtaStar, Errors) {
    InvertedHuslerReissFamily ihr;
    ParetoMixtureFamily pm;
    std::vector<double> th{0.8};
    EXPECT_EQ(code_of([&] { solve_eta_star({0.05, AdjustmentVariant::Exceedance, 1.0, &ihr, th, 0.5}); }),
              ErrorCode::BadEta);
    EXPECT_EQ(code_of([&] { solve_eta_star({0.05, AdjustmentVariant::Exceedance, 1.0, &ihr, th, 1.2}); }),
              ErrorCode::BadEta);
    // c_x of the Pareto mixture jumps from 0 to alpha 2^(alpha-1) at s = 1
    EXPECT_EQ(code_of([&] { solve(pm, 1.5, 0.05, AdjustmentVariant::Equality); }), ErrorCode::NoRoot);
    // C target exceeds c(1, C) for every s in (0, 1]
    EXPECT_EQ(code_of([&] { solve(ihr, 0.6, 0.5, AdjustmentVariant::ExceedanceTwoLevel, 1e3); }), ErrorCode::NoRoot);
}

TEST(AdjustmentFactorExact, IndependentToyModel) {
    for (double p : {0.01, 0.05, 0.3})
        EXPECT_NEAR(adjustment_factor_exact([](double u, double v) { return u * v; }, p), 1.0, 1e-12);
}

class CovarEstimateFixture : public ::testing::Test {
protected:
    InvertedHuslerReissFamily ihr;
    PairedSample sample = sample_model2(Model2{0.93}, 5000, 31);
};

TEST_F(CovarEstimateFixture, CompositionIdentity) {
    auto scheme = default_scheme(ihr);
    auto est = covar_estimate(sample, 0.05, 1000, 1000, 1000, ihr, scheme);
    EXPECT_EQ(est.covar_hat, std::pow(est.eta_star_hat, -est.gamma_hat) * est.var_hat_p);
    EXPECT_GT(est.covar_hat, est.var_hat_p);
    EXPECT_NEAR(est.eta_hat, ihr.eta(est.theta_hat), 1e-15);
    EXPECT_EQ(est.tuning.k1, 1000u);
    auto j = est.to_json();
    for (auto key : {"gamma_hat", "var_hat_p", "theta_hat", "zeta_hat", "eta_hat", "eta_star_hat", "covar_hat",
                     "objective_value", "eta_clamped", "family", "variant", "level_ratio", "tuning"})
        EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(CovarEstimateFixture, ScaleEquivariantInY) {
    auto scheme = default_scheme(ihr);
    auto base = covar_estimate(sample, 0.05, 800, 900, 1000, ihr, scheme);
    for (double c : {0.01, 3.0, 250.0}) {
        PairedSample scaled = sample;
        for (auto& v : scaled.y) v *= c;
        auto est = covar_estimate(scaled, 0.05, 800, 900, 1000, ihr, scheme);
        EXPECT_NEAR(est.covar_hat / (c * base.covar_hat), 1.0, 1e-12);
        EXPECT_EQ(est.theta_hat, base.theta_hat);
    }
}

TEST_F(CovarEstimateFixture, EqualityVariantReportsSolverFailure) {
    ParetoMixtureFamily pm;
    EstimateOptions opts;
    opts.variant = AdjustmentVariant::Equality;
    EXPECT_EQ(code_of([&] { covar_estimate(sample, 0.05, 1000, 1000, 1000, pm, default_scheme(pm), opts); }),
              ErrorCode::EtaStarOutOfRange);
    auto est = covar_estimate(sample, 0.05, 1000, 1000, 1000, ihr, default_scheme(ihr), opts);
    EXPECT_TRUE(std::isfinite(est.covar_hat));
}

TEST(Variants, ParseRoundTrip) {
    for (auto v : {AdjustmentVariant::Exceedance, AdjustmentVariant::ExceedanceTwoLevel, AdjustmentVariant::Equality,
                   AdjustmentVariant::EqualityTwoLevel})
        EXPECT_EQ(parse_variant(to_string(v)), v);
}

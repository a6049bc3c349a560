#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tailcovar/covar_core.hpp"
#include "tailcovar/models.hpp"
#include "tailcovar/sample.hpp"
#include "tailcovar/tail_dependence.hpp"

namespace tailcovar {

// ---------------------------------------------------------------------------
// Baseline
// ---------------------------------------------------------------------------

/// Empirical conditional quantile: keep pairs with X_i >= X_{n,n-floor(np)+1},
/// then apply the same order-statistic rule to their m Y values, returning
/// Y_{m,m-floor(mp)+1} (at least the largest value when floor(mp) = 0).
double naive_covar(const PairedSample& sample, double p);

// ---------------------------------------------------------------------------
// Monte Carlo reproduction
// ---------------------------------------------------------------------------

struct KTriple {
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    std::size_t k3 = 0;
};

struct ExperimentConfig {
    ModelSpec model;
    double p = 0.05;
    std::size_t n = 5000;
    std::size_t reps = 200;
    std::vector<KTriple> k_grid;
    std::uint64_t seed = 1;
    std::string family;                   // empty: the family matching the model
    std::optional<nlohmann::json> scheme;  // empty: default_scheme(family)
    std::string output;                   // path prefix for .json/.csv, empty: none
    unsigned threads = 0;                 // 0: hardware concurrency

    /// Required: model, p, n, reps, k_grid, seed. k_grid entries are either
    /// an integer k (k1 = k2 = k3 = k) or [k1, k2, k3]. Missing fields raise
    /// BadInput naming the field.
    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct KSummary {
    KTriple k;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> estimates;  // indexed by repetition
};

struct ExperimentReport {
    ModelSpec model;
    double p = 0.0;
    std::size_t n = 0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    double true_value = 0.0;
    std::vector<KSummary> per_k;
    double naive_mean = 0.0;
    double naive_sd = 0.0;
    std::vector<double> naive_estimates;

    nlohmann::json to_json() const;
    /// rep,estimator,k1,k2,k3,value
    std::string to_csv() const;
    /// One summary row: model, true value, mean(sd) per k, naive.
    std::string summary() const;
};

/// Repetition r draws its sample with seed + r; repetitions run on up to
/// `threads` workers and are aggregated in repetition order, so the report is
/// identical for any thread count.
ExperimentReport run_table1(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Sensitivity of eta_hat to k3
// ---------------------------------------------------------------------------

struct EtaScanPoint {
    std::size_t k3 = 0;
    std::optional<double> eta_hat;
    std::string error;  // set when eta_hat is empty
};

std::vector<EtaScanPoint> eta_scan(const PairedSample& sample, const TailFamily& family, const WeightScheme& scheme,
                                   std::span<const std::size_t> k3_grid);

// ---------------------------------------------------------------------------
// Dynamic forecasts and scoring
// ---------------------------------------------------------------------------

struct ResidualPair {
    double zx = 0.0;
    double zy = 0.0;
};

struct ConditionalMoments {
    double mu_y = 0.0;
    double sigma_y = 1.0;
};

struct DynamicConfig {
    std::size_t window = 3000;
    std::size_t refresh_every = 50;
    double p = 0.05;
    std::size_t k1 = 150;
    std::size_t k2 = 250;
    std::size_t k3 = 400;
    EstimateOptions estimate;
};

struct ForecastRecord {
    std::size_t t = 0;
    double mu_y = 0.0;
    double sigma_y = 1.0;
    std::optional<ResidualPair> residual;  // realised residual at t, when known
    double residual_covar = 0.0;           // static estimate in force at t
    double covar = 0.0;                    // mu_y + sigma_y * residual_covar
    bool refreshed = false;                // residual_covar re-estimated at t
};

/// Forecasts for t = window .. moments.size() - 1. At t the residual window is
/// residuals[t - window, t); the static estimate is refreshed at t = window and
/// every refresh_every steps after that and held in between. Throws
/// WindowTooShort when a refresh needs residuals that are not there.
std::vector<ForecastRecord> dynamic_covar(std::span<const ResidualPair> residuals,
                                          std::span<const ConditionalMoments> moments, const TailFamily& family,
                                          const WeightScheme& scheme, const DynamicConfig& config);

/// S(r, x) = (p - 1{x > r}) r + 1{x > r} x.
double quantile_score(double forecast, double observation, double p);

struct ScoreSeries {
    std::vector<std::size_t> times;
    std::vector<double> scores;
    double average = 0.0;
    std::size_t count = 0;
};

ScoreSeries score_series(std::span<const double> forecasts, std::span<const double> observations, double p);

/// Empirical VaR of x at level 1 - p from x[t - window, t), reported for
/// t = window .. x.size(); entry i belongs to t = window + i. Uses the
/// order statistic X_{w,w-floor(wp)+1}, as in naive_covar.
std::vector<double> rolling_empirical_var(std::span<const double> x, std::size_t window, double p);

/// Scores forecasts on distress days only: t is an event when x[t] exceeds the
/// rolling empirical VaR of x over the preceding window.
ScoreSeries score_distress_events(std::span<const ForecastRecord> forecasts, std::span<const double> x,
                                  std::span<const double> y, std::size_t window, double p);

}  // namespace tailcovar

#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "tailcovar/sample.hpp"
#include "tailcovar/tail_dependence.hpp"

namespace tailcovar {

/// Which defining equation the adjustment factor solves. With t = p^(2 - 1/eta):
///   Exceedance          c(1, s)        = t
///   ExceedanceTwoLevel  c(1, C s)      = C t      (target level q = C p)
///   Equality            c_x(1, s)      = t        (conditioning on X = VaR)
///   EqualityTwoLevel    c_x(1, C s)    = C t
enum class AdjustmentVariant { Exceedance, ExceedanceTwoLevel, Equality, EqualityTwoLevel };

AdjustmentVariant parse_variant(std::string_view name);
std::string_view to_string(AdjustmentVariant v) noexcept;

struct AdjustmentQuery {
    double p = 0.05;
    AdjustmentVariant variant = AdjustmentVariant::Exceedance;
    double level_ratio = 1.0;  // C; ignored by the single-level variants
    const TailFamily* family = nullptr;
    Theta theta;
    double eta = 1.0;
};

/// Root s in (0, 1] of the variant's equation, found by bracketed bisection on
/// [1e-300, 1] to relative tolerance 1e-12. Throws BadEta for eta outside
/// (1/2, 1] and NoRoot when the target is not below the left side at s = 1
/// (or the left side jumps over the target instead of crossing it).
double solve_eta_star(const AdjustmentQuery& query);

/// Exact adjustment factor: the root s of Q(p, p s) = p^2, where Q is the
/// joint distribution function of the marginal survival probabilities.
double adjustment_factor_exact(const std::function<double(double, double)>& q_uv, double p);

struct Tuning {
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    std::size_t k3 = 0;
    double p = 0.0;
};

struct CovarEstimate {
    double gamma_hat = 0.0;
    double var_hat_p = 0.0;
    Theta theta_hat;
    double zeta_hat = 0.0;
    double eta_hat = 0.0;
    double eta_star_hat = 0.0;
    double covar_hat = 0.0;
    double objective_value = 0.0;
    bool eta_clamped = false;
    std::string family;
    AdjustmentVariant variant = AdjustmentVariant::Exceedance;
    double level_ratio = 1.0;
    Tuning tuning;

    nlohmann::json to_json() const;
};

struct EstimateOptions {
    AdjustmentVariant variant = AdjustmentVariant::Exceedance;
    double level_ratio = 1.0;
    FitOptions fit;
};

/// Hill -> Weissman VaR -> rank moment fit -> adjustment factor, combined as
/// covar_hat = eta_star_hat^(-gamma_hat) * var_hat_p.
CovarEstimate covar_estimate(const PairedSample& sample, double p, std::size_t k1, std::size_t k2, std::size_t k3,
                             const TailFamily& family, const WeightScheme& scheme, const EstimateOptions& opts = {});

}  // namespace tailcovar

#include "tailcovar/covar_core.hpp"

#include <cmath>
#include <string>

#include "tailcovar/error.hpp"
#include "tailcovar/numerics.hpp"
#include "tailcovar/tail_margins.hpp"

namespace tailcovar {

namespace {

constexpr double kBracketLo = 1e-300;
constexpr double kRootTol = 1e-12;

}  // namespace

AdjustmentVariant parse_variant(std::string_view name) {
    if (name == "exceedance") return AdjustmentVariant::Exceedance;
    if (name == "exceedance-two-level") return AdjustmentVariant::ExceedanceTwoLevel;
    if (name == "equality") return AdjustmentVariant::Equality;
    if (name == "equality-two-level") return AdjustmentVariant::EqualityTwoLevel;
    throw Error(ErrorCode::BadSpec, "unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(AdjustmentVariant v) noexcept {
    switch (v) {
        case AdjustmentVariant::Exceedance: return "exceedance";
        case AdjustmentVariant::ExceedanceTwoLevel: return "exceedance-two-level";
        case AdjustmentVariant::Equality: return "equality";
        case AdjustmentVariant::EqualityTwoLevel: return "equality-two-level";
    }
    return "exceedance";
}

double solve_eta_star(const AdjustmentQuery& q) {
    if (q.family == nullptr) throw Error(ErrorCode::BadSpec, "adjustment query without a family");
    if (!(q.p > 0.0 && q.p < 1.0)) throw Error(ErrorCode::BadLevel, "p must lie in (0,1)");
    if (!(q.eta > 0.5 && q.eta <= 1.0))
        throw Error(ErrorCode::BadEta, "eta = " + std::to_string(q.eta) + " is outside (1/2, 1]");

    const bool two_level =
        q.variant == AdjustmentVariant::ExceedanceTwoLevel || q.variant == AdjustmentVariant::EqualityTwoLevel;
    const bool equality = q.variant == AdjustmentVariant::Equality || q.variant == AdjustmentVariant::EqualityTwoLevel;
    const double scale = two_level ? q.level_ratio : 1.0;
    if (!(scale > 0.0)) throw Error(ErrorCode::BadSpec, "level ratio C must be positive");

    const TailFamily& fam = *q.family;
    const double target = scale * std::pow(q.p, 2.0 - 1.0 / q.eta);
    auto lhs = [&](double s) { return equality ? fam.c_x(1.0, scale * s, q.theta) : fam.c(1.0, scale * s, q.theta); };

    const double top = lhs(1.0);
    if (!(target < top))
        throw Error(ErrorCode::NoRoot, "target " + std::to_string(target) + " is not below the left side " +
                                           std::to_string(top) + " at s = 1");
    auto root = bisect([&](double s) { return lhs(s) - target; }, kBracketLo, 1.0, kRootTol);
    if (!root) throw Error(ErrorCode::NoRoot, "target lies below the left side on the whole bracket");
    const double resid = std::abs(lhs(*root) - target);
    if (resid > 1e-6 * target)
        throw Error(ErrorCode::NoRoot, "left side jumps across the target near s = " + std::to_string(*root));
    return *root;
}

double adjustment_factor_exact(const std::function<double(double, double)>& q_uv, double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadLevel, "p must lie in (0,1)");
    const double target = p * p;
    auto root = bisect([&](double s) { return q_uv(p, p * s) - target; }, kBracketLo, 1.0, kRootTol);
    if (!root) throw Error(ErrorCode::NoRoot, "Q(p, p s) = p^2 has no root for s in (0, 1]");
    return *root;
}

nlohmann::json CovarEstimate::to_json() const {
    return {
        {"gamma_hat", gamma_hat},
        {"var_hat_p", var_hat_p},
        {"theta_hat", theta_hat},
        {"zeta_hat", zeta_hat},
        {"eta_hat", eta_hat},
        {"eta_star_hat", eta_star_hat},
        {"covar_hat", covar_hat},
        {"objective_value", objective_value},
        {"eta_clamped", eta_clamped},
        {"family", family},
        {"variant", std::string(to_string(variant))},
        {"level_ratio", level_ratio},
        {"tuning", {{"k1", tuning.k1}, {"k2", tuning.k2}, {"k3", tuning.k3}, {"p", tuning.p}}},
    };
}

CovarEstimate covar_estimate(const PairedSample& sample, double p, std::size_t k1, std::size_t k2, std::size_t k3,
                             const TailFamily& family, const WeightScheme& scheme, const EstimateOptions& opts) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadLevel, "p must lie in (0,1)");
    const SortedSeries ys = SortedSeries::from(sample.y);
    const TailIndexEstimate tail = hill(ys, k1);
    const VarEstimate var = weissman_var(ys, tail.gamma_hat, k2, p);

    const RankedPairs ranks = rank_pairs(sample);
    const FitResult fit = m_estimate(ranks, k3, family, scheme, opts.fit);

    AdjustmentQuery query{p, opts.variant, opts.level_ratio, &family, fit.theta_hat, fit.eta_hat};
    double eta_star = 0.0;
    try {
        eta_star = solve_eta_star(query);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoRoot) throw;
        throw Error(ErrorCode::EtaStarOutOfRange, e.what());
    }

    CovarEstimate est;
    est.gamma_hat = tail.gamma_hat;
    est.var_hat_p = var.value;
    est.theta_hat = fit.theta_hat;
    est.zeta_hat = fit.zeta_hat;
    est.eta_hat = fit.eta_hat;
    est.eta_star_hat = eta_star;
    est.covar_hat = std::pow(eta_star, -tail.gamma_hat) * var.value;
    est.objective_value = fit.objective_value;
    est.eta_clamped = fit.eta_clamped;
    est.family = std::string(family.name());
    est.variant = opts.variant;
    est.level_ratio = opts.level_ratio;
    est.tuning = {k1, k2, k3, p};
    return est;
}

}  // namespace tailcovar

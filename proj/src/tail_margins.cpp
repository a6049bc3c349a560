#include "tailcovar/tail_margins.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tailcovar/error.hpp"

namespace tailcovar {

SortedSeries SortedSeries::from(std::span<const double> raw) {
    if (raw.size() < 3)
        throw Error(ErrorCode::TooShort, "need at least 3 observations, got " + std::to_string(raw.size()));
    std::vector<double> v(raw.begin(), raw.end());
    for (double x : v)
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "series contains NaN or infinity");
    std::stable_sort(v.begin(), v.end());
    return SortedSeries(std::move(v));
}

TailIndexEstimate hill(const SortedSeries& series, std::size_t k1) {
    const std::size_t n = series.size();
    if (k1 < 1 || k1 >= n)
        throw Error(ErrorCode::BadK, "k1 must lie in [1, n-1]; k1=" + std::to_string(k1) +
                                         ", n=" + std::to_string(n));
    const double threshold = series.order_stat(n - k1);
    if (!(threshold > 0.0))
        throw Error(ErrorCode::NonPositiveThreshold,
                    "Y_{n,n-k1} = " + std::to_string(threshold) + " is not positive");
    const double log_threshold = std::log(threshold);
    double acc = 0.0;
    for (std::size_t i = 1; i <= k1; ++i) acc += std::log(series.order_stat(n - i + 1)) - log_threshold;
    return {acc / double(k1), k1};
}

VarEstimate weissman_var(const SortedSeries& series, double gamma_hat, std::size_t k2, double p) {
    const std::size_t n = series.size();
    if (k2 < 1 || k2 >= n)
        throw Error(ErrorCode::BadK, "k2 must lie in [1, n-1]; k2=" + std::to_string(k2) +
                                         ", n=" + std::to_string(n));
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadLevel, "p must lie in (0,1)");
    const double base = series.order_stat(n - k2);
    const double factor = std::pow(double(k2) / (double(n) * p), gamma_hat);
    return {p, base * factor, k2};
}

}  // namespace tailcovar

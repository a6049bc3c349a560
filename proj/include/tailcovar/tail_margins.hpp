#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailcovar {

/// Ascending copy of a loss series. Order statistics are addressed 1-based,
/// matching the usual Y_{n,1} <= ... <= Y_{n,n} notation.
class SortedSeries {
public:
    /// Throws NonFinite on NaN/inf and TooShort when fewer than 3 values.
    static SortedSeries from(std::span<const double> raw);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    /// i-th smallest value, 1 <= i <= n.
    double order_stat(std::size_t i) const { return values_.at(i - 1); }

private:
    explicit SortedSeries(std::vector<double> v) : values_(std::move(v)) {}
    std::vector<double> values_;
};

struct TailIndexEstimate {
    double gamma_hat = 0.0;
    std::size_t k1 = 0;
};

struct VarEstimate {
    double level_p = 0.0;
    double value = 0.0;
    std::size_t k2 = 0;
};

/// Hill estimator over the k1 largest values, threshold Y_{n,n-k1}.
TailIndexEstimate hill(const SortedSeries& series, std::size_t k1);

/// Weissman extrapolation Y_{n,n-k2} * (k2 / (n p))^gamma_hat.
VarEstimate weissman_var(const SortedSeries& series, double gamma_hat, std::size_t k2, double p);

}  // namespace tailcovar

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace tailcovar {

// ---------------------------------------------------------------------------
// Scalar root bracketing
// ---------------------------------------------------------------------------

/// Bisection on [lo, hi] for a function that changes sign on the bracket.
/// When the bracket spans several orders of magnitude on the positive axis the
/// split point is the geometric mean, so brackets like [1e-300, 1] resolve in
/// a few dozen steps. Stops once hi - lo <= rel_tol * |mid|.
/// Returns nullopt when f(lo) and f(hi) have the same strict sign.
template <class F>
std::optional<double> bisect(F&& f, double lo, double hi, double rel_tol = 1e-12,
                             int max_iter = 4000) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi)) return std::nullopt;
    for (int it = 0; it < max_iter; ++it) {
        double mid = (lo > 0.0 && hi > 4.0 * lo) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= rel_tol * std::abs(0.5 * (lo + hi))) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Derivative-free minimisation
// ---------------------------------------------------------------------------

struct SimplexOptions {
    double xtol = 1e-8;   // max vertex distance from the best vertex
    double ftol = 1e-8;   // spread of objective values over the simplex
    int max_iter = 500;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead with standard coefficients (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Bounds are the caller's business: wrap the
/// objective with a projection if needed.
SimplexResult nelder_mead(const Objective& f, std::span<const double> start,
                          std::span<const double> step, const SimplexOptions& opts = {});

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Pairwise summation; result does not depend on thread scheduling as long as
/// the input order is fixed.
double pairwise_sum(std::span<const double> xs);

double mean(std::span<const double> xs);

/// Sample standard deviation with divisor n - 1 (0 for n < 2).
double sample_sd(std::span<const double> xs);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mersenne twister seeded through splitmix64 so nearby seeds (seed + rep)
/// produce unrelated streams. uniform() maps the top 53 bits onto the open
/// interval (0, 1); the conversion is spelled out rather than delegated to
/// std::uniform_real_distribution so draws are identical across standard
/// libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli_half() noexcept { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tailcovar

#include "tailcovar/numerics.hpp"

#include <algorithm>
#include <numeric>

#include <boost/math/special_functions/erf.hpp>

#include "tailcovar/error.hpp"

namespace tailcovar {

SimplexResult nelder_mead(const Objective& f, std::span<const double> start,
                          std::span<const double> step, const SimplexOptions& opts) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step[i];
    std::vector<double> vals(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    auto affine = [&](double t, std::vector<double>& out) {
        // out = centroid + t * (centroid - worst)
        const auto& worst = pts[order[dim]];
        for (std::size_t i = 0; i < dim; ++i) out[i] = centroid[i] + t * (centroid[i] - worst[i]);
    };

    SimplexResult res;
    for (int it = 0; it < opts.max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const auto& best = pts[order[0]];
        double spread = vals[order[dim]] - vals[order[0]];
        double diam = 0.0;
        for (std::size_t v = 1; v <= dim; ++v)
            for (std::size_t i = 0; i < dim; ++i)
                diam = std::max(diam, std::abs(pts[order[v]][i] - best[i]));
        res.iterations = it;
        if (diam <= opts.xtol && spread <= opts.ftol) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v < dim; ++v)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[order[v]][i] / double(dim);

        affine(1.0, trial);
        double fr = f(trial);
        if (fr < vals[order[0]]) {
            affine(2.0, trial2);
            double fe = f(trial2);
            if (fe < fr) {
                pts[order[dim]] = trial2;
                vals[order[dim]] = fe;
            } else {
                pts[order[dim]] = trial;
                vals[order[dim]] = fr;
            }
            continue;
        }
        if (fr < vals[order[dim - 1]]) {
            pts[order[dim]] = trial;
            vals[order[dim]] = fr;
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        bool outside = fr < vals[order[dim]];
        affine(outside ? 0.5 : -0.5, trial2);
        double fc = f(trial2);
        if (fc < (outside ? fr : vals[order[dim]])) {
            pts[order[dim]] = trial2;
            vals[order[dim]] = fc;
            continue;
        }
        for (std::size_t v = 1; v <= dim; ++v) {
            auto& p = pts[order[v]];
            for (std::size_t i = 0; i < dim; ++i) p[i] = best[i] + 0.5 * (p[i] - best[i]);
            vals[order[v]] = f(p);
        }
    }
    auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadLevel, "normal_quantile needs p in (0,1)");
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    return pairwise_sum(xs) / double(xs.size());
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean(xs);
    std::vector<double> sq(xs.size());
    std::transform(xs.begin(), xs.end(), sq.begin(), [m](double x) { return (x - m) * (x - m); });
    return std::sqrt(pairwise_sum(sq) / double(xs.size() - 1));
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace tailcovar

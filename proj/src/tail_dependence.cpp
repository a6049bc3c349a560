#include "tailcovar/tail_dependence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tailcovar/error.hpp"
#include "tailcovar/numerics.hpp"

namespace tailcovar {

namespace {

std::vector<std::size_t> ranks_of(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<std::size_t> rank(v.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
    return rank;
}

std::size_t floor_index(std::size_t k3, double x) {
    return static_cast<std::size_t>(std::floor(double(k3) * x));
}

// Integral of (x ∧ y)^a over [0,X] x [0,Y].
double min_power_corner(double X, double Y, double a) {
    double lo = std::min(X, Y);
    double hi = std::max(X, Y);
    if (lo <= 0.0) return 0.0;
    return hi * std::pow(lo, a + 1.0) / (a + 1.0) - a * std::pow(lo, a + 2.0) / ((a + 1.0) * (a + 2.0));
}

void check_theta(const TailFamily& family, std::span<const double> theta) {
    if (theta.size() != family.param_dim() || !family.box().contains(theta))
        throw Error(ErrorCode::ThetaOutOfBox, "theta outside the parameter box of " + std::string(family.name()));
}

}  // namespace

RankedPairs rank_pairs(const PairedSample& sample) {
    if (sample.x.size() != sample.y.size())
        throw Error(ErrorCode::BadInput, "x and y have different lengths");
    if (sample.size() < 2) throw Error(ErrorCode::TooShort, "need at least 2 pairs");
    auto constant = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
    };
    return {sample.size(), ranks_of(sample.x), ranks_of(sample.y), constant(sample.x) || constant(sample.y)};
}

double empirical_q(const RankedPairs& ranks, std::size_t k3, double x, double y) {
    const std::size_t n = ranks.n;
    if (k3 < 1 || k3 > n) throw Error(ErrorCode::BadK, "k3 must lie in [1, n]");
    if (x <= 0.0 || y <= 0.0) return 0.0;
    const std::size_t wx = floor_index(k3, x);
    const std::size_t wy = floor_index(k3, y);
    if (wx > n || wy > n) throw Error(ErrorCode::BadK, "floor(k3 * x) exceeds n");
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (n + 1 - ranks.rank_x[i] <= wx && n + 1 - ranks.rank_y[i] <= wy) ++count;
    return double(count) / double(n);
}

// ---------------------------------------------------------------------------

bool ParamBox::contains(std::span<const double> theta) const {
    if (theta.size() != lo.size()) return false;
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (!(theta[i] >= lo[i] && theta[i] <= hi[i])) return false;
    return true;
}

Theta ParamBox::clamp(std::span<const double> theta) const {
    Theta out(theta.begin(), theta.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
    return out;
}

double TailFamily::c_x(double, double, std::span<const double>) const {
    throw Error(ErrorCode::Unsupported, std::string(name()) + " does not provide c_x");
}

double TailFamily::c_y(double, double, std::span<const double>) const {
    throw Error(ErrorCode::Unsupported, std::string(name()) + " does not provide c_y");
}

std::optional<double> TailFamily::rectangle_integral(const Rect&, std::span<const double>) const {
    return std::nullopt;
}

double TailFamily::integrate(const Rect& r, std::span<const double> theta) const {
    if (auto exact = rectangle_integral(r, theta)) return *exact;
    using boost::math::quadrature::gauss_kronrod;
    constexpr double tol = 1e-10;
    constexpr unsigned depth = 10;
    auto inner = [&](double x) {
        return gauss_kronrod<double, 15>::integrate([&](double y) { return c(x, y, theta); }, r.y_lo, r.y_hi,
                                                    depth, tol);
    };
    return gauss_kronrod<double, 15>::integrate(inner, r.x_lo, r.x_hi, depth, tol);
}

// ---------------------------------------------------------------------------

double ParetoMixtureFamily::c(double x, double y, std::span<const double> theta) const {
    const double a = theta[0];
    return std::exp2(a - 1.0) * std::pow(std::min(x, y), a);
}

double ParetoMixtureFamily::c_x(double x, double y, std::span<const double> theta) const {
    const double a = theta[0];
    return x <= y ? std::exp2(a - 1.0) * a * std::pow(x, a - 1.0) : 0.0;
}

double ParetoMixtureFamily::c_y(double x, double y, std::span<const double> theta) const {
    return c_x(y, x, theta);
}

std::optional<double> ParetoMixtureFamily::rectangle_integral(const Rect& r, std::span<const double> theta) const {
    const double a = theta[0];
    double v = min_power_corner(r.x_hi, r.y_hi, a) - min_power_corner(r.x_lo, r.y_hi, a) -
               min_power_corner(r.x_hi, r.y_lo, a) + min_power_corner(r.x_lo, r.y_lo, a);
    return std::exp2(a - 1.0) * v;
}

double InvertedHuslerReissFamily::c(double x, double y, std::span<const double> theta) const {
    return std::pow(x * y, theta[0]);
}

double InvertedHuslerReissFamily::c_x(double x, double y, std::span<const double> theta) const {
    const double t = theta[0];
    return t * std::pow(x, t - 1.0) * std::pow(y, t);
}

double InvertedHuslerReissFamily::c_y(double x, double y, std::span<const double> theta) const {
    return c_x(y, x, theta);
}

std::optional<double> InvertedHuslerReissFamily::rectangle_integral(const Rect& r,
                                                                    std::span<const double> theta) const {
    const double e = theta[0] + 1.0;
    return (std::pow(r.x_hi, e) - std::pow(r.x_lo, e)) * (std::pow(r.y_hi, e) - std::pow(r.y_lo, e)) / (e * e);
}

std::shared_ptr<const TailFamily> make_family(std::string_view name) {
    if (name == "pareto-mixture" || name == "model1") return std::make_shared<ParetoMixtureFamily>();
    if (name == "ihr" || name == "model2") return std::make_shared<InvertedHuslerReissFamily>();
    throw Error(ErrorCode::BadSpec, "unknown family '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

WeightScheme WeightScheme::make(const TailFamily& family, std::vector<Rect> regions, Theta theta_ref) {
    if (regions.empty()) throw Error(ErrorCode::BadSpec, "weight scheme needs at least one region");
    check_theta(family, theta_ref);
    WeightScheme w;
    w.normalizers_.reserve(regions.size());
    for (const Rect& r : regions) {
        if (!(r.x_lo >= 0.0 && r.y_lo >= 0.0 && r.x_hi > r.x_lo && r.y_hi > r.y_lo))
            throw Error(ErrorCode::BadSpec, "region must satisfy 0 <= lo < hi in both coordinates");
        double a = family.integrate(r, theta_ref);
        if (!(a > 0.0)) throw Error(ErrorCode::BadSpec, "region has zero reference mass");
        w.normalizers_.push_back(a);
    }
    w.regions_ = std::move(regions);
    w.theta_ref_ = std::move(theta_ref);
    return w;
}

WeightScheme WeightScheme::from_json(const nlohmann::json& j, const TailFamily& family) {
    if (!j.contains("regions")) throw Error(ErrorCode::BadInput, "weight scheme: missing field 'regions'");
    if (!j.contains("theta_ref")) throw Error(ErrorCode::BadInput, "weight scheme: missing field 'theta_ref'");
    std::vector<Rect> regions;
    for (const auto& r : j.at("regions")) {
        if (!r.is_array() || r.size() != 4)
            throw Error(ErrorCode::BadInput, "weight scheme: each region is [x_lo, x_hi, y_lo, y_hi]");
        regions.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()});
    }
    Theta ref;
    const auto& t = j.at("theta_ref");
    if (t.is_number())
        ref.push_back(t.get<double>());
    else
        ref = t.get<Theta>();
    return make(family, std::move(regions), std::move(ref));
}

nlohmann::json WeightScheme::to_json() const {
    nlohmann::json regions = nlohmann::json::array();
    for (const Rect& r : regions_) regions.push_back({r.x_lo, r.x_hi, r.y_lo, r.y_hi});
    return {{"regions", regions}, {"theta_ref", theta_ref_}};
}

WeightScheme default_scheme(const TailFamily& family) {
    if (family.name() == "pareto-mixture") {
        return WeightScheme::make(family,
                                  {{0, 1, 0, 1}, {0, 0.8, 0, 1}, {0, 1, 0, 0.5}, {0, 0.5, 0, 0.3}, {0, 0.5, 0, 0.5}},
                                  {1.0});
    }
    if (family.name() == "ihr") {
        return WeightScheme::make(family,
                                  {{0, 1, 0, 1}, {0, 2, 0, 2}, {0.5, 1.5, 0.5, 1.5}, {0, 1, 0, 3}, {0, 3, 0, 1}},
                                  {0.6});
    }
    throw Error(ErrorCode::Unsupported, "no default weight scheme for family " + std::string(family.name()));
}

std::vector<double> moment_vector(const RankedPairs& ranks, std::size_t k3, const WeightScheme& scheme) {
    const std::size_t n = ranks.n;
    if (k3 < 1 || k3 > n) throw Error(ErrorCode::BadK, "k3 must lie in [1, n]");
    const double kd = double(k3);
    std::vector<double> out;
    out.reserve(scheme.size());
    for (std::size_t j = 0; j < scheme.size(); ++j) {
        const Rect& r = scheme.regions()[j];
        if (floor_index(k3, std::max(r.x_hi, r.y_hi)) > n)
            throw Error(ErrorCode::RegionTooLarge,
                        "region " + std::to_string(j + 1) + " needs floor(k3 * " +
                            std::to_string(std::max(r.x_hi, r.y_hi)) + ") <= n");
        // Observation i contributes on {x >= a_i / k3} x {y >= b_i / k3}, where
        // a_i, b_i are its descending ranks; integrate that quadrant over I_j.
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double ax = double(n + 1 - ranks.rank_x[i]) / kd;
            double by = double(n + 1 - ranks.rank_y[i]) / kd;
            double lx = r.x_hi - std::max(r.x_lo, ax);
            double ly = r.y_hi - std::max(r.y_lo, by);
            if (lx > 0.0 && ly > 0.0) acc += lx * ly;
        }
        out.push_back(acc / double(n) / scheme.normalizers()[j]);
    }
    return out;
}

std::vector<double> family_moment_vector(const TailFamily& family, std::span<const double> theta,
                                         const WeightScheme& scheme) {
    check_theta(family, theta);
    std::vector<double> out;
    out.reserve(scheme.size());
    for (std::size_t j = 0; j < scheme.size(); ++j)
        out.push_back(family.integrate(scheme.regions()[j], theta) / scheme.normalizers()[j]);
    return out;
}

double profile_zeta(std::span<const double> family_moments, std::span<const double> empirical_moments) {
    double fe = 0.0, ff = 0.0;
    for (std::size_t j = 0; j < family_moments.size(); ++j) {
        fe += family_moments[j] * empirical_moments[j];
        ff += family_moments[j] * family_moments[j];
    }
    double z = ff > 0.0 ? fe / ff : 0.0;
    return std::max(z, std::numeric_limits<double>::min());
}

double moment_objective(const TailFamily& family, std::span<const double> theta, const WeightScheme& scheme,
                        std::span<const double> empirical_moments) {
    auto mf = family_moment_vector(family, theta, scheme);
    double z = profile_zeta(mf, empirical_moments);
    double ss = 0.0;
    for (std::size_t j = 0; j < mf.size(); ++j) {
        double d = z * mf[j] - empirical_moments[j];
        ss += d * d;
    }
    return std::sqrt(ss);
}

FitResult fit_moments(std::span<const double> empirical_moments, const TailFamily& family,
                      const WeightScheme& scheme, const FitOptions& opts) {
    const std::size_t dim = family.param_dim();
    if (dim + 1 > scheme.size())
        throw Error(ErrorCode::BadSpec, "need at least param_dim + 1 moment regions");
    if (empirical_moments.size() != scheme.size())
        throw Error(ErrorCode::BadInput, "moment vector does not match the weight scheme");
    if (std::all_of(empirical_moments.begin(), empirical_moments.end(), [](double m) { return m == 0.0; }))
        throw Error(ErrorCode::DegenerateMoments, "empirical moments are all zero");

    const ParamBox box = family.box();
    // Outside the box the objective is evaluated at the projection plus the
    // distance to it, which pulls the simplex back inside.
    Objective objective = [&](std::span<const double> t) {
        Theta inside = box.clamp(t);
        double dist = 0.0;
        for (std::size_t i = 0; i < dim; ++i) dist += std::abs(t[i] - inside[i]);
        return moment_objective(family, inside, scheme, empirical_moments) + dist;
    };

    std::vector<double> step(dim);
    for (std::size_t i = 0; i < dim; ++i) step[i] = 0.1 * (box.hi[i] - box.lo[i]);
    SimplexOptions sopts{opts.tolerance, opts.tolerance, opts.max_iter};

    std::optional<SimplexResult> best;
    for (std::size_t s = 0; s < opts.starts; ++s) {
        std::vector<double> start(dim);
        for (std::size_t i = 0; i < dim; ++i)
            start[i] = box.lo[i] + (double(s) + 0.5) / double(opts.starts) * (box.hi[i] - box.lo[i]);
        SimplexResult r = nelder_mead(objective, start, step, sopts);
        if (!r.converged) continue;
        if (!best || r.value < best->value) best = std::move(r);
    }
    if (!best)
        throw Error(ErrorCode::NoConvergence,
                    "no simplex start converged within " + std::to_string(opts.max_iter) + " iterations");

    FitResult fit;
    fit.theta_hat = box.clamp(best->x);
    auto mf = family_moment_vector(family, fit.theta_hat, scheme);
    fit.zeta_hat = profile_zeta(mf, empirical_moments);
    fit.objective_value = moment_objective(family, fit.theta_hat, scheme, empirical_moments);
    fit.converged = true;
    double eta = family.eta(fit.theta_hat);
    constexpr double eta_floor = 0.5 + 1e-6;
    fit.eta_clamped = !(eta > 0.5 && eta <= 1.0);
    fit.eta_hat = std::clamp(eta, eta_floor, 1.0);
    return fit;
}

FitResult m_estimate(const RankedPairs& ranks, std::size_t k3, const TailFamily& family, const WeightScheme& scheme,
                     const FitOptions& opts) {
    if (ranks.constant_margin) throw Error(ErrorCode::DegenerateMoments, "a margin is constant");
    auto me = moment_vector(ranks, k3, scheme);
    FitResult fit = fit_moments(me, family, scheme, opts);
    fit.k3 = k3;
    return fit;
}

}  // namespace tailcovar

#include "tailcovar/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tailcovar/covar_core.hpp"
#include "tailcovar/error.hpp"
#include "tailcovar/numerics.hpp"

namespace tailcovar {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Husler-Reiss stable tail dependence function.
double hr_ell(double x, double y, double lambda) {
    if (x <= 0.0) return y;
    if (y <= 0.0) return x;
    if (std::isinf(lambda)) return x + y;
    const double d = (std::log(x) - std::log(y)) / (2.0 * lambda);
    return x * normal_cdf(lambda + d) + y * normal_cdf(lambda - d);
}

double hr_copula(double u, double v, double lambda) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    return std::exp(-hr_ell(-std::log(u), -std::log(v), lambda));
}

double log_normal_cdf(double z) { return std::log(normal_cdf(z)); }

// Unit Frechet value whose survival probability is exp(-y).
double frechet_from_neg_log_survival(double y) {
    const double log_cdf = y < 1.0 ? std::log(-std::expm1(-y)) : std::log1p(-std::exp(-y));
    return -1.0 / log_cdf;
}

double frechet_survival(double t) { return t <= 0.0 ? 1.0 : -std::expm1(-1.0 / t); }

double frechet_quantile(double q) { return -1.0 / std::log1p(-q); }

double model1_survival(double t, const Model1& m) {
    if (t <= 1.0) return 1.0;
    return 0.5 * std::pow(t, -1.0 / m.theta1) + 0.5 * std::pow(t, -1.0 / m.theta2);
}

double model1_quantile(double q, const Model1& m) {
    if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::BadLevel, "quantile level must lie in (0,1]");
    if (q == 1.0) return 1.0;
    // survival(t) <= t^(-1/max theta), so this upper end lies beyond the root
    const double hi = 2.0 * std::pow(q, -std::max(m.theta1, m.theta2));
    auto root = bisect([&](double t) { return model1_survival(t, m) - q; }, 1.0, hi, 1e-15);
    if (!root) throw Error(ErrorCode::NoRoot, "Model 1 quantile inversion failed");
    return *root;
}

double model1_joint(double s, double t, const Model1& m) {
    s = std::max(s, 1.0);
    t = std::max(t, 1.0);
    return 0.5 * std::pow(s, -1.0 / m.theta1) * std::pow(t, -1.0 / m.theta1) +
           0.5 * std::pow(std::max(s, t), -1.0 / m.theta2);
}

}  // namespace

double Model2::lambda() const {
    if (theta >= 1.0) return std::numeric_limits<double>::infinity();
    return normal_quantile(theta);
}

void validate(const ModelSpec& spec) {
    std::visit(overloaded{
                   [](const Model1& m) {
                       if (!(m.theta1 > 0.0 && m.theta2 > 0.0))
                           throw Error(ErrorCode::BadSpec, "model1 needs theta1 > 0 and theta2 > 0");
                       const double r = m.theta1 / m.theta2;
                       if (!(r > 1.5 && r < 2.0)) {
                           std::ostringstream os;
                           os << "model1 needs 3/2 < theta1/theta2 < 2 (got " << r << ")";
                           throw Error(ErrorCode::BadSpec, os.str());
                       }
                   },
                   [](const Model2& m) {
                       if (!(m.theta > 0.5 && m.theta <= 1.0))
                           throw Error(ErrorCode::BadSpec, "model2 needs theta in (1/2, 1]");
                   },
               },
               spec);
}

std::string describe(const ModelSpec& spec) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const Model1& m) { os << "Model 1 (" << m.theta1 << ", " << m.theta2 << ")"; },
                   [&](const Model2& m) { os << "Model 2 " << m.theta; },
               },
               spec);
    return os.str();
}

ModelSpec model_from_json(const nlohmann::json& j) {
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw Error(ErrorCode::BadInput, std::string("model: missing field '") + key + "'");
        return j.at(key);
    };
    const std::string type = need("type").get<std::string>();
    ModelSpec spec;
    if (type == "model1")
        spec = Model1{need("theta1").get<double>(), need("theta2").get<double>()};
    else if (type == "model2")
        spec = Model2{need("theta").get<double>()};
    else
        throw Error(ErrorCode::BadSpec, "model: unknown type '" + type + "'");
    validate(spec);
    return spec;
}

nlohmann::json to_json(const ModelSpec& spec) {
    return std::visit(overloaded{
                          [](const Model1& m) -> nlohmann::json {
                              return {{"type", "model1"}, {"theta1", m.theta1}, {"theta2", m.theta2}};
                          },
                          [](const Model2& m) -> nlohmann::json { return {{"type", "model2"}, {"theta", m.theta}}; },
                      },
                      spec);
}

PairedSample sample_model1(const Model1& spec, std::size_t n, std::uint64_t seed, const Model1SampleOptions& opts) {
    validate(spec);
    if (n < 1) throw Error(ErrorCode::BadSpec, "sample size must be positive");
    Rng rng(seed);
    PairedSample s;
    s.x.resize(n);
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool b = rng.bernoulli_half();
        double z1 = std::pow(rng.uniform(), -spec.theta1);
        double z3 = std::pow(rng.uniform(), -spec.theta1);
        double z2 = std::pow(rng.uniform(), -spec.theta2);
        if (opts.forced_branch) b = *opts.forced_branch;
        s.x[i] = b ? z1 : z2;
        s.y[i] = b ? z3 : z2;
    }
    return s;
}

PairedSample sample_model2(const Model2& spec, std::size_t n, std::uint64_t seed) {
    validate(spec);
    if (n < 1) throw Error(ErrorCode::BadSpec, "sample size must be positive");
    const double lambda = spec.lambda();
    Rng rng(seed);
    PairedSample s;
    s.x.resize(n);
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double w = rng.uniform();
        const double xs = -std::log(u);  // x = -log U
        double ys;
        if (std::isinf(lambda)) {
            ys = -std::log(w);
        } else {
            // log of dC/du at y = exp(t); decreasing in t.
            const double log_x = std::log(xs);
            const double log_u = std::log(u);
            const double log_w = std::log(w);
            auto g = [&](double t) {
                const double y = std::exp(t);
                return -hr_ell(xs, y, lambda) + log_normal_cdf(lambda + (log_x - t) / (2.0 * lambda)) - log_u - log_w;
            };
            double lo = -60.0, hi = 6.5;
            if (!(g(lo) > 0.0) || !(g(hi) < 0.0))
                throw Error(ErrorCode::RootFail, "conditional inversion did not bracket");
            for (int it = 0; it < 64; ++it) {
                double mid = 0.5 * (lo + hi);
                if (g(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            ys = std::exp(0.5 * (lo + hi));
        }
        s.x[i] = frechet_quantile(u);
        s.y[i] = frechet_from_neg_log_survival(ys);
    }
    return s;
}

PairedSample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    return std::visit(overloaded{
                          [&](const Model1& m) { return sample_model1(m, n, seed); },
                          [&](const Model2& m) { return sample_model2(m, n, seed); },
                      },
                      spec);
}

JointSurvival joint_survival(const ModelSpec& spec) {
    validate(spec);
    return std::visit(
        overloaded{
            [](const Model1& m) {
                JointSurvival js;
                js.joint = [m](double s, double t) { return model1_joint(s, t, m); };
                js.survival_x = [m](double t) { return model1_survival(t, m); };
                js.survival_y = js.survival_x;
                js.quantile_x = [m](double q) { return model1_quantile(q, m); };
                js.quantile_y = js.quantile_x;
                js.copula = [m](double u, double v) {
                    if (u <= 0.0 || v <= 0.0) return 0.0;
                    return model1_joint(model1_quantile(std::min(u, 1.0), m), model1_quantile(std::min(v, 1.0), m), m);
                };
                return js;
            },
            [](const Model2& m) {
                const double lambda = m.lambda();
                JointSurvival js;
                js.joint = [lambda](double s, double t) {
                    return hr_copula(frechet_survival(s), frechet_survival(t), lambda);
                };
                js.survival_x = frechet_survival;
                js.survival_y = frechet_survival;
                js.quantile_x = frechet_quantile;
                js.quantile_y = frechet_quantile;
                js.copula = [lambda](double u, double v) { return hr_copula(u, v, lambda); };
                return js;
            },
        },
        spec);
}

double adjustment_factor_exact(const ModelSpec& spec, double p) {
    return adjustment_factor_exact(joint_survival(spec).copula, p);
}

double true_covar(const ModelSpec& spec, double p) {
    const JointSurvival js = joint_survival(spec);
    const double eta_p = adjustment_factor_exact(js.copula, p);
    return js.quantile_y(p * eta_p);
}

}  // namespace tailcovar

#include "tailcovar/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "tailcovar/error.hpp"
#include "tailcovar/io.hpp"
#include "tailcovar/numerics.hpp"

namespace tailcovar {

namespace {

// floor that ignores representation noise such as 5000 * 0.05 = 250.00000000000003
std::size_t floor_count(double v) { return static_cast<std::size_t>(std::floor(v + 1e-9)); }

void check_level(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadLevel, "p must lie in (0,1)");
}

std::string family_for(const ModelSpec& model) {
    return std::holds_alternative<Model1>(model) ? "pareto-mixture" : "ihr";
}

const nlohmann::json& require(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::BadInput, std::string("config: missing field '") + key + "'");
    return j.at(key);
}

std::string mean_sd(double m, double sd) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << m << '(' << sd << ')';
    return os.str();
}

}  // namespace

double naive_covar(const PairedSample& sample, double p) {
    check_level(p);
    const std::size_t n = sample.size();
    const std::size_t m = floor_count(double(n) * p);
    if (m < 2) throw Error(ErrorCode::TooFewExceedances, "floor(n p) must be at least 2");
    std::vector<double> xs(sample.x);
    std::nth_element(xs.begin(), xs.begin() + (n - m), xs.end());
    const double threshold = xs[n - m];  // X_{n, n-m+1}
    std::vector<double> ys;
    for (std::size_t i = 0; i < n; ++i)
        if (sample.x[i] >= threshold) ys.push_back(sample.y[i]);
    std::sort(ys.begin(), ys.end());
    // same order-statistic rule as the X threshold: the floor(m p)-th largest
    const std::size_t mm = ys.size();
    const std::size_t top = std::max<std::size_t>(floor_count(double(mm) * p), 1);
    return ys[mm - top];
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.model = model_from_json(require(j, "model"));
    c.p = require(j, "p").get<double>();
    c.n = require(j, "n").get<std::size_t>();
    c.reps = require(j, "reps").get<std::size_t>();
    c.seed = require(j, "seed").get<std::uint64_t>();
    for (const auto& k : require(j, "k_grid")) {
        if (k.is_number_integer()) {
            auto v = k.get<std::size_t>();
            c.k_grid.push_back({v, v, v});
        } else if (k.is_array() && k.size() == 3) {
            c.k_grid.push_back({k[0].get<std::size_t>(), k[1].get<std::size_t>(), k[2].get<std::size_t>()});
        } else {
            throw Error(ErrorCode::BadInput, "config: k_grid entries are k or [k1, k2, k3]");
        }
    }
    if (j.contains("family")) c.family = j.at("family").get<std::string>();
    if (j.contains("scheme")) c.scheme = j.at("scheme");
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();

    check_level(c.p);
    if (c.reps < 1) throw Error(ErrorCode::BadInput, "config: reps must be at least 1");
    if (c.k_grid.empty()) throw Error(ErrorCode::BadInput, "config: k_grid is empty");
    for (const auto& k : c.k_grid)
        if (k.k1 < 1 || k.k2 < 1 || k.k3 < 1 || k.k1 >= c.n || k.k2 >= c.n || k.k3 >= c.n)
            throw Error(ErrorCode::BadK, "config: every k must lie in [1, n-1]");
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& k : k_grid) grid.push_back({k.k1, k.k2, k.k3});
    nlohmann::json j = {{"model", tailcovar::to_json(model)}, {"p", p}, {"n", n}, {"reps", reps},
                        {"k_grid", grid}, {"seed", seed}, {"threads", threads}};
    if (!family.empty()) j["family"] = family;
    if (scheme) j["scheme"] = *scheme;
    if (!output.empty()) j["output"] = output;
    return j;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& s : per_k)
        per.push_back({{"k1", s.k.k1}, {"k2", s.k.k2}, {"k3", s.k.k3}, {"mean", s.mean}, {"sd", s.sd},
                       {"estimates", s.estimates}});
    return {{"model", tailcovar::to_json(model)},
            {"p", p},
            {"n", n},
            {"reps", reps},
            {"seed", seed},
            {"true_value", true_value},
            {"proposed", per},
            {"naive", {{"mean", naive_mean}, {"sd", naive_sd}, {"estimates", naive_estimates}}}};
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    os << "rep,estimator,k1,k2,k3,value\n";
    for (std::size_t r = 0; r < reps; ++r) {
        for (const auto& s : per_k)
            os << r << ",proposed," << s.k.k1 << ',' << s.k.k2 << ',' << s.k.k3 << ','
               << io::format_double(s.estimates[r]) << '\n';
        os << r << ",naive,0,0,0," << io::format_double(naive_estimates[r]) << '\n';
    }
    return os.str();
}

std::string ExperimentReport::summary() const {
    std::ostringstream os;
    os << "model\ttrue";
    for (const auto& s : per_k) os << "\tk=" << s.k.k1 << '/' << s.k.k2 << '/' << s.k.k3;
    os << "\tnaive\n";
    std::ostringstream tv;
    tv.setf(std::ios::fixed);
    tv.precision(2);
    tv << true_value;
    os << describe(model) << '\t' << tv.str();
    for (const auto& s : per_k) os << '\t' << mean_sd(s.mean, s.sd);
    os << '\t' << mean_sd(naive_mean, naive_sd) << '\n';
    return os.str();
}

ExperimentReport run_table1(const ExperimentConfig& config) {
    validate(config.model);
    check_level(config.p);
    if (config.reps < 1) throw Error(ErrorCode::BadInput, "reps must be at least 1");

    const auto family = make_family(config.family.empty() ? family_for(config.model) : config.family);
    const WeightScheme scheme =
        config.scheme ? WeightScheme::from_json(*config.scheme, *family) : default_scheme(*family);

    ExperimentReport report;
    report.model = config.model;
    report.p = config.p;
    report.n = config.n;
    report.reps = config.reps;
    report.seed = config.seed;
    report.true_value = true_covar(config.model, config.p);
    report.per_k.resize(config.k_grid.size());
    for (std::size_t i = 0; i < config.k_grid.size(); ++i) {
        report.per_k[i].k = config.k_grid[i];
        report.per_k[i].estimates.assign(config.reps, 0.0);
    }
    report.naive_estimates.assign(config.reps, 0.0);

    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::size_t err_rep = config.reps;
    std::exception_ptr err;

    auto worker = [&] {
        for (std::size_t r = next++; r < config.reps; r = next++) {
            try {
                const PairedSample sample = sample_model(config.model, config.n, config.seed + r);
                for (std::size_t i = 0; i < config.k_grid.size(); ++i) {
                    const KTriple& k = config.k_grid[i];
                    report.per_k[i].estimates[r] =
                        covar_estimate(sample, config.p, k.k1, k.k2, k.k3, *family, scheme).covar_hat;
                }
                report.naive_estimates[r] = naive_covar(sample, config.p);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (r < err_rep) {
                    err_rep = r;
                    err = std::current_exception();
                }
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.reps));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (err) std::rethrow_exception(err);

    for (auto& s : report.per_k) {
        s.mean = mean(s.estimates);
        s.sd = sample_sd(s.estimates);
    }
    report.naive_mean = mean(report.naive_estimates);
    report.naive_sd = sample_sd(report.naive_estimates);
    return report;
}

// ---------------------------------------------------------------------------

std::vector<EtaScanPoint> eta_scan(const PairedSample& sample, const TailFamily& family, const WeightScheme& scheme,
                                   std::span<const std::size_t> k3_grid) {
    const RankedPairs ranks = rank_pairs(sample);
    std::vector<EtaScanPoint> out;
    out.reserve(k3_grid.size());
    for (std::size_t k3 : k3_grid) {
        EtaScanPoint pt;
        pt.k3 = k3;
        try {
            if (k3 >= ranks.n) throw Error(ErrorCode::BadK, "k3 must be below n");
            pt.eta_hat = m_estimate(ranks, k3, family, scheme).eta_hat;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ForecastRecord> dynamic_covar(std::span<const ResidualPair> residuals,
                                          std::span<const ConditionalMoments> moments, const TailFamily& family,
                                          const WeightScheme& scheme, const DynamicConfig& config) {
    if (config.window < 3) throw Error(ErrorCode::WindowTooShort, "window must hold at least 3 residuals");
    if (config.refresh_every < 1) throw Error(ErrorCode::BadInput, "refresh_every must be at least 1");
    if (residuals.size() < config.window)
        throw Error(ErrorCode::WindowTooShort, "only " + std::to_string(residuals.size()) +
                                                   " residuals for a window of " + std::to_string(config.window));

    std::vector<ForecastRecord> out;
    double held = 0.0;
    for (std::size_t t = config.window; t < moments.size(); ++t) {
        const ConditionalMoments& m = moments[t];
        if (!(m.sigma_y > 0.0)) throw Error(ErrorCode::BadInput, "sigma_y must be positive at t=" + std::to_string(t));
        ForecastRecord rec;
        rec.t = t;
        rec.mu_y = m.mu_y;
        rec.sigma_y = m.sigma_y;
        if (t < residuals.size()) rec.residual = residuals[t];
        if ((t - config.window) % config.refresh_every == 0) {
            if (t > residuals.size())
                throw Error(ErrorCode::WindowTooShort, "residual history ends before t=" + std::to_string(t));
            PairedSample window;
            window.x.reserve(config.window);
            window.y.reserve(config.window);
            for (std::size_t s = t - config.window; s < t; ++s) {
                window.x.push_back(residuals[s].zx);
                window.y.push_back(residuals[s].zy);
            }
            held = covar_estimate(window, config.p, config.k1, config.k2, config.k3, family, scheme, config.estimate)
                       .covar_hat;
            rec.refreshed = true;
        }
        rec.residual_covar = held;
        rec.covar = m.mu_y + m.sigma_y * held;
        out.push_back(rec);
    }
    return out;
}

double quantile_score(double forecast, double observation, double p) {
    const double hit = observation > forecast ? 1.0 : 0.0;
    return (p - hit) * forecast + hit * observation;
}

ScoreSeries score_series(std::span<const double> forecasts, std::span<const double> observations, double p) {
    if (forecasts.size() != observations.size())
        throw Error(ErrorCode::BadInput, "forecasts and observations differ in length");
    ScoreSeries s;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        s.times.push_back(i);
        s.scores.push_back(quantile_score(forecasts[i], observations[i], p));
    }
    s.count = s.scores.size();
    s.average = mean(s.scores);
    return s;
}

std::vector<double> rolling_empirical_var(std::span<const double> x, std::size_t window, double p) {
    check_level(p);
    if (window < 1 || x.size() < window) throw Error(ErrorCode::WindowTooShort, "series shorter than the window");
    const std::size_t top = std::max<std::size_t>(floor_count(double(window) * p), 1);
    const std::size_t idx = window - top + 1;
    std::vector<double> out;
    std::vector<double> buf(window);
    for (std::size_t t = window; t <= x.size(); ++t) {
        std::copy(x.begin() + (t - window), x.begin() + t, buf.begin());
        std::nth_element(buf.begin(), buf.begin() + (idx - 1), buf.end());
        out.push_back(buf[idx - 1]);
    }
    return out;
}

ScoreSeries score_distress_events(std::span<const ForecastRecord> forecasts, std::span<const double> x,
                                  std::span<const double> y, std::size_t window, double p) {
    if (x.size() != y.size()) throw Error(ErrorCode::BadInput, "x and y differ in length");
    const std::vector<double> var = rolling_empirical_var(x, window, p);
    ScoreSeries s;
    for (const ForecastRecord& f : forecasts) {
        if (f.t < window || f.t >= x.size()) continue;
        if (!(x[f.t] > var[f.t - window])) continue;
        s.times.push_back(f.t);
        s.scores.push_back(quantile_score(f.covar, y[f.t], p));
    }
    s.count = s.scores.size();
    s.average = mean(s.scores);
    return s;
}

}  // namespace tailcovar

// Command-line front end: simulate | estimate | oracle | table1 | eta-scan | forecast | score.
// Exit codes: 0 ok, 1 runtime failure, 2 usage error. Payload on stdout, diagnostics on stderr.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tailcovar/covar_core.hpp"
#include "tailcovar/error.hpp"
#include "tailcovar/experiments.hpp"
#include "tailcovar/io.hpp"
#include "tailcovar/models.hpp"
#include "tailcovar/tail_dependence.hpp"

using namespace tailcovar;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelFlags {
    std::string model;
    double theta1 = 0.85;
    double theta2 = 0.45;
    double theta = 0.93;

    void add(CLI::App* app) {
        app->add_option("--model", model, "model1 | model2")->required()->check(CLI::IsMember({"model1", "model2"}));
        app->add_option("--theta1", theta1, "Model 1 Pareto index of Z1, Z3");
        app->add_option("--theta2", theta2, "Model 1 Pareto index of Z2");
        app->add_option("--theta", theta, "Model 2 dependence parameter Phi(lambda)");
    }

    ModelSpec spec() const {
        ModelSpec s = model == "model1" ? ModelSpec{Model1{theta1, theta2}} : ModelSpec{Model2{theta}};
        try {
            validate(s);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return s;
    }
};

struct FamilyFlags {
    std::string family;
    std::string scheme_path;

    void add(CLI::App* app) {
        app->add_option("--family", family, "pareto-mixture | ihr (aliases model1 | model2)")->required();
        app->add_option("--scheme", scheme_path, "weight scheme JSON (default: built-in scheme of the family)");
    }

    std::shared_ptr<const TailFamily> make() const {
        try {
            return make_family(family);
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }

    WeightScheme scheme(const TailFamily& fam) const {
        if (scheme_path.empty()) return default_scheme(fam);
        std::ifstream in(scheme_path);
        if (!in) throw UsageError("cannot open scheme file '" + scheme_path + "'");
        return WeightScheme::from_json(nlohmann::json::parse(in), fam);
    }
};

PairedSample read_input(const std::string& path) {
    return path == "-" ? io::read_pairs(std::cin) : io::read_pairs_file(path);
}

void check_k(const char* name, std::size_t k, std::size_t n) {
    if (k < 1 || k >= n)
        throw UsageError(std::string(name) + " = " + std::to_string(k) + " must lie in [1, n-1] with n = " +
                         std::to_string(n));
}

void write_text(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadInput, "cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extreme-value CoVaR estimation for asymptotically independent loss pairs"};
    app.require_subcommand(1, 1);

    // simulate
    ModelFlags sim_model;
    std::size_t sim_n = 5000;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "-";
    auto* sim = app.add_subcommand("simulate", "draw a sample from Model 1 or Model 2 as x,y CSV");
    sim_model.add(sim);
    sim->add_option("--n", sim_n, "sample size")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "output path, - for stdout");

    // estimate
    std::string est_in = "-";
    double est_p = 0.05;
    std::size_t est_k1 = 0, est_k2 = 0, est_k3 = 0;
    FamilyFlags est_family;
    std::string est_variant = "exceedance";
    double est_ratio = 1.0;
    auto* est = app.add_subcommand("estimate", "estimate CoVaR from an x,y CSV; prints JSON");
    est->add_option("--input", est_in, "x,y CSV, - for stdin");
    est->add_option("--p", est_p, "risk level")->required();
    est->add_option("--k1", est_k1, "Hill sample fraction")->required();
    est->add_option("--k2", est_k2, "Weissman sample fraction")->required();
    est->add_option("--k3", est_k3, "tail dependence sample fraction")->required();
    est_family.add(est);
    est->add_option("--variant", est_variant,
                    "exceedance | exceedance-two-level | equality | equality-two-level");
    est->add_option("--level-ratio", est_ratio, "C = q / p for the two-level variants");

    // oracle
    ModelFlags orc_model;
    double orc_p = 0.05;
    auto* orc = app.add_subcommand("oracle", "exact adjustment factor and true CoVaR of a model; prints JSON");
    orc_model.add(orc);
    orc->add_option("--p", orc_p, "risk level")->required();

    // table1
    std::string t1_config;
    std::string t1_out;
    unsigned t1_threads = 0;
    std::optional<std::size_t> t1_reps;
    std::optional<std::uint64_t> t1_seed;
    auto* t1 = app.add_subcommand("table1", "Monte Carlo comparison of the proposed and naive estimators");
    t1->add_option("--config", t1_config, "experiment config JSON")->required();
    t1->add_option("--out", t1_out, "output prefix (overrides config 'output')");
    t1->add_option("--threads", t1_threads, "cap on worker threads");
    t1->add_option("--reps", t1_reps, "override the repetition count");
    t1->add_option("--seed", t1_seed, "override the seed");

    // eta-scan
    std::string scan_in = "-";
    std::vector<std::size_t> scan_grid;
    FamilyFlags scan_family;
    auto* scan = app.add_subcommand("eta-scan", "eta_hat as a function of k3; prints k3,eta_hat CSV");
    scan->add_option("--input", scan_in, "x,y CSV, - for stdin");
    scan->add_option("--k3", scan_grid, "k3 values")->required()->delimiter(',');
    scan_family.add(scan);

    // forecast
    std::string fc_res, fc_mom;
    DynamicConfig fc_cfg;
    FamilyFlags fc_family;
    auto* fc = app.add_subcommand("forecast", "rolling dynamic CoVaR forecasts; prints t,mu,sigma,covar CSV");
    fc->add_option("--residuals", fc_res, "zx,zy residual CSV")->required();
    fc->add_option("--moments", fc_mom, "mu,sigma CSV (conditional mean and scale of y)")->required();
    fc->add_option("--window", fc_cfg.window, "rolling window length");
    fc->add_option("--refresh-every", fc_cfg.refresh_every, "re-estimation cadence");
    fc->add_option("--p", fc_cfg.p, "risk level");
    fc->add_option("--k1", fc_cfg.k1, "Hill sample fraction")->required();
    fc->add_option("--k2", fc_cfg.k2, "Weissman sample fraction")->required();
    fc->add_option("--k3", fc_cfg.k3, "tail dependence sample fraction")->required();
    fc_family.add(fc);

    // score
    std::string sc_fc, sc_obs;
    std::size_t sc_window = 3000;
    double sc_p = 0.05;
    auto* sc = app.add_subcommand("score", "average quantile score on distress days; prints JSON");
    sc->add_option("--forecasts", sc_fc, "t,...,covar CSV from forecast")->required();
    sc->add_option("--observations", sc_obs, "x,y loss CSV indexed by t")->required();
    sc->add_option("--window", sc_window, "rolling window for the empirical VaR of x");
    sc->add_option("--p", sc_p, "risk level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sim) {
            ModelSpec spec = sim_model.spec();
            PairedSample s = sample_model(spec, sim_n, sim_seed);
            if (sim_out == "-") {
                io::write_pairs(std::cout, s);
            } else {
                std::ostringstream os;
                io::write_pairs(os, s);
                write_text(sim_out, os.str());
            }
        } else if (*est) {
            auto fam = est_family.make();
            AdjustmentVariant variant;
            try {
                variant = parse_variant(est_variant);
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            PairedSample s = read_input(est_in);
            check_k("k1", est_k1, s.size());
            check_k("k2", est_k2, s.size());
            check_k("k3", est_k3, s.size());
            WeightScheme scheme = est_family.scheme(*fam);
            EstimateOptions opts;
            opts.variant = variant;
            opts.level_ratio = est_ratio;
            CovarEstimate e = covar_estimate(s, est_p, est_k1, est_k2, est_k3, *fam, scheme, opts);
            std::cout << e.to_json().dump(2) << '\n';
        } else if (*orc) {
            ModelSpec spec = orc_model.spec();
            nlohmann::json j = {{"model", to_json(spec)},
                                {"p", orc_p},
                                {"eta_p", adjustment_factor_exact(spec, orc_p)},
                                {"true_covar", true_covar(spec, orc_p)}};
            std::cout << j.dump(2) << '\n';
        } else if (*t1) {
            std::ifstream in(t1_config);
            if (!in) throw UsageError("cannot open config '" + t1_config + "'");
            ExperimentConfig cfg;
            try {
                cfg = ExperimentConfig::from_json(nlohmann::json::parse(in));
            } catch (const Error& e) {
                throw UsageError(e.what());
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(std::string("config: ") + e.what());
            }
            if (!t1_out.empty()) cfg.output = t1_out;
            if (t1_threads) cfg.threads = t1_threads;
            if (t1_reps) cfg.reps = *t1_reps;
            if (t1_seed) cfg.seed = *t1_seed;
            ExperimentReport rep = run_table1(cfg);
            if (!cfg.output.empty()) {
                write_text(cfg.output + ".json", rep.to_json().dump(2) + "\n");
                write_text(cfg.output + ".csv", rep.to_csv());
            }
            std::cout << rep.summary();
        } else if (*scan) {
            auto fam = scan_family.make();
            PairedSample s = read_input(scan_in);
            WeightScheme scheme = scan_family.scheme(*fam);
            std::cout << "k3,eta_hat\n";
            for (const auto& pt : eta_scan(s, *fam, scheme, scan_grid)) {
                std::cout << pt.k3 << ',' << (pt.eta_hat ? io::format_double(*pt.eta_hat) : "nan") << '\n';
                if (!pt.eta_hat) std::cerr << "k3=" << pt.k3 << ": " << pt.error << '\n';
            }
        } else if (*fc) {
            auto fam = fc_family.make();
            WeightScheme scheme = fc_family.scheme(*fam);
            io::Table rt = io::read_csv_file(fc_res);
            io::Table mt = io::read_csv_file(fc_mom);
            std::vector<ResidualPair> res;
            auto zx = rt.values("zx"), zy = rt.values("zy");
            for (std::size_t i = 0; i < zx.size(); ++i) res.push_back({zx[i], zy[i]});
            std::vector<ConditionalMoments> mom;
            auto mu = mt.values("mu"), sg = mt.values("sigma");
            for (std::size_t i = 0; i < mu.size(); ++i) mom.push_back({mu[i], sg[i]});
            auto records = dynamic_covar(res, mom, *fam, scheme, fc_cfg);
            std::cout << "t,mu,sigma,covar\n";
            for (const auto& r : records)
                std::cout << r.t << ',' << io::format_double(r.mu_y) << ',' << io::format_double(r.sigma_y) << ','
                          << io::format_double(r.covar) << '\n';
        } else if (*sc) {
            io::Table ft = io::read_csv_file(sc_fc);
            io::Table ot = io::read_csv_file(sc_obs);
            std::vector<ForecastRecord> fcs;
            auto ts = ft.values("t"), cv = ft.values("covar");
            for (std::size_t i = 0; i < ts.size(); ++i) {
                ForecastRecord r;
                r.t = static_cast<std::size_t>(ts[i]);
                r.covar = cv[i];
                fcs.push_back(r);
            }
            auto x = ot.values("x"), y = ot.values("y");
            ScoreSeries s = score_distress_events(fcs, x, y, sc_window, sc_p);
            nlohmann::json j = {{"average", s.average}, {"count", s.count}, {"times", s.times}, {"scores", s.scores}};
            std::cout << j.dump(2) << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

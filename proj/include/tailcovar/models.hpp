#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "tailcovar/sample.hpp"

namespace tailcovar {

/// (X, Y) = B (Z1, Z3) + (1 - B) (Z2, Z2) with B ~ Bernoulli(1/2) and
/// independent Pareto Z1, Z3 (index theta1) and Z2 (index theta2); Pareto(t)
/// has survival x^(-1/t) on (1, inf). Valid when 3/2 < theta1/theta2 < 2.
struct Model1 {
    double theta1 = 0.85;
    double theta2 = 0.45;
};

/// Inverted Husler-Reiss pair with unit Frechet margins; theta = Phi(lambda)
/// in (1/2, 1], theta = 1 being exact independence.
struct Model2 {
    double theta = 0.93;

    double lambda() const;
};

using ModelSpec = std::variant<Model1, Model2>;

/// Throws BadSpec with a message naming the violated constraint.
void validate(const ModelSpec& spec);

std::string describe(const ModelSpec& spec);

/// {"type": "model1", "theta1": .., "theta2": ..} or {"type": "model2", "theta": ..}
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelSpec& spec);

struct Model1SampleOptions {
    std::optional<bool> forced_branch;  // override B (true -> independent branch)
};

PairedSample sample_model1(const Model1& spec, std::size_t n, std::uint64_t seed,
                           const Model1SampleOptions& opts = {});

/// Conditional inversion of the survival copula: for U ~ U(0,1) and
/// W ~ U(0,1), V solves dC(U, V)/du = W; margins are then mapped to unit
/// Frechet through X = -1 / log(1 - U).
PairedSample sample_model2(const Model2& spec, std::size_t n, std::uint64_t seed);

PairedSample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

/// Analytic survival functions of a model. copula(u, v) is Q, the joint
/// distribution function of the marginal survival probabilities
/// (1 - F_1(X), 1 - F_2(Y)).
struct JointSurvival {
    std::function<double(double, double)> joint;
    std::function<double(double)> survival_x;
    std::function<double(double)> survival_y;
    std::function<double(double)> quantile_x;  // VaR_X(q): survival_x(VaR) = q
    std::function<double(double)> quantile_y;
    std::function<double(double, double)> copula;
};

JointSurvival joint_survival(const ModelSpec& spec);

/// Root s of Q(p, p s) = p^2 for the model's analytic Q.
double adjustment_factor_exact(const ModelSpec& spec, double p);

/// VaR_Y(p * eta_p) with eta_p the exact adjustment factor.
double true_covar(const ModelSpec& spec, double p);

}  // namespace tailcovar

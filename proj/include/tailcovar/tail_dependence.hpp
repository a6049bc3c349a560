#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tailcovar/sample.hpp"

namespace tailcovar {

using Theta = std::vector<double>;

// ---------------------------------------------------------------------------
// Ranks and the empirical tail measure
// ---------------------------------------------------------------------------

/// Marginal ranks, n = largest. Ties go to the earlier observation first, so
/// of two equal values the one appearing first receives the smaller rank.
struct RankedPairs {
    std::size_t n = 0;
    std::vector<std::size_t> rank_x;
    std::vector<std::size_t> rank_y;
    bool constant_margin = false;  // one margin has no distinct values
};

RankedPairs rank_pairs(const PairedSample& sample);

/// Rank-based estimate of the joint tail measure at (x, y):
///   (1/n) #{ i : rank_x[i] >= n + 1 - floor(k3 x), rank_y[i] >= n + 1 - floor(k3 y) }.
/// Throws BadK if k3 is outside [1, n] or floor(k3 * max(x, y)) > n.
double empirical_q(const RankedPairs& ranks, std::size_t k3, double x, double y);

// ---------------------------------------------------------------------------
// Parametric tail families
// ---------------------------------------------------------------------------

struct Rect {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
};

struct ParamBox {
    std::vector<double> lo;
    std::vector<double> hi;

    bool contains(std::span<const double> theta) const;
    Theta clamp(std::span<const double> theta) const;
};

/// A parametric family c(x, y; theta) for the limit of scaled joint tail
/// probabilities. c is homogeneous of order 1 / eta(theta).
class TailFamily {
public:
    virtual ~TailFamily() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t param_dim() const = 0;
    virtual ParamBox box() const = 0;
    virtual double c(double x, double y, std::span<const double> theta) const = 0;
    virtual double eta(std::span<const double> theta) const = 0;

    /// Partial derivatives. The defaults throw Unsupported.
    virtual double c_x(double x, double y, std::span<const double> theta) const;
    virtual double c_y(double x, double y, std::span<const double> theta) const;

    /// Exact integral of c over a rectangle when the family has one; the
    /// generic path falls back to adaptive quadrature.
    virtual std::optional<double> rectangle_integral(const Rect& r, std::span<const double> theta) const;

    /// Either rectangle_integral or nested adaptive Gauss-Kronrod quadrature
    /// (relative tolerance 1e-10, depth 10 per level). Kinks such as x ∧ y
    /// limit the fallback to about 1e-7.
    double integrate(const Rect& r, std::span<const double> theta) const;
};

/// c(x, y; alpha) = 2^(alpha-1) (x ∧ y)^alpha, alpha in [1, 2], eta = 1/alpha.
/// Tail limit of the Bernoulli mixture of independent and comonotone Pareto
/// pairs; alpha is the ratio theta1 / theta2 of the two Pareto indices.
class ParetoMixtureFamily final : public TailFamily {
public:
    std::string_view name() const override { return "pareto-mixture"; }
    std::size_t param_dim() const override { return 1; }
    ParamBox box() const override { return {{1.0}, {2.0}}; }
    double c(double x, double y, std::span<const double> theta) const override;
    double eta(std::span<const double> theta) const override { return 1.0 / theta[0]; }
    double c_x(double x, double y, std::span<const double> theta) const override;
    double c_y(double x, double y, std::span<const double> theta) const override;
    std::optional<double> rectangle_integral(const Rect& r, std::span<const double> theta) const override;
};

/// c(x, y; theta) = (x y)^theta, theta in [1/2, 1], eta = 1 / (2 theta).
/// Tail limit of the inverted Husler-Reiss model with theta = Phi(lambda).
class InvertedHuslerReissFamily final : public TailFamily {
public:
    std::string_view name() const override { return "ihr"; }
    std::size_t param_dim() const override { return 1; }
    ParamBox box() const override { return {{0.5}, {1.0}}; }
    double c(double x, double y, std::span<const double> theta) const override;
    double eta(std::span<const double> theta) const override { return 0.5 / theta[0]; }
    double c_x(double x, double y, std::span<const double> theta) const override;
    double c_y(double x, double y, std::span<const double> theta) const override;
    std::optional<double> rectangle_integral(const Rect& r, std::span<const double> theta) const override;
};

/// "pareto-mixture" (alias "model1") or "ihr" (alias "model2").
std::shared_ptr<const TailFamily> make_family(std::string_view name);

// ---------------------------------------------------------------------------
// Moment conditions
// ---------------------------------------------------------------------------

/// Indicator weights over rectangles I_1..I_s, each normalised by
/// a_j = integral of c(.,.; theta_ref) over I_j.
class WeightScheme {
public:
    static WeightScheme make(const TailFamily& family, std::vector<Rect> regions, Theta theta_ref);

    /// {"regions": [[x_lo,x_hi,y_lo,y_hi], ...], "theta_ref": [..]}; a_j are
    /// recomputed on load and never serialised.
    static WeightScheme from_json(const nlohmann::json& j, const TailFamily& family);
    nlohmann::json to_json() const;

    std::span<const Rect> regions() const noexcept { return regions_; }
    std::span<const double> normalizers() const noexcept { return normalizers_; }
    const Theta& theta_ref() const noexcept { return theta_ref_; }
    std::size_t size() const noexcept { return regions_.size(); }

private:
    std::vector<Rect> regions_;
    std::vector<double> normalizers_;
    Theta theta_ref_;
};

/// Regions and reference point used in the simulation study for the built-in
/// families: unit-square sub-rectangles with alpha_ref = 1 for the Pareto
/// mixture; [0,1]^2, [0,2]^2, [1/2,3/2]^2, [0,1]x[0,3], [0,3]x[0,1] with
/// theta_ref = 0.6 for inverted Husler-Reiss.
WeightScheme default_scheme(const TailFamily& family);

/// Component j = (1/a_j) * integral over I_j of the empirical tail measure,
/// evaluated exactly cell by cell. Throws RegionTooLarge if a region reaches
/// beyond floor(k3 * x) = n.
std::vector<double> moment_vector(const RankedPairs& ranks, std::size_t k3, const WeightScheme& scheme);

/// Component j = (1/a_j) * integral over I_j of c(.,.; theta).
std::vector<double> family_moment_vector(const TailFamily& family, std::span<const double> theta,
                                         const WeightScheme& scheme);

struct FitOptions {
    std::size_t starts = 5;
    double tolerance = 1e-8;
    int max_iter = 500;
};

struct FitResult {
    Theta theta_hat;
    double zeta_hat = 0.0;
    double eta_hat = 0.0;
    double objective_value = 0.0;
    bool converged = false;
    bool eta_clamped = false;
    std::size_t k3 = 0;
};

/// Best scale for fixed family moments: <mf, me> / <mf, mf>, kept positive.
double profile_zeta(std::span<const double> family_moments, std::span<const double> empirical_moments);

/// || zeta * family_moments(theta) - empirical || with zeta profiled out.
double moment_objective(const TailFamily& family, std::span<const double> theta,
                        const WeightScheme& scheme, std::span<const double> empirical_moments);

/// Minimum-distance fit of (theta, zeta) to precomputed empirical moments.
FitResult fit_moments(std::span<const double> empirical_moments, const TailFamily& family,
                      const WeightScheme& scheme, const FitOptions& opts = {});

/// Rank-based method-of-moments estimate of (theta, zeta); eta_hat = eta(theta_hat),
/// clamped into [1/2 + 1e-6, 1] with eta_clamped set when it falls outside.
/// A constant margin carries no tail ordering and raises DegenerateMoments.
FitResult m_estimate(const RankedPairs& ranks, std::size_t k3, const TailFamily& family,
                     const WeightScheme& scheme, const FitOptions& opts = {});

}  // namespace tailcovar

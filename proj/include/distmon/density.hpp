#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace distmon {

/// One frame's (social density, violation count) observation.
struct DensitySample {
    double rho = 0.0;
    double v = 0.0;
};

/// Simple linear regression v = beta0 + beta1 * rho + e, fitted by OLS,
/// together with the sufficient statistics needed for prediction intervals.
struct RegressionFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double s = 0.0;  // residual standard error, sqrt(RSS / (n - 2))
    std::size_t n_samples = 0;
    double rho_mean = 0.0;
    double s_xx = 0.0;  // sum of squared rho deviations
    double r_squared = 0.0;
    double rho_max = 0.0;  // largest observed rho; bounds the root search
};

/// Throws InsufficientData (< 3 samples), DegenerateX (all rho equal), NonFinite.
RegressionFit fit_ols(std::span<const DensitySample> samples);

/// Inverse CDF of Student's t with `dof` degrees of freedom.
/// Throws DomainError unless 0 < p < 1 and dof >= 1.
double t_quantile(double p, double dof);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);

/// Student's t CDF.
double t_cdf(double t, double dof);

/// Two-sided prediction band for a single new observation of v at rho.
class PredictionBand {
public:
    explicit PredictionBand(const RegressionFit& fit, double level = 0.95);

    double level() const noexcept { return level_; }
    double t_value() const noexcept { return t_; }
    const RegressionFit& fit() const noexcept { return fit_; }

    double predict(double rho) const noexcept { return fit_.beta0 + fit_.beta1 * rho; }
    double half_width(double rho) const noexcept;
    double lower(double rho) const noexcept { return predict(rho) - half_width(rho); }
    double upper(double rho) const noexcept { return predict(rho) + half_width(rho); }

private:
    RegressionFit fit_;
    double level_;
    double t_;
};

inline PredictionBand prediction_band(const RegressionFit& fit, double level = 0.95) {
    return PredictionBand(fit, level);
}

enum class CriticalStatus {
    ok,
    already_violating,  // lower bound is already >= 0 at zero density; rho_c = 0
};

std::string_view to_string(CriticalStatus status) noexcept;

/// Largest density whose lower prediction bound for v is still below zero.
struct CriticalDensity {
    double rho_c = 0.0;
    CriticalStatus status = CriticalStatus::ok;
    double level = 0.95;
    RegressionFit fit;
};

/// Root of the lower prediction bound L(rho) = 0, with L(rho) < 0 on [0, rho_c).
/// Throws NonPositiveSlope when beta1 <= 0 or when L never reaches zero on
/// the search bracket [0, 10 * rho_max].
CriticalDensity critical_density(const RegressionFit& fit, double level = 0.95);

/// Moment skewness m3 / m2^1.5 (no bias correction).
/// Throws InsufficientData (< 3 samples) or ZeroVariance.
double skewness(std::span<const double> samples);

}  // namespace distmon

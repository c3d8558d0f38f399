#include "distmon/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "distmon/error.hpp"

namespace distmon {
namespace {

constexpr double kRootTolerance = 1e-9;

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
    constexpr int kMaxIterations = 100000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    return h;
}

// Upper tail P(T > t) for t >= 0.
double t_upper_tail(double t, double dof) {
    const double x = dof / (dof + t * t);
    return 0.5 * incomplete_beta(x, 0.5 * dof, 0.5);
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
    if (!(a > 0.0 && b > 0.0)) throw DomainError("incomplete_beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("incomplete_beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double t_cdf(double t, double dof) {
    if (!(dof > 0.0)) throw DomainError("t_cdf needs dof > 0");
    if (std::isnan(t)) throw DomainError("t_cdf of NaN");
    const double tail = t_upper_tail(std::abs(t), dof);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("t_quantile needs 0 < p < 1, got " + std::to_string(p));
    if (!(dof >= 1.0) || !std::isfinite(dof)) throw DomainError("t_quantile needs dof >= 1");
    if (p == 0.5) return 0.0;

    // Solve on the upper tail so p close to 1 keeps full precision.
    const double tail = p > 0.5 ? 1.0 - p : p;
    double lo = 0.0, hi = 1.0;
    while (t_upper_tail(hi, dof) > tail) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw DomainError("t_quantile did not bracket");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (t_upper_tail(mid, dof) > tail)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-13 * std::max(1.0, lo)) break;
    }
    const double t = 0.5 * (lo + hi);
    return p > 0.5 ? t : -t;
}

RegressionFit fit_ols(std::span<const DensitySample> samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw InsufficientData("need at least 3 samples, got " + std::to_string(n));

    double rho_sum = 0.0, v_sum = 0.0;
    double rho_min = samples[0].rho, rho_max = samples[0].rho;
    for (const auto& s : samples) {
        if (!std::isfinite(s.rho) || !std::isfinite(s.v)) throw NonFinite("regression sample");
        rho_sum += s.rho;
        v_sum += s.v;
        rho_min = std::min(rho_min, s.rho);
        rho_max = std::max(rho_max, s.rho);
    }
    if (rho_min == rho_max) throw DegenerateX("all rho values are identical");

    const double nd = static_cast<double>(n);
    const double rho_mean = rho_sum / nd, v_mean = v_sum / nd;
    double s_xx = 0.0, s_xy = 0.0, s_yy = 0.0;
    for (const auto& s : samples) {
        const double dx = s.rho - rho_mean, dy = s.v - v_mean;
        s_xx += dx * dx;
        s_xy += dx * dy;
        s_yy += dy * dy;
    }
    if (!(s_xx > 0.0)) throw DegenerateX("rho has zero spread");

    RegressionFit fit;
    fit.n_samples = n;
    fit.rho_mean = rho_mean;
    fit.s_xx = s_xx;
    fit.rho_max = rho_max;
    fit.beta1 = s_xy / s_xx;
    fit.beta0 = v_mean - fit.beta1 * rho_mean;

    double rss = 0.0;
    for (const auto& s : samples) {
        const double r = s.v - (fit.beta0 + fit.beta1 * s.rho);
        rss += r * r;
    }
    fit.s = std::sqrt(rss / (nd - 2.0));
    fit.r_squared = s_yy > 0.0 ? 1.0 - rss / s_yy : 1.0;
    return fit;
}

PredictionBand::PredictionBand(const RegressionFit& fit, double level) : fit_(fit), level_(level) {
    if (!(level > 0.0 && level < 1.0)) throw DomainError("prediction level must lie in (0, 1)");
    if (fit.n_samples < 3 || !(fit.s_xx > 0.0)) throw InsufficientData("prediction band needs a valid fit");
    t_ = t_quantile(0.5 * (1.0 + level), static_cast<double>(fit.n_samples) - 2.0);
}

double PredictionBand::half_width(double rho) const noexcept {
    const double n = static_cast<double>(fit_.n_samples);
    const double dx = rho - fit_.rho_mean;
    return t_ * fit_.s * std::sqrt(1.0 + 1.0 / n + dx * dx / fit_.s_xx);
}

std::string_view to_string(CriticalStatus status) noexcept {
    switch (status) {
        case CriticalStatus::ok: return "ok";
        case CriticalStatus::already_violating: return "already_violating";
    }
    return "unknown";
}

CriticalDensity critical_density(const RegressionFit& fit, double level) {
    if (!(fit.beta1 > 0.0))
        throw NonPositiveSlope("beta1 = " + std::to_string(fit.beta1) + "; density does not explain violations");

    const PredictionBand band(fit, level);
    CriticalDensity out{0.0, CriticalStatus::ok, level, fit};

    if (band.lower(0.0) >= 0.0) {
        out.status = CriticalStatus::already_violating;
        return out;
    }

    // L is concave (a line minus a positive multiple of a convex hyperbola), so
    // {L >= 0} is an interval; its left end is the first root.
    double hi = 10.0 * std::max(std::abs(fit.rho_max), std::abs(fit.rho_mean));
    if (band.lower(hi) < 0.0) {
        // Golden-section search for the peak of L on [0, hi].
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = 0.0, b = hi;
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = band.lower(x1), f2 = band.lower(x2);
        for (int i = 0; i < 200 && f1 < 0.0 && f2 < 0.0; ++i) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = band.lower(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = band.lower(x1);
            }
        }
        if (f1 < 0.0 && f2 < 0.0)
            throw NonPositiveSlope("lower prediction bound stays below zero on [0, " + std::to_string(hi) +
                                   "]; slope is not resolvable from the noise");
        hi = f1 >= 0.0 ? x1 : x2;
    }

    double lo = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (band.lower(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    // `lo` keeps L < 0 strictly below the returned root.
    out.rho_c = std::abs(band.lower(lo)) <= std::abs(band.lower(hi)) ? lo : hi;
    if (!(std::abs(band.lower(out.rho_c)) < kRootTolerance))
        throw DomainError("critical density bisection did not converge");
    return out;
}

double skewness(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw InsufficientData("skewness needs at least 3 samples");
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (!(m2 > 0.0)) throw ZeroVariance("samples have zero variance");
    return m3 / std::pow(m2, 1.5);
}

}  // namespace distmon

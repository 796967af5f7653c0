#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "facmon/rng.hpp"
#include "facmon/spectrum.hpp"

namespace facmon {

// Monotone map applied to the scale-free eigenvalue ratio (first stage) and
// to the normalised quadratic form (second stage). Any strictly increasing
// choice with f(0)=0 and f(inf)=inf preserves the asymptotics; the shape and
// scale control how sharply the finite-sample statistic separates the
// bounded-eigenvalue regime from the spiked one.
struct ScalarTransform {
    enum class Kind { identity, scaled_power };
    Kind kind = Kind::identity;
    double scale = 1.0;
    double power = 1.0;

    double operator()(double a) const {
        if (kind == Kind::identity) return a;
        return std::pow(scale * a, power);
    }

    static ScalarTransform identity() { return {}; }
    static ScalarTransform scaled_power(double scale, double power) {
        return {Kind::scaled_power, scale, power};
    }
};

struct PointMass {
    double point;
    double mass;
};

inline std::vector<PointMass> two_point_pm_sqrt2() {
    const double s2 = std::sqrt(2.0);
    return {{+s2, 0.5}, {-s2, 0.5}};
}

// Defaults calibrated on the simulated designs of the acceptance suite
// (N about 100, window 50..250, draws = N). See also vanishing_default_config.
inline constexpr double kDefaultGScale = 2.05;
inline constexpr double kDefaultGPower = 3.0;
inline constexpr double kDefaultPsiLogExponent = 0.16;
// The sample (r+1)-th eigenvalue of a bounded-spectrum panel inflates faster
// than the 1/sqrt(m) that the damping exponent removes; this flattens the
// residual window-length profile of the null level. Zero disables it.
inline constexpr double kDefaultGScaleWindowExponent = 0.25;

struct RandomizerConfig {
    // slack added above the lower bound for the eigenvalue damping exponent
    double delta_slack = 0.05;
    // l~(N,m,R) = (ln N * ln m * ln R)^psi_log_exponent
    double psi_log_exponent = kDefaultPsiLogExponent;
    // artificial sample sizes; 0 means "use N"
    int n_theta_draws = 0;  // R
    int n_gamma_draws = 0;  // W
    ScalarTransform g = ScalarTransform::scaled_power(kDefaultGScale, kDefaultGPower);
    ScalarTransform h = ScalarTransform::scaled_power(1.0, 2.0);
    // multiplies g's scale by (m/100)^exponent before the first stage
    double g_scale_window_exponent = kDefaultGScaleWindowExponent;
    std::vector<PointMass> u_support_phi = two_point_pm_sqrt2();
    std::vector<PointMass> u_support_psi = two_point_pm_sqrt2();
    // CDF at zero of the draw distributions (standard normal samplers below)
    double g0_phi = 0.5;
    double g0_psi = 0.5;
    std::uint64_t seed = 0;

    int theta_draws_for(int n_series) const { return n_theta_draws > 0 ? n_theta_draws : n_series; }
    int gamma_draws_for(int n_series) const { return n_gamma_draws > 0 ? n_gamma_draws : n_series; }

    void validate() const {
        if (!(delta_slack > 0.0 && delta_slack < 0.5))
            throw InvalidInput("delta_slack must lie in (0, 0.5)");
        if (!(psi_log_exponent > 0.0)) throw InvalidInput("psi_log_exponent must be positive");
        if (!(g0_phi > 0.0 && g0_phi < 1.0) || !(g0_psi > 0.0 && g0_psi < 1.0))
            throw InvalidInput("G(0) values must lie strictly inside (0, 1)");
        check_support(u_support_phi);
        check_support(u_support_psi);
        if (n_theta_draws < 0 || n_gamma_draws < 0)
            throw InvalidInput("draw counts cannot be negative");
    }

private:
    static void check_support(const std::vector<PointMass>& support) {
        if (support.empty()) throw InvalidInput("randomiser support is empty");
        double total = 0.0;
        for (const auto& pm : support) {
            if (!(pm.mass > 0.0)) throw InvalidInput("support masses must be positive");
            total += pm.mass;
        }
        if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("support masses must sum to 1");
    }
};

// Damping exponent: slack above zero when N <= sqrt(m), otherwise slack above
// 1 - ln m / (2 ln N), capped at 0.999. The lower bound is exactly what kills
// the sample-eigenvalue estimation error under the null while keeping the
// spiked regime divergent.
inline double compute_delta(int n_series, int window_m, double slack) {
    if (n_series < 2 || window_m < 2) throw InvalidInput("compute_delta needs N >= 2 and m >= 2");
    if (!(slack > 0.0 && slack < 0.5)) throw InvalidInput("delta slack must lie in (0, 0.5)");
    const double n = static_cast<double>(n_series);
    const double m = static_cast<double>(window_m);
    if (n <= std::sqrt(m)) return slack;
    return std::min(1.0 - std::log(m) / (2.0 * std::log(n)) + slack, 0.999);
}

// First-stage statistic: g( N^(-delta) * lambda^(k) / (trace/N) ). The
// spectral-mean denominator makes the argument invariant to rescaling the
// whole panel. k defaults to r+1; the vanishing-factor monitor passes r.
inline double phi_stat_at(const EigenSpectrum& spectrum, int eigen_index, double delta,
                          const RandomizerConfig& cfg) {
    const int n = spectrum.size();
    if (eigen_index < 1 || eigen_index > n)
        throw InvalidInput("phi_stat: eigenvalue index out of range");
    const double mean = spectrum.trace() / n;
    if (!(mean > 0.0)) throw InvalidInput("degenerate spectrum: zero trace");
    const double damped = std::pow(static_cast<double>(n), -delta) * spectrum.lambda(eigen_index);
    return cfg.g(damped / mean);
}

inline double phi_stat(const EigenSpectrum& spectrum, int r, double delta,
                       const RandomizerConfig& cfg) {
    if (r < 0 || r >= spectrum.size()) throw InvalidInput("phi_stat: need 0 <= r < N");
    return phi_stat_at(spectrum, r + 1, delta, cfg);
}

struct ThetaStat {
    double value = 0.0;
    double phi = 0.0;
    long t = 0;
};

struct GammaStat {
    double value = 0.0;
    double psi = 0.0;
    long t = 0;
};

namespace detail {

// Shared quadratic form of Steps A2-A4 / B2-B4: threshold the draws against
// u/stat, standardise the indicator mean, integrate the square against the
// finite support. stat == 0 uses the pointwise limit 1{u >= 0}. The per-u
// term is computed as S^2 / (R g0 (1-g0)) with S the raw standardised sum,
// which keeps the stat->0 value exactly equal to the draw count.
inline double randomized_quadratic(double stat, std::span<const double> draws,
                                   const std::vector<PointMass>& support, double g0) {
    const std::size_t n = draws.size();
    if (n == 0) throw InvalidInput("randomisation needs at least one draw");
    const double denom = static_cast<double>(n) * g0 * (1.0 - g0);
    double total = 0.0;
    for (const auto& pm : support) {
        double ones;
        if (stat == 0.0) {
            ones = (pm.point >= 0.0) ? static_cast<double>(n) : 0.0;
        } else {
            const double threshold = pm.point / stat;
            std::size_t count = 0;
            for (double d : draws) count += (d <= threshold) ? 1u : 0u;
            ones = static_cast<double>(count);
        }
        const double s = ones - static_cast<double>(n) * g0;
        total += pm.mass * (s * s) / denom;
    }
    return total;
}

}  // namespace detail

// Step A with caller-supplied draws (hand-checkable form).
inline ThetaStat theta_stat(double phi, const RandomizerConfig& cfg, std::span<const double> xi,
                            long t = 0) {
    if (!(phi >= 0.0)) throw InvalidInput("phi must be nonnegative");
    if (xi.empty()) throw InvalidInput("theta_stat: R must be positive");
    return ThetaStat{detail::randomized_quadratic(phi, xi, cfg.u_support_phi, cfg.g0_phi), phi, t};
}

// Step A with fresh draws from the (seed, stage, t) stream: independent
// across t by construction.
inline ThetaStat theta_stat_at(double phi, const RandomizerConfig& cfg, int n_series, long t) {
    const int r_draws = cfg.theta_draws_for(n_series);
    std::vector<double> xi(static_cast<std::size_t>(r_draws));
    rng::NormalStream(cfg.seed, rng::Purpose::theta_draws, static_cast<std::uint64_t>(t))
        .fill_normal(xi);
    return theta_stat(phi, cfg, xi, t);
}

// Second-stage normaliser l~(N, m, R). With the exponent at its default the
// value sits between the chi-square scale of a spiked-regime Theta and the
// O(R) scale of a bounded-regime one across desk-size panels, and it still
// grows without bound in (N, m, R).
inline double psi_normalizer(int n_series, int window_m, int r_draws, double exponent) {
    if (n_series <= 2 || window_m <= 2 || r_draws <= 2)
        throw InvalidInput("psi normaliser needs N, m, R all above e");
    const double p =
        std::log(static_cast<double>(n_series)) * std::log(static_cast<double>(window_m)) *
        std::log(static_cast<double>(r_draws));
    return std::pow(p, exponent);
}

inline double psi_stat(double theta, int n_series, int window_m, const RandomizerConfig& cfg) {
    if (!(theta >= 0.0)) throw InvalidInput("theta must be nonnegative");
    const int r_draws = cfg.theta_draws_for(n_series);
    return cfg.h(theta / psi_normalizer(n_series, window_m, r_draws, cfg.psi_log_exponent));
}

// Step B, same algebra with (W, G_psi, F_psi, psi) in place of
// (R, G_phi, F_phi, phi).
inline GammaStat gamma_stat(double psi, const RandomizerConfig& cfg, std::span<const double> xi,
                            long t = 0) {
    if (!(psi >= 0.0)) throw InvalidInput("psi must be nonnegative");
    if (xi.empty()) throw InvalidInput("gamma_stat: W must be positive");
    return GammaStat{detail::randomized_quadratic(psi, xi, cfg.u_support_psi, cfg.g0_psi), psi, t};
}

inline GammaStat gamma_stat_at(double psi, const RandomizerConfig& cfg, int n_series, long t) {
    const int w_draws = cfg.gamma_draws_for(n_series);
    std::vector<double> xi(static_cast<std::size_t>(w_draws));
    rng::NormalStream(cfg.seed, rng::Purpose::gamma_draws, static_cast<std::uint64_t>(t))
        .fill_normal(xi);
    return gamma_stat(psi, cfg, xi, t);
}

// One diagnostic record per monitored time.
struct RandomizerTrace {
    long t = 0;
    double lambda = 0.0;  // eigenvalue feeding the pipeline
    double phi = 0.0;
    double theta = 0.0;
    double psi = 0.0;
    double gamma = 0.0;
};

namespace detail {

inline RandomizerConfig with_window_scale(const RandomizerConfig& cfg, int window_m) {
    if (cfg.g_scale_window_exponent == 0.0 ||
        cfg.g.kind == ScalarTransform::Kind::identity || window_m == 100)
        return cfg;
    RandomizerConfig out = cfg;
    out.g.scale *= std::pow(window_m / 100.0, cfg.g_scale_window_exponent);
    return out;
}

}  // namespace detail

// Full double-randomisation pipeline for one monitored time. Deterministic
// given (cfg.seed, t); reruns reproduce bit-identical values.
inline RandomizerTrace randomize_for_time(const EigenSpectrum& spectrum, int r, int window_m,
                                          const RandomizerConfig& raw_cfg, long t) {
    const RandomizerConfig cfg = detail::with_window_scale(raw_cfg, window_m);
    const int n = spectrum.size();
    const double delta = compute_delta(n, window_m, cfg.delta_slack);
    RandomizerTrace trace;
    trace.t = t;
    trace.lambda = spectrum.lambda(r + 1);
    trace.phi = phi_stat(spectrum, r, delta, cfg);
    const ThetaStat theta = theta_stat_at(trace.phi, cfg, n, t);
    trace.theta = theta.value;
    trace.psi = psi_stat(theta.value, n, window_m, cfg);
    trace.gamma = gamma_stat_at(trace.psi, cfg, n, t).value;
    return trace;
}

inline GammaStat gamma_for_time(const EigenSpectrum& spectrum, int r, int window_m,
                                const RandomizerConfig& cfg, long t) {
    const RandomizerTrace trace = randomize_for_time(spectrum, r, window_m, cfg, t);
    return GammaStat{trace.gamma, trace.psi, t};
}

// Single-randomisation variant for the vanishing-factor test: the r-th
// eigenvalue is spiked under "factor persists", so Theta is already the
// asymptotically chi-square statistic and feeds the detector directly.
inline RandomizerTrace randomize_for_time_single_stage(const EigenSpectrum& spectrum, int r,
                                                       int window_m,
                                                       const RandomizerConfig& raw_cfg, long t) {
    if (r < 1) throw InvalidInput("vanishing-factor statistic needs r >= 1");
    const RandomizerConfig cfg = detail::with_window_scale(raw_cfg, window_m);
    const int n = spectrum.size();
    const double delta = compute_delta(n, window_m, cfg.delta_slack);
    RandomizerTrace trace;
    trace.t = t;
    trace.lambda = spectrum.lambda(r);
    trace.phi = phi_stat_at(spectrum, r, delta, cfg);
    const ThetaStat theta = theta_stat_at(trace.phi, cfg, n, t);
    trace.theta = theta.value;
    trace.psi = 0.0;
    trace.gamma = theta.value;  // detector input
    return trace;
}

}  // namespace facmon

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace facmon::rng {

// Counter-based generator (Philox4x64-10). Every draw is addressed by
// (seed, purpose, major, index), so streams for different monitored times,
// randomisation stages, or Monte Carlo replications never overlap and can be
// evaluated in any order on any number of threads.

namespace detail {

inline constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
inline constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
inline constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace detail

using Block = std::array<std::uint64_t, 4>;

inline Block philox4(std::uint64_t key0, std::uint64_t key1, const Block& counter) {
    Block x = counter;
    std::uint64_t k0 = key0;
    std::uint64_t k1 = key1;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        detail::mulhilo(detail::kPhiloxM0, x[0], hi0, lo0);
        detail::mulhilo(detail::kPhiloxM1, x[2], hi1, lo1);
        x = Block{hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
        k0 += detail::kWeyl0;
        k1 += detail::kWeyl1;
    }
    return x;
}

// splitmix64 finalizer, used for seed derivation only.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Per-replication seed: hash(base_seed, rep_index). Two finalizer rounds keep
// nearby indices statistically unrelated.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
    return mix64(mix64(base_seed ^ (0xD6E8FEB86659FD93ULL * (index + 1))));
}

// Stream purposes. Values are part of the reproducibility contract: changing
// them changes every seeded result.
enum class Purpose : std::uint64_t {
    theta_draws = 1,
    gamma_draws = 2,
    dgp_var_matrix = 16,
    dgp_factor_innovations = 17,
    dgp_loadings = 18,
    dgp_loadings_post = 19,
    dgp_idio = 20,
    dgp_new_factor = 21,
    dgp_new_loading = 22,
    dgp_idio_scales = 23,
    wiener_paths = 32,
};

inline double to_unit_interval(std::uint64_t bits) {
    // strictly inside (0,1) so the normal quantile below stays finite
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF, Wichura's algorithm AS 241 (PPND16),
// |relative error| < 1e-15 over (0,1).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p outside (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                             1.3314166789178437745e2) * r + 3.3871328727963666080e0) * q;
        const double den = ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                                3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                              5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                            4.2313330701600911252e1) * r + 1.0;
        return num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num = ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                            4.63033784615654529590e0) * r + 1.42343711074968357734e0;
        const double den = ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                            2.05319162663775882187e0) * r + 1.0;
        val = num / den;
    } else {
        r -= 5.0;
        const double num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                            5.46378491116411436990e0) * r + 6.65790464350110377720e0;
        const double den = ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                              1.48753612908506148525e-2) * r + 5.99832206555887937690e-1) * r +
                            1.36929880922735805310e0) * r + 1.0;
        val = num / den;
    }
    return (q < 0.0) ? -val : val;
}

// Standard normal CDF (for tests and closed-form expectations).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0x1.6a09e667f3bcdp-1); }

// Sequential view over one (seed, purpose, major) stream.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, Purpose purpose, std::uint64_t major)
        : seed_(seed), purpose_(static_cast<std::uint64_t>(purpose)), major_(major) {}

    double normal_at(std::uint64_t index) const {
        const Block b = philox4(seed_, purpose_, Block{major_, index >> 2, 0, 0});
        return inverse_normal_cdf(to_unit_interval(b[index & 3]));
    }

    double uniform_at(std::uint64_t index) const {
        const Block b = philox4(seed_, purpose_, Block{major_, index >> 2, 0, 0});
        return to_unit_interval(b[index & 3]);
    }

    void fill_normal(std::span<double> out, std::uint64_t first_index = 0) const {
        std::uint64_t i = first_index;
        std::size_t k = 0;
        while (k < out.size()) {
            const Block b = philox4(seed_, purpose_, Block{major_, i >> 2, 0, 0});
            for (std::uint64_t lane = i & 3; lane < 4 && k < out.size(); ++lane, ++i, ++k) {
                out[k] = inverse_normal_cdf(to_unit_interval(b[lane]));
            }
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t purpose_;
    std::uint64_t major_;
};

}  // namespace facmon::rng

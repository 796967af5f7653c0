#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "facmon/panel.hpp"
#include "facmon/rng.hpp"

namespace facmon {

// Boundary shape: nu*(k; m) = sqrt(m) (1 + k/m) (k/(k+m))^eta, eta in [0, 1/2].
inline double nu_star(long k, int m, double eta) {
    if (k < 1 || m < 2) throw InvalidInput("nu_star needs k >= 1 and m >= 2");
    if (!(eta >= 0.0 && eta <= 0.5)) throw InvalidInput("eta must lie in [0, 0.5]");
    const double kd = static_cast<double>(k);
    const double md = static_cast<double>(m);
    const double tail = (eta == 0.0) ? 1.0 : std::pow(kd / (kd + md), eta);
    return std::sqrt(md) * (1.0 + kd / md) * tail;
}

// Darling-Erdos style critical value for eta = 1/2:
//   c = (D_m - ln(-ln(1-alpha))) / A_m,
//   A_m = sqrt(2 ln ln m), D_m = 2 ln ln m + (1/2) ln ln ln m - (1/2) ln pi.
// Needs ln ln m > 1, i.e. m >= 16, for the triple logarithm.
inline double critical_value_eta_half(int m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    const double loglog = std::log(std::log(static_cast<double>(m)));
    if (m < 16 || !(loglog > 1.0))
        throw InvalidInput("eta = 0.5 critical value needs m >= 16 so that ln ln ln m exists");
    const double a_m = std::sqrt(2.0 * loglog);
    const double d_m = 2.0 * loglog + 0.5 * std::log(loglog) - 0.5 * std::log(M_PI);
    return (d_m - std::log(-std::log1p(-alpha))) / a_m;
}

struct WienerMcOptions {
    int grid_points = 10000;
    int replications = 100000;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
};

// (1-alpha) quantile of sup_{0<t<=1} |B(t)|/t^eta for a standard Wiener
// process, estimated on a uniform grid with scaled cumulative sums of
// independent standard normals. Path p draws from its own counter stream, so
// the estimate is independent of the worker count.
inline double critical_value_wiener(double eta, double alpha, const WienerMcOptions& opts = {}) {
    if (!(eta >= 0.0 && eta < 0.5)) throw InvalidInput("Wiener critical value covers eta in [0, 0.5)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (opts.grid_points < 1000)
        throw InvalidInput("Wiener simulation needs at least 1000 grid points");
    if (opts.replications < 100) throw InvalidInput("Wiener simulation needs at least 100 paths");

    const int grid = opts.grid_points;
    const int reps = opts.replications;
    std::vector<double> sups(static_cast<std::size_t>(reps));

    const double inv_sqrt_grid = 1.0 / std::sqrt(static_cast<double>(grid));
    auto run_chunk = [&](int begin, int end) {
        std::vector<double> z(static_cast<std::size_t>(grid));
        for (int p = begin; p < end; ++p) {
            rng::NormalStream stream(opts.seed, rng::Purpose::wiener_paths,
                                     static_cast<std::uint64_t>(p));
            stream.fill_normal(z);
            double cumsum = 0.0;
            double sup = 0.0;
            for (int i = 1; i <= grid; ++i) {
                cumsum += z[static_cast<std::size_t>(i - 1)];
                const double b = cumsum * inv_sqrt_grid;
                const double tpow = std::pow(static_cast<double>(i) / grid, eta);
                const double v = std::abs(b) / tpow;
                if (v > sup) sup = v;
            }
            sups[static_cast<std::size_t>(p)] = sup;
        }
    };

    int workers = opts.workers > 0 ? opts.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, reps));
    if (workers == 1) {
        run_chunk(0, reps);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (reps + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int begin = w * chunk;
            const int end = std::min(reps, begin + chunk);
            if (begin < end) pool.emplace_back(run_chunk, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    std::sort(sups.begin(), sups.end());
    const double pos = (1.0 - alpha) * (reps - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min<std::size_t>(lo + 1, sups.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sups[lo] + frac * (sups[hi] - sups[lo]);
}

struct CriticalValue {
    enum class Source { closed_form, lookup, monte_carlo };
    double value = 0.0;
    Source source = Source::closed_form;

    std::string source_name() const {
        switch (source) {
            case Source::closed_form: return "closed-form";
            case Source::lookup: return "lookup";
            case Source::monte_carlo: return "monte-carlo";
        }
        return "?";
    }
};

// Dispatch: eta = 0.5 uses the closed form (m-dependent); eta = 0.45 at the
// conventional 5% / 10% levels uses tabulated values; anything else simulates.
inline CriticalValue critical_value(double eta, double alpha, std::optional<int> m,
                                    const WienerMcOptions& opts = {}) {
    if (!(eta >= 0.0 && eta <= 0.5)) throw InvalidInput("eta must lie in [0, 0.5]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (eta == 0.5) {
        if (!m.has_value())
            throw InvalidInput("eta = 0.5 critical value depends on m; pass the training length");
        return {critical_value_eta_half(*m, alpha), CriticalValue::Source::closed_form};
    }
    if (std::abs(eta - 0.45) < 1e-12) {
        if (std::abs(alpha - 0.05) < 1e-12) return {2.7992, CriticalValue::Source::lookup};
        if (std::abs(alpha - 0.10) < 1e-12) return {2.5437, CriticalValue::Source::lookup};
    }
    return {critical_value_wiener(eta, alpha, opts), CriticalValue::Source::monte_carlo};
}

// Boundary specification for one monitoring run: nu(k; m) = c * nu*(k; m).
struct ThresholdSpec {
    double eta = 0.45;
    double alpha = 0.05;
    double critical_value = 0.0;
    int m = 0;

    double boundary(long k) const { return critical_value * nu_star(k, m, eta); }

    void validate() const {
        if (!(eta >= 0.0 && eta <= 0.5)) throw InvalidInput("eta must lie in [0, 0.5]");
        if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
        if (!(critical_value > 0.0)) throw InvalidInput("critical value must be positive");
        if (m < 2) throw InvalidInput("training length m must be at least 2");
    }
};

inline ThresholdSpec make_threshold(double eta, double alpha, int m,
                                    const WienerMcOptions& opts = {}) {
    ThresholdSpec spec{eta, alpha, 0.0, m};
    spec.critical_value = critical_value(eta, alpha, m, opts).value;
    spec.validate();
    return spec;
}

}  // namespace facmon

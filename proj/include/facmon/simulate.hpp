#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "facmon/monitor.hpp"
#include "facmon/panel.hpp"
#include "facmon/randomize.hpp"
#include "facmon/rng.hpp"

namespace facmon {

enum class Scenario {
    null_stable,
    break_loadings,
    new_factor,
    weak_break,
    idio_var_break,
    vanishing_factor,
};

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::null_stable: return "null";
        case Scenario::break_loadings: return "break_loadings";
        case Scenario::new_factor: return "new_factor";
        case Scenario::weak_break: return "weak_break";
        case Scenario::idio_var_break: return "idio_var_break";
        case Scenario::vanishing_factor: return "vanishing_factor";
    }
    return "?";
}

inline std::optional<Scenario> scenario_from_name(const std::string& name) {
    if (name == "null") return Scenario::null_stable;
    if (name == "break_loadings") return Scenario::break_loadings;
    if (name == "new_factor") return Scenario::new_factor;
    if (name == "weak_break") return Scenario::weak_break;
    if (name == "idio_var_break") return Scenario::idio_var_break;
    if (name == "vanishing_factor") return Scenario::vanishing_factor;
    return std::nullopt;
}

struct DgpSpec {
    int n_series = 100;   // N
    int n_periods = 1000; // T
    int train_m = 100;    // m
    int n_factors = 2;    // r
    Scenario scenario = Scenario::null_stable;
    long tau = 500;
    double var_coef_radius = 0.7;     // spectral radius of the factor VAR matrix
    double ar_coef_new_factor = 0.7;  // AR(1) coefficient of the emerging factor
    double idio_cross_decay = 0.3;
    double idio_time_decay = 0.5;
    double snr = 2.0;                 // Var(X_i) / Var(u_i)
    double kappa = 0.5;               // weak-break eigenvalue rate N^kappa
    std::uint64_t seed = 0;

    void validate() const {
        if (n_series < 2 || n_periods < 2) throw InvalidInput("DGP needs N >= 2 and T >= 2");
        if (n_factors < 1 || n_factors >= n_series)
            throw InvalidInput("DGP needs 1 <= r < N");
        if (train_m < 2 || train_m >= n_periods)
            throw InvalidInput("DGP needs 2 <= m < T");
        if (scenario != Scenario::null_stable && !(train_m < tau && tau < n_periods))
            throw InvalidInput("break scenarios need m < tau < T");
        if (!(snr > 1.0)) throw InvalidInput("signal-to-noise ratio must exceed 1");
        if (!(idio_cross_decay >= 0.0 && idio_cross_decay < 1.0) ||
            !(idio_time_decay >= 0.0 && idio_time_decay < 1.0))
            throw InvalidInput("Toeplitz decays must lie in [0, 1)");
        if (!(var_coef_radius >= 0.0 && var_coef_radius < 1.0))
            throw InvalidInput("VAR spectral radius must lie in [0, 1) for stationarity");
        if (!(std::abs(ar_coef_new_factor) < 1.0))
            throw InvalidInput("new-factor AR coefficient must lie in (-1, 1)");
        if (scenario == Scenario::weak_break && !(kappa > 0.0 && kappa <= 1.0))
            throw InvalidInput("weak-break kappa must lie in (0, 1]");
    }
};

namespace dgp_detail {

inline constexpr int kBurnIn = 100;

inline double spectral_radius(const Eigen::MatrixXd& h) {
    if (h.rows() == 1) return std::abs(h(0, 0));
    return h.eigenvalues().cwiseAbs().maxCoeff();
}

// Discrete Lyapunov solve Sigma = H Sigma H' + I by fixed-point iteration;
// contraction rate is the squared spectral radius.
inline Eigen::MatrixXd stationary_var_covariance(const Eigen::MatrixXd& h) {
    const int r = static_cast<int>(h.rows());
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(r, r);
    for (int it = 0; it < 200; ++it) {
        sigma = (h * sigma * h.transpose() + Eigen::MatrixXd::Identity(r, r)).eval();
    }
    return sigma;
}

}  // namespace dgp_detail

// Random VAR(1) coefficient matrix: the orthogonal factor of a standard
// normal draw, rescaled so the spectral radius equals `radius` exactly. An
// orthogonal base keeps every factor direction equally persistent, so the
// stationary factor covariance is isotropic and the planted spiked
// eigenvalues split evenly across factors. The scalar case is flipped
// positive so an AR(1) factor keeps positive persistence.
inline Eigen::MatrixXd gen_var_matrix(int r, double radius, std::uint64_t seed) {
    if (r < 1) throw InvalidInput("gen_var_matrix needs r >= 1");
    if (!(radius >= 0.0 && radius < 1.0)) throw InvalidInput("spectral radius must lie in [0, 1)");
    if (radius == 0.0) return Eigen::MatrixXd::Zero(r, r);
    rng::NormalStream stream(seed, rng::Purpose::dgp_var_matrix, 0);
    Eigen::MatrixXd g(r, r);
    std::uint64_t idx = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = stream.normal_at(idx++);
    if (r == 1) return Eigen::MatrixXd::Constant(1, 1, radius);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd h = qr.householderQ();
    // all eigenvalues of an orthogonal matrix have modulus 1
    h *= radius / dgp_detail::spectral_radius(h);
    return h;
}

// f_t = H f_{t-1} + e_t with standard normal innovations, 100-step burn-in
// from f_0 = 0. Returns r x T.
inline Eigen::MatrixXd gen_factors(int r, int T, double radius, std::uint64_t seed) {
    if (T < 1) throw InvalidInput("gen_factors needs T >= 1");
    const Eigen::MatrixXd h = gen_var_matrix(r, radius, seed);
    rng::NormalStream stream(seed, rng::Purpose::dgp_factor_innovations, 0);
    Eigen::MatrixXd f(r, T);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(r);
    Eigen::VectorXd innov(r);
    std::uint64_t idx = 0;
    for (int t = -dgp_detail::kBurnIn; t < T; ++t) {
        for (int i = 0; i < r; ++i) innov(i) = stream.normal_at(idx++);
        state = (h * state + innov).eval();
        if (t >= 0) f.col(t) = state;
    }
    return f;
}

namespace dgp_detail {

// y = x * Toeplitz(decay^{|s-t|}) along the second index via the forward /
// backward geometric recursions; exact up to rounding and O(rows * cols).
inline Eigen::MatrixXd toeplitz_time_multiply(const Eigen::MatrixXd& x, double decay) {
    if (decay == 0.0) return x;
    const Eigen::Index rows = x.rows();
    const Eigen::Index cols = x.cols();
    Eigen::MatrixXd fwd(rows, cols);
    Eigen::MatrixXd bwd(rows, cols);
    fwd.col(0) = x.col(0);
    for (Eigen::Index t = 1; t < cols; ++t) fwd.col(t) = decay * fwd.col(t - 1) + x.col(t);
    bwd.col(cols - 1) = x.col(cols - 1);
    for (Eigen::Index t = cols - 2; t >= 0; --t) bwd.col(t) = decay * bwd.col(t + 1) + x.col(t);
    return fwd + bwd - x;
}

inline Eigen::MatrixXd toeplitz_cross_multiply(const Eigen::MatrixXd& x, double decay) {
    if (decay == 0.0) return x;
    return toeplitz_time_multiply(x.transpose(), decay).transpose();
}

}  // namespace dgp_detail

// Idiosyncratic panel u = D eps G with eps i.i.d. standard normal, D the
// N x N Toeplitz with entries cross_decay^{|i-j|} and G the T x T Toeplitz
// with entries time_decay^{|s-t|}.
inline Eigen::MatrixXd gen_idio(int n_series, int n_periods, double cross_decay,
                                double time_decay, std::uint64_t seed) {
    if (!(cross_decay >= 0.0 && cross_decay < 1.0) || !(time_decay >= 0.0 && time_decay < 1.0))
        throw InvalidInput("Toeplitz decays must lie in [0, 1)");
    rng::NormalStream stream(seed, rng::Purpose::dgp_idio, 0);
    Eigen::MatrixXd eps(n_series, n_periods);
    std::uint64_t idx = 0;
    for (int i = 0; i < n_series; ++i)
        for (int t = 0; t < n_periods; ++t) eps(i, t) = stream.normal_at(idx++);
    return dgp_detail::toeplitz_cross_multiply(
        dgp_detail::toeplitz_time_multiply(eps, time_decay), cross_decay);
}

// Stationary variance of row i of the idiosyncratic model: exact finite sum
// across series, stationary (interior) value along time.
inline double idio_row_variance(int n_series, int row, double cross_decay, double time_decay) {
    double cross = 1.0;
    const double c2 = cross_decay * cross_decay;
    double p = c2;
    for (int k = 1; k <= row; ++k, p *= c2) cross += p;
    p = c2;
    for (int k = 1; k <= n_series - 1 - row; ++k, p *= c2) cross += p;
    const double t2 = time_decay * time_decay;
    const double time_factor = (1.0 + t2) / (1.0 - t2);
    return cross * time_factor;
}

struct PlantedTruth {
    Scenario scenario = Scenario::null_stable;
    std::optional<long> tau;
    std::uint64_t seed = 0;
    std::uint64_t loadings_digest = 0;
};

struct GeneratedPanel {
    Panel panel;
    PlantedTruth truth;
    // populated only when requested by tests / diagnostics
    Eigen::MatrixXd common;
    Eigen::MatrixXd idio;
};

namespace dgp_detail {

inline std::uint64_t fnv1a_bytes(const double* data, std::size_t count, std::uint64_t h) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline Eigen::MatrixXd draw_loadings(int n_series, int r, std::uint64_t seed,
                                     rng::Purpose purpose) {
    rng::NormalStream stream(seed, purpose, 0);
    Eigen::MatrixXd a(n_series, r);
    std::uint64_t idx = 0;
    for (int i = 0; i < n_series; ++i)
        for (int j = 0; j < r; ++j) a(i, j) = stream.normal_at(idx++);
    return a;
}

// Row scales putting Var(common_i) = (snr - 1) Var(u_i) against the
// population variances of the generated processes.
inline Eigen::VectorXd snr_row_scales(const Eigen::MatrixXd& loadings,
                                      const Eigen::MatrixXd& sigma_f, const DgpSpec& spec) {
    const int n = spec.n_series;
    Eigen::VectorXd scales(n);
    for (int i = 0; i < n; ++i) {
        const double var_common_raw = loadings.row(i) * sigma_f * loadings.row(i).transpose();
        const double var_u =
            idio_row_variance(n, i, spec.idio_cross_decay, spec.idio_time_decay);
        if (!(var_common_raw > 0.0))
            throw std::runtime_error("degenerate loading row in SNR calibration");
        scales(i) = std::sqrt((spec.snr - 1.0) * var_u / var_common_raw);
    }
    return scales;
}

}  // namespace dgp_detail

// Simulated panel with the planted truth. Scenario semantics:
//   null            stable r-factor model
//   break_loadings  fresh loadings on every factor from t = tau
//   new_factor      one extra AR(1) factor with unscaled N(0,1) loadings from tau
//   weak_break      as new_factor with only ceil(N^kappa) nonzero loadings
//   idio_var_break  idiosyncratic rows scaled by U[1,2] factors from tau
//   vanishing_factor  loadings of the r-th factor zeroed from tau
inline GeneratedPanel gen_panel(const DgpSpec& spec, bool keep_parts = false) {
    spec.validate();
    const int n = spec.n_series;
    const int T = spec.n_periods;
    const int r = spec.n_factors;

    const Eigen::MatrixXd h = gen_var_matrix(r, spec.var_coef_radius, spec.seed);
    const Eigen::MatrixXd sigma_f =
        spec.var_coef_radius == 0.0 ? Eigen::MatrixXd::Identity(r, r)
                                    : dgp_detail::stationary_var_covariance(h);
    const Eigen::MatrixXd factors = gen_factors(r, T, spec.var_coef_radius, spec.seed);
    Eigen::MatrixXd idio =
        gen_idio(n, T, spec.idio_cross_decay, spec.idio_time_decay, spec.seed);

    Eigen::MatrixXd loadings =
        dgp_detail::draw_loadings(n, r, spec.seed, rng::Purpose::dgp_loadings);
    const Eigen::VectorXd scales = dgp_detail::snr_row_scales(loadings, sigma_f, spec);
    loadings.array().colwise() *= scales.array();

    const long tau_idx = spec.tau - 1;  // column of the first post-break period
    Eigen::MatrixXd common(n, T);

    switch (spec.scenario) {
        case Scenario::null_stable:
        case Scenario::new_factor:
        case Scenario::weak_break:
        case Scenario::idio_var_break: {
            common = loadings * factors;
            break;
        }
        case Scenario::break_loadings: {
            Eigen::MatrixXd post =
                dgp_detail::draw_loadings(n, r, spec.seed, rng::Purpose::dgp_loadings_post);
            const Eigen::VectorXd post_scales = dgp_detail::snr_row_scales(post, sigma_f, spec);
            post.array().colwise() *= post_scales.array();
            common.leftCols(tau_idx) = loadings * factors.leftCols(tau_idx);
            common.rightCols(T - tau_idx) = post * factors.rightCols(T - tau_idx);
            break;
        }
        case Scenario::vanishing_factor: {
            common.leftCols(tau_idx) = loadings * factors.leftCols(tau_idx);
            Eigen::MatrixXd reduced = loadings;
            reduced.col(r - 1).setZero();
            common.rightCols(T - tau_idx) = reduced * factors.rightCols(T - tau_idx);
            break;
        }
    }

    if (spec.scenario == Scenario::new_factor || spec.scenario == Scenario::weak_break) {
        rng::NormalStream g_stream(spec.seed, rng::Purpose::dgp_new_factor, 0);
        Eigen::VectorXd g_path(T);
        double state = 0.0;
        std::uint64_t idx = 0;
        for (int t = -dgp_detail::kBurnIn; t < T; ++t) {
            state = spec.ar_coef_new_factor * state + g_stream.normal_at(idx++);
            if (t >= 0) g_path(t) = state;
        }
        Eigen::VectorXd b =
            dgp_detail::draw_loadings(n, 1, spec.seed, rng::Purpose::dgp_new_loading).col(0);
        if (spec.scenario == Scenario::weak_break) {
            const int keep = static_cast<int>(
                std::min<double>(n, std::ceil(std::pow(static_cast<double>(n), spec.kappa))));
            for (int i = keep; i < n; ++i) b(i) = 0.0;
        }
        for (long t = tau_idx; t < T; ++t) common.col(t) += b * g_path(t);
    }

    if (spec.scenario == Scenario::idio_var_break) {
        rng::NormalStream s_stream(spec.seed, rng::Purpose::dgp_idio_scales, 0);
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = 1.0 + s_stream.uniform_at(static_cast<std::uint64_t>(i));
        for (long t = tau_idx; t < T; ++t) idio.col(t).array() *= s.array();
    }

    GeneratedPanel out;
    out.panel = Panel::from_matrix(common + idio);
    out.truth.scenario = spec.scenario;
    out.truth.tau = spec.scenario == Scenario::null_stable ? std::nullopt
                                                           : std::optional<long>(spec.tau);
    out.truth.seed = spec.seed;
    out.truth.loadings_digest =
        dgp_detail::fnv1a_bytes(loadings.data(), static_cast<std::size_t>(loadings.size()),
                                0xCBF29CE484222325ULL);
    if (keep_parts) {
        out.common = std::move(common);
        out.idio = std::move(idio);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Replication harness
// ---------------------------------------------------------------------------

struct McConfig {
    int replications = 200;
    DgpSpec dgp;
    std::vector<int> m_list;          // defaults to {dgp.train_m}
    std::vector<int> r_list;          // defaults to {dgp.n_factors}
    std::vector<double> eta_list{0.45};
    std::vector<double> alpha_list{0.05};
    RandomizerConfig randomizer;
    WienerMcOptions critval_mc;
    int workers = 0;
    bool keep_rep_logs = false;

    std::vector<int> effective_m() const { return m_list.empty() ? std::vector<int>{dgp.train_m} : m_list; }
    std::vector<int> effective_r() const { return r_list.empty() ? std::vector<int>{dgp.n_factors} : r_list; }

    void validate() const {
        if (replications < 1) throw InvalidInput("replications must be >= 1");
        if (eta_list.empty() || alpha_list.empty())
            throw InvalidInput("threshold grid must contain at least one eta and one alpha");
        randomizer.validate();
    }
};

struct DelayQuantiles {
    double min = std::nan("");
    double p25 = std::nan("");
    double p50 = std::nan("");
    double p75 = std::nan("");
    double max = std::nan("");
    int count = 0;
};

struct McCell {
    Scenario scenario = Scenario::null_stable;
    int m = 0;
    int r = 0;
    double eta = 0.0;
    double alpha = 0.0;
    int replications = 0;
    double detect_fraction_total = 0.0;
    double detect_fraction_in_window = 0.0;
    DelayQuantiles delay;
};

struct McRepLog {
    int m = 0;
    int r = 0;
    double eta = 0.0;
    double alpha = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    bool stopped = false;
    long tau_hat = 0;
};

struct McResult {
    std::vector<McCell> cells;
    std::vector<McRepLog> logs;
};

namespace mc_detail {

struct RepOutcome {
    std::uint64_t seed = 0;
    std::vector<bool> stopped;   // per threshold cell
    std::vector<long> tau_hat;
};

// Gamma path for one replication, evaluated against every threshold in the
// grid; stops the eigen loop once every threshold has crossed.
inline RepOutcome run_replication(const DgpSpec& rep_spec,
                                  const std::vector<ThresholdSpec>& thresholds,
                                  const RandomizerConfig& base_cfg) {
    GeneratedPanel gp = gen_panel(rep_spec);
    RandomizerConfig cfg = base_cfg;
    cfg.seed = rep_spec.seed;

    const int m = rep_spec.train_m;
    Eigen::MatrixXd working = gp.panel.values;
    {
        const Eigen::VectorXd means = working.leftCols(m).rowwise().mean();
        working.colwise() -= means;
    }

    MonitorOptions opts;
    opts.center = false;  // already centered above
    opts.record_path = false;
    detail::GammaPipeline pipeline(working, 0, m, rep_spec.n_factors, cfg,
                                   detail::PipelineStage::double_stage, opts);

    const std::size_t n_cells = thresholds.size();
    RepOutcome out;
    out.seed = rep_spec.seed;
    out.stopped.assign(n_cells, false);
    out.tau_hat.assign(n_cells, 0);

    DetectorState state = detector_start(m, m + 1);
    std::size_t pending = n_cells;
    while (pending > 0) {
        auto trace = pipeline.step();
        if (!trace.has_value()) break;
        state = detector_step(state, GammaStat{trace->gamma, trace->psi, trace->t});
        for (std::size_t c = 0; c < n_cells; ++c) {
            if (out.stopped[c]) continue;
            if (state.d() >= thresholds[c].boundary(state.k)) {
                out.stopped[c] = true;
                out.tau_hat[c] = state.k + m;
                --pending;
            }
        }
    }
    return out;
}

inline double quantile_type7(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::nan("");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace mc_detail

// Runs the grid of (m, r, eta, alpha) cells. Replication `i` derives its seed
// as hash(base_seed, i); replications run concurrently and aggregation is an
// ordered reduction, so results are identical for any worker count.
inline McResult run_table(const McConfig& config) {
    config.validate();
    McResult result;

    for (int m : config.effective_m()) {
        for (int r : config.effective_r()) {
            std::vector<ThresholdSpec> thresholds;
            for (double eta : config.eta_list)
                for (double alpha : config.alpha_list)
                    thresholds.push_back(make_threshold(eta, alpha, m, config.critval_mc));

            const int reps = config.replications;
            std::vector<mc_detail::RepOutcome> outcomes(static_cast<std::size_t>(reps));

            auto run_range = [&](int begin, int end) {
                for (int rep = begin; rep < end; ++rep) {
                    DgpSpec rep_spec = config.dgp;
                    rep_spec.train_m = m;
                    rep_spec.n_factors = r;
                    rep_spec.seed = rng::derive_seed(config.dgp.seed, static_cast<std::uint64_t>(rep));
                    outcomes[static_cast<std::size_t>(rep)] =
                        mc_detail::run_replication(rep_spec, thresholds, config.randomizer);
                }
            };

            int workers = config.workers > 0
                              ? config.workers
                              : static_cast<int>(std::thread::hardware_concurrency());
            workers = std::max(1, std::min(workers, reps));
            if (workers == 1) {
                run_range(0, reps);
            } else {
                std::vector<std::thread> pool;
                const int chunk = (reps + workers - 1) / workers;
                for (int w = 0; w < workers; ++w) {
                    const int begin = w * chunk;
                    const int end = std::min(reps, begin + chunk);
                    if (begin < end) pool.emplace_back(run_range, begin, end);
                }
                for (auto& th : pool) th.join();
            }

            const long tau = config.dgp.tau;
            const bool has_break = config.dgp.scenario != Scenario::null_stable;
            for (std::size_t c = 0; c < thresholds.size(); ++c) {
                McCell cell;
                cell.scenario = config.dgp.scenario;
                cell.m = m;
                cell.r = r;
                cell.eta = thresholds[c].eta;
                cell.alpha = thresholds[c].alpha;
                cell.replications = reps;
                int stopped = 0;
                int in_window = 0;
                std::vector<double> delays;
                for (int rep = 0; rep < reps; ++rep) {
                    const auto& oc = outcomes[static_cast<std::size_t>(rep)];
                    if (config.keep_rep_logs) {
                        result.logs.push_back({m, r, thresholds[c].eta, thresholds[c].alpha, rep,
                                               oc.seed, oc.stopped[c], oc.tau_hat[c]});
                    }
                    if (!oc.stopped[c]) continue;
                    ++stopped;
                    if (has_break) {
                        const long th = oc.tau_hat[c];
                        if (th >= tau && th < tau + m) ++in_window;
                        if (th >= tau) delays.push_back(static_cast<double>(th - tau));
                    }
                }
                cell.detect_fraction_total = static_cast<double>(stopped) / reps;
                cell.detect_fraction_in_window = static_cast<double>(in_window) / reps;
                std::sort(delays.begin(), delays.end());
                cell.delay.count = static_cast<int>(delays.size());
                if (!delays.empty()) {
                    cell.delay.min = delays.front();
                    cell.delay.p25 = mc_detail::quantile_type7(delays, 0.25);
                    cell.delay.p50 = mc_detail::quantile_type7(delays, 0.50);
                    cell.delay.p75 = mc_detail::quantile_type7(delays, 0.75);
                    cell.delay.max = delays.back();
                }
                result.cells.push_back(cell);
            }
        }
    }
    return result;
}

enum class TableFormat { csv, markdown };

inline void emit_tables(const McResult& result, TableFormat format, std::ostream& out) {
    if (result.cells.empty()) throw InvalidInput("emit_tables: empty result");
    const char* cols[] = {"scenario", "m",         "r",         "eta",       "alpha",
                          "reps",     "detect_total", "detect_in_window", "delay_min",
                          "delay_p25", "delay_p50", "delay_p75", "delay_max", "n_delay"};
    const std::size_t n_cols = sizeof(cols) / sizeof(cols[0]);
    auto row_fields = [](const McCell& c) {
        char buf[64];
        std::vector<std::string> f;
        f.emplace_back(scenario_name(c.scenario));
        f.push_back(std::to_string(c.m));
        f.push_back(std::to_string(c.r));
        auto fmt = [&](double v) {
            std::snprintf(buf, sizeof(buf), "%g", v);
            return std::string(buf);
        };
        f.push_back(fmt(c.eta));
        f.push_back(fmt(c.alpha));
        f.push_back(std::to_string(c.replications));
        auto fmt4 = [&](double v) {
            if (std::isnan(v)) return std::string("");
            std::snprintf(buf, sizeof(buf), "%.4f", v);
            return std::string(buf);
        };
        f.push_back(fmt4(c.detect_fraction_total));
        f.push_back(fmt4(c.detect_fraction_in_window));
        f.push_back(fmt4(c.delay.min));
        f.push_back(fmt4(c.delay.p25));
        f.push_back(fmt4(c.delay.p50));
        f.push_back(fmt4(c.delay.p75));
        f.push_back(fmt4(c.delay.max));
        f.push_back(std::to_string(c.delay.count));
        return f;
    };

    if (format == TableFormat::csv) {
        for (std::size_t i = 0; i < n_cols; ++i) out << cols[i] << (i + 1 < n_cols ? "," : "\n");
        for (const auto& cell : result.cells) {
            const auto fields = row_fields(cell);
            for (std::size_t i = 0; i < fields.size(); ++i)
                out << fields[i] << (i + 1 < fields.size() ? "," : "\n");
        }
    } else {
        out << '|';
        for (std::size_t i = 0; i < n_cols; ++i) out << ' ' << cols[i] << " |";
        out << "\n|";
        for (std::size_t i = 0; i < n_cols; ++i) out << " --- |";
        out << '\n';
        for (const auto& cell : result.cells) {
            const auto fields = row_fields(cell);
            out << '|';
            for (const auto& f : fields) out << ' ' << f << " |";
            out << '\n';
        }
    }
}

}  // namespace facmon

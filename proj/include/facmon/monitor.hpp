#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "facmon/critical_values.hpp"
#include "facmon/panel.hpp"
#include "facmon/randomize.hpp"
#include "facmon/rolling.hpp"
#include "facmon/spectrum.hpp"

namespace facmon {

// CUSUM of the centered, standardised randomised sequence:
// d(k; m) = | sum_{t=m+1}^{m+k} (Gamma_t - 1)/sqrt(2) |.
struct DetectorState {
    double cumulative_sum = 0.0;
    long k = 0;
    int m = 0;
    long next_t = 0;  // expected time stamp of the next statistic

    double d() const { return std::abs(cumulative_sum); }
};

inline DetectorState detector_start(int m, long first_t) {
    return DetectorState{0.0, 0, m, first_t};
}

inline DetectorState detector_step(DetectorState state, const GammaStat& gamma) {
    if (gamma.t != state.next_t) throw InvalidInput("detector_step: out-of-order time stamp");
    state.cumulative_sum += (gamma.value - 1.0) * M_SQRT1_2;
    state.k += 1;
    state.next_t += 1;
    return state;
}

struct PathPoint {
    long k = 0;
    long t = 0;
    double d = 0.0;
    double nu = 0.0;
    bool crossed = false;
};

struct Detection {
    bool stopped = false;
    long k_hat = 0;    // stopping index, or T_m when the stream ends first
    long tau_hat = 0;  // k_hat + m in original panel time, only when stopped
    double detector_at_stop = 0.0;
    double threshold_at_stop = 0.0;
    int r_used = 0;
    long segment_start = 1;  // original time of the first training observation
    std::vector<PathPoint> path;
};

struct MonitorOptions {
    bool center = true;
    bool record_path = true;
    std::ostream* diag_out = nullptr;      // CSV: t,lambda,phi,theta,psi,gamma
    std::ostream* spectrum_out = nullptr;  // CSV: t,k,eigenvalue
};

namespace detail {

enum class PipelineStage { double_stage, single_stage };

// Advances the rolling window / covariance / spectrum / randomiser over one
// panel segment. Column c of `segment` is original time `t_offset + c + 1`.
class GammaPipeline {
public:
    GammaPipeline(const Eigen::MatrixXd& segment, long t_offset, int m, int r,
                  const RandomizerConfig& cfg, PipelineStage stage, const MonitorOptions& opts)
        : segment_(segment),
          t_offset_(t_offset),
          m_(m),
          r_(r),
          cfg_(cfg),
          stage_(stage),
          opts_(opts),
          window_(static_cast<int>(segment.rows()), m) {
        const int n = static_cast<int>(segment_.rows());
        const long periods = segment_.cols();
        if (m_ < 2) throw InvalidInput("training length m must be at least 2");
        if (r_ < 0 || r_ >= n) throw InvalidInput("number of factors r must satisfy 0 <= r < N");
        if (stage_ == PipelineStage::single_stage && r_ < 1)
            throw InvalidInput("vanishing-factor monitor needs r >= 1");
        if (periods < m_ + 1) throw InvalidInput("stream shorter than m + 1 observations");
        for (int c = 0; c < m_; ++c) window_.push(segment_.col(c));
        cov_ = rolling_covariance(window_);
        cursor_ = m_;
    }

    bool exhausted() const { return cursor_ >= segment_.cols(); }
    long monitored_steps() const { return segment_.cols() - m_; }

    // Slides the window one step without computing any statistic.
    void advance_without_statistic() {
        if (exhausted()) return;
        const Eigen::VectorXd incoming = segment_.col(cursor_);
        const Eigen::VectorXd outgoing = window_.oldest();
        cov_ = update_covariance(std::move(cov_), incoming, outgoing);
        window_.push(incoming);
        ++cursor_;
        if (++updates_since_sym_ >= 64) {
            resymmetrize(cov_);
            updates_since_sym_ = 0;
        }
    }

    // Produces the statistic for the next monitored time, or nullopt at the
    // end of the segment.
    std::optional<RandomizerTrace> step() {
        if (exhausted()) return std::nullopt;
        const Eigen::VectorXd incoming = segment_.col(cursor_);
        const Eigen::VectorXd outgoing = window_.oldest();
        cov_ = update_covariance(std::move(cov_), incoming, outgoing);
        window_.push(incoming);
        ++cursor_;
        if (++updates_since_sym_ >= 64) {
            resymmetrize(cov_);
            updates_since_sym_ = 0;
        }
        const long t = t_offset_ + cursor_;
        cov_.t = t;
        const EigenSpectrum spectrum = eigen_symmetric(cov_);
        if (opts_.spectrum_out != nullptr) dump_spectrum(spectrum);
        RandomizerTrace trace =
            stage_ == PipelineStage::double_stage
                ? randomize_for_time(spectrum, r_, m_, cfg_, t)
                : randomize_for_time_single_stage(spectrum, r_, m_, cfg_, t);
        if (opts_.diag_out != nullptr) {
            char line[192];
            std::snprintf(line, sizeof(line), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g\n", trace.t,
                          trace.lambda, trace.phi, trace.theta, trace.psi, trace.gamma);
            (*opts_.diag_out) << line;
        }
        return trace;
    }

private:
    void dump_spectrum(const EigenSpectrum& spectrum) const {
        for (int k = 1; k <= spectrum.size(); ++k) {
            (*opts_.spectrum_out) << spectrum.t << ',' << k << ',' << spectrum.lambda(k) << '\n';
        }
    }

    const Eigen::MatrixXd& segment_;
    long t_offset_;
    int m_;
    int r_;
    RandomizerConfig cfg_;
    PipelineStage stage_;
    MonitorOptions opts_;
    RollingWindow window_;
    CovarianceMatrix cov_;
    long cursor_ = 0;
    int updates_since_sym_ = 0;
};

// skip_steps > 0 slides the window past the first monitored times without
// feeding the detector; restarted segments skip one step so monitoring
// resumes at tau_hat + m + 1 and successive detections are m + 1 apart.
inline Detection run_segment(const Eigen::MatrixXd& segment, long t_offset, int m, int r,
                             const ThresholdSpec& threshold, const RandomizerConfig& cfg,
                             PipelineStage stage, const MonitorOptions& opts,
                             int skip_steps = 0) {
    threshold.validate();
    cfg.validate();
    if (threshold.m != m) throw InvalidInput("threshold was built for a different m");

    Eigen::MatrixXd working = segment;
    if (opts.center) {
        const Eigen::VectorXd means = working.leftCols(m).rowwise().mean();
        working.colwise() -= means;
    }

    GammaPipeline pipeline(working, t_offset, m, r, cfg, stage, opts);
    for (int s = 0; s < skip_steps; ++s) pipeline.advance_without_statistic();
    DetectorState state = detector_start(m, t_offset + m + 1 + skip_steps);

    Detection det;
    det.r_used = r;
    det.segment_start = t_offset + 1;
    while (auto trace = pipeline.step()) {
        state = detector_step(state, GammaStat{trace->gamma, trace->psi, trace->t});
        const double nu = threshold.boundary(state.k);
        const bool crossed = state.d() >= nu;
        if (opts.record_path) det.path.push_back({state.k, trace->t, state.d(), nu, crossed});
        if (crossed) {
            det.stopped = true;
            det.k_hat = state.k;
            det.tau_hat = t_offset + skip_steps + state.k + m;
            det.detector_at_stop = state.d();
            det.threshold_at_stop = nu;
            return det;
        }
    }
    det.stopped = false;
    det.k_hat = pipeline.monitored_steps() - skip_steps;
    return det;
}

}  // namespace detail

// Open-ended sequential test over one panel: train on the first m
// observations, monitor t = m+1..T, stop at the first boundary crossing.
inline Detection run_online(const Panel& panel, int m, int r, const ThresholdSpec& threshold,
                            const RandomizerConfig& cfg, const MonitorOptions& opts = {}) {
    return detail::run_segment(panel.values, 0, m, r, threshold, cfg,
                               detail::PipelineStage::double_stage, opts);
}

// Vanishing-factor variant: single randomisation driven by the r-th
// eigenvalue; a detection signals that a factor disappeared.
inline Detection monitor_vanishing(const Panel& panel, int m, int r,
                                   const ThresholdSpec& threshold, const RandomizerConfig& cfg,
                                   const MonitorOptions& opts = {}) {
    return detail::run_segment(panel.values, 0, m, r, threshold, cfg,
                               detail::PipelineStage::single_stage, opts);
}

// Calibrated default for the single-stage monitor. The no-vanish null keeps a
// spiked r-th eigenvalue, so the transform centre sits much lower than the
// two-stage default.
inline RandomizerConfig vanishing_default_config() {
    RandomizerConfig cfg;
    cfg.g = ScalarTransform::scaled_power(0.58, 5.0);
    return cfg;
}

struct RestartPolicy {
    enum class RChoice { fixed, auto_estimate };
    RChoice choice = RChoice::auto_estimate;
    int fixed_r = 0;
    int k_max = 8;  // cap for the eigenvalue-ratio estimate
};

namespace detail {

inline int resolve_r(const Eigen::MatrixXd& segment, int m, const RestartPolicy& policy,
                     bool center) {
    if (policy.choice == RestartPolicy::RChoice::fixed) return policy.fixed_r;
    Eigen::MatrixXd training = segment.leftCols(m);
    if (center) {
        const Eigen::VectorXd means = training.rowwise().mean();
        training.colwise() -= means;
    }
    RollingWindow window(static_cast<int>(training.rows()), m);
    for (int c = 0; c < m; ++c) window.push(training.col(c));
    const EigenSpectrum spectrum = eigen_symmetric(rolling_covariance(window));
    const int k_max = std::min(policy.k_max, static_cast<int>(training.rows()) - 2);
    return estimate_num_factors(spectrum, std::max(1, k_max));
}

}  // namespace detail

// Multi-break protocol: after a detection at tau_hat, re-center and
// re-estimate on [tau_hat, tau_hat + m), resume monitoring at tau_hat + m + 1
// with the detector reset, while more than m observations remain. Detections
// are reported in original panel time and are spaced by at least m + 1.
inline std::vector<Detection> run_with_restarts(const Panel& panel, int m,
                                                const RestartPolicy& policy,
                                                const ThresholdSpec& threshold,
                                                const RandomizerConfig& cfg,
                                                const MonitorOptions& opts = {}) {
    const long T = panel.n_periods();
    if (T <= 2L * m) throw InvalidInput("restart protocol needs T > 2m");

    std::vector<Detection> detections;
    long segment_start = 1;  // original time of first training observation
    bool restarted = false;
    while (T - segment_start + 1 >= m + 1 + (restarted ? 1 : 0)) {
        const Eigen::MatrixXd segment =
            panel.values.rightCols(T - segment_start + 1);
        const int r = detail::resolve_r(segment, m, policy, opts.center);
        Detection det =
            detail::run_segment(segment, segment_start - 1, m, r, threshold, cfg,
                                detail::PipelineStage::double_stage, opts, restarted ? 1 : 0);
        if (!det.stopped) break;
        detections.push_back(det);
        if (T - det.tau_hat <= m) break;  // window can never refill
        segment_start = det.tau_hat;
        restarted = true;
    }
    return detections;
}

}  // namespace facmon

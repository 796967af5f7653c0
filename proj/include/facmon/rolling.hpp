#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "facmon/panel.hpp"

namespace facmon {

// Sliding store of the last m observation vectors. Single-owner mutable
// state: one writer advances it, snapshots go out as values.
class RollingWindow {
public:
    RollingWindow(int n_series, int length)
        : buffer_(n_series, length), m_(length), count_(0), head_(0), t_(0) {
        if (n_series < 1 || length < 1)
            throw InvalidInput("rolling window needs n_series >= 1 and length >= 1");
    }

    int length() const { return m_; }
    int size() const { return count_; }
    bool full() const { return count_ == m_; }
    long current_time() const { return t_; }

    // Appends the observation for time t_+1, evicting the vector from time
    // t_-m+1 once full.
    void push(const Eigen::VectorXd& x) {
        if (x.size() != buffer_.rows()) throw InvalidInput("observation length mismatch");
        buffer_.col(head_) = x;
        head_ = (head_ + 1) % m_;
        if (count_ < m_) ++count_;
        ++t_;
    }

    // Oldest stored vector (the one the next push evicts when full).
    Eigen::VectorXd oldest() const {
        if (count_ == 0) throw std::logic_error("rolling window is empty");
        const int idx = full() ? head_ : 0;
        return buffer_.col(idx);
    }

    const Eigen::MatrixXd& raw_buffer() const { return buffer_; }

private:
    Eigen::MatrixXd buffer_;  // N x m, circular over columns
    int m_;
    int count_;
    int head_;
    long t_;
};

// Rolling second-moment matrix (1/m) sum X_k X_k' over the window. No mean
// subtraction here; centering is the panel module's job.
struct CovarianceMatrix {
    Eigen::MatrixXd values;  // N x N symmetric
    int m = 0;
    long t = 0;
};

inline CovarianceMatrix rolling_covariance(const RollingWindow& window) {
    if (!window.full()) throw InvalidInput("rolling_covariance requires a full window");
    const Eigen::MatrixXd& buf = window.raw_buffer();
    CovarianceMatrix cov;
    cov.values = Eigen::MatrixXd::Zero(buf.rows(), buf.rows());
    cov.values.selfadjointView<Eigen::Lower>().rankUpdate(buf, 1.0 / window.length());
    cov.values.triangularView<Eigen::StrictlyUpper>() = cov.values.transpose();
    cov.m = window.length();
    cov.t = window.current_time();
    return cov;
}

// Streaming shift: adds incoming/m, drops outgoing/m as a fused rank-one
// pair, so incoming == outgoing leaves the matrix bit-identical.
inline CovarianceMatrix update_covariance(CovarianceMatrix cov, const Eigen::VectorXd& incoming,
                                          const Eigen::VectorXd& outgoing) {
    const Eigen::Index n = cov.values.rows();
    if (incoming.size() != n || outgoing.size() != n)
        throw InvalidInput("update_covariance: vector dimension mismatch");
    if (cov.m < 1) throw InvalidInput("update_covariance: covariance has no window length");
    const double w = 1.0 / cov.m;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double in_j = incoming(j);
        const double out_j = outgoing(j);
        for (Eigen::Index i = 0; i < n; ++i) {
            cov.values(i, j) += (incoming(i) * in_j - outgoing(i) * out_j) * w;
        }
    }
    cov.t += 1;
    return cov;
}

// Drift control for long update chains.
inline void resymmetrize(CovarianceMatrix& cov) {
    cov.values = ((cov.values + cov.values.transpose()) * 0.5).eval();
}

}  // namespace facmon

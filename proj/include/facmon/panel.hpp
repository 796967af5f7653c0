#pragma once

#include <Eigen/Dense>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace facmon {

// Thrown for malformed user input (files, flags, configs). The CLI maps this
// to exit code 2; anything else escaping to main is a runtime failure (3).
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Orientation { rows_are_time, rows_are_series };

struct PanelMeta {
    std::vector<std::string> series_labels;
    std::vector<std::string> time_labels;
    bool centered = false;
};

// Observations laid out (series, time) so one time step is a contiguous
// column. Immutable by convention after construction.
struct Panel {
    Eigen::MatrixXd values;  // N x T
    PanelMeta meta;

    int n_series() const { return static_cast<int>(values.rows()); }
    int n_periods() const { return static_cast<int>(values.cols()); }

    static Panel from_matrix(Eigen::MatrixXd m, PanelMeta meta = {}) {
        if (m.rows() < 2 || m.cols() < 2)
            throw InvalidInput("panel must have at least 2 series and 2 periods");
        if (!m.allFinite()) throw InvalidInput("panel contains non-finite entries");
        if (!meta.series_labels.empty() &&
            meta.series_labels.size() != static_cast<std::size_t>(m.rows()))
            throw InvalidInput("series label count does not match panel");
        if (!meta.time_labels.empty() &&
            meta.time_labels.size() != static_cast<std::size_t>(m.cols()))
            throw InvalidInput("time label count does not match panel");
        return Panel{std::move(m), std::move(meta)};
    }
};

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    const char* s = tok.c_str();
    char* end = nullptr;
    out = std::strtod(s, &end);
    if (end == s) return false;
    while (*end != '\0') {
        if (!std::isspace(static_cast<unsigned char>(*end))) return false;
        ++end;
    }
    return true;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace detail

// Reads a rectangular numeric CSV. Decimal point and scientific notation are
// accepted; an optional single header row and/or label column is detected by
// the leading token failing numeric parse. Orientation is declared by the
// caller, never guessed: rows_are_time means each file row is one period.
inline Panel load_csv(const std::string& path, Orientation orientation,
                      std::istream* stream_override = nullptr) {
    std::ifstream file;
    std::istream* in = stream_override;
    if (in == nullptr) {
        file.open(path);
        if (!file) throw InvalidInput("cannot open '" + path + "'");
        in = &file;
    }

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(*in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        rows.push_back(detail::split_csv_line(line));
    }
    if (rows.empty()) throw InvalidInput("empty CSV file '" + path + "'");

    double tmp;
    std::vector<std::string> header_row;
    std::size_t first_data_row = 0;
    if (!detail::parse_double(rows[0].back(), tmp)) {
        header_row = rows[0];
        first_data_row = 1;
        if (rows.size() == 1) throw InvalidInput("CSV '" + path + "' has a header but no data");
    }

    const std::size_t n_rows = rows.size() - first_data_row;
    bool label_column = !detail::parse_double(rows[first_data_row][0], tmp);

    std::vector<std::string> row_labels;
    const std::size_t width = rows[first_data_row].size();
    const std::size_t n_cols = width - (label_column ? 1 : 0);
    if (n_cols == 0) throw InvalidInput("CSV '" + path + "' has no numeric columns");

    Eigen::MatrixXd grid(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    for (std::size_t i = 0; i < n_rows; ++i) {
        const auto& fields = rows[first_data_row + i];
        if (fields.size() != width) {
            std::ostringstream msg;
            msg << "ragged CSV: row " << (first_data_row + i + 1) << " has " << fields.size()
                << " fields, expected " << width;
            throw InvalidInput(msg.str());
        }
        if (label_column) row_labels.push_back(fields[0]);
        for (std::size_t j = 0; j < n_cols; ++j) {
            double v;
            const std::string& cell = fields[j + (label_column ? 1 : 0)];
            if (!detail::parse_double(cell, v)) {
                std::ostringstream msg;
                msg << "non-numeric cell '" << cell << "' at row " << (first_data_row + i + 1)
                    << ", column " << (j + (label_column ? 1 : 0) + 1);
                throw InvalidInput(msg.str());
            }
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "non-finite value at row " << (first_data_row + i + 1) << ", column "
                    << (j + (label_column ? 1 : 0) + 1);
                throw InvalidInput(msg.str());
            }
            grid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }

    std::vector<std::string> col_labels;
    if (!header_row.empty()) {
        std::size_t skip = header_row.size() - n_cols;  // drop corner cell(s)
        for (std::size_t j = skip; j < header_row.size(); ++j) col_labels.push_back(header_row[j]);
    }

    PanelMeta meta;
    if (orientation == Orientation::rows_are_time) {
        meta.series_labels = col_labels;
        meta.time_labels = row_labels;
        return Panel::from_matrix(grid.transpose(), std::move(meta));
    }
    meta.series_labels = row_labels;
    meta.time_labels = col_labels;
    return Panel::from_matrix(std::move(grid), std::move(meta));
}

// Writes with max_digits10 precision so finite doubles round-trip bit-exactly.
inline void save_csv(const Panel& panel, const std::string& path,
                     Orientation orientation = Orientation::rows_are_time) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    const Eigen::MatrixXd grid = (orientation == Orientation::rows_are_time)
                                     ? panel.values.transpose()
                                     : panel.values;
    char buf[64];
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        for (Eigen::Index j = 0; j < grid.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", grid(i, j));
            out << buf << (j + 1 < grid.cols() ? "," : "");
        }
        out << '\n';
    }
    if (!out) throw InvalidInput("write failed for '" + path + "'");
}

// Subtracts each series' mean over the training window t = 1..m from the
// whole series. The training mean (not a rolling one) keeps monitoring free
// of look-ahead; re-centering happens at restarts.
inline Panel center(const Panel& panel, int window_m) {
    if (window_m < 1 || window_m > panel.n_periods())
        throw InvalidInput("centering window out of range [1, T]");
    Panel out = panel;
    const Eigen::VectorXd means =
        panel.values.leftCols(window_m).rowwise().mean();
    out.values.colwise() -= means;
    out.meta.centered = true;
    return out;
}

// Optional preprocessing: divides each series by its standard deviation over
// the training window. Off by default everywhere; the monitoring statistic is
// already invariant to common rescaling, this equalises per-series scales.
inline Panel standardize(const Panel& panel, int window_m) {
    if (window_m < 2 || window_m > panel.n_periods())
        throw InvalidInput("standardization window out of range [2, T]");
    Panel out = panel;
    const auto training = panel.values.leftCols(window_m);
    const Eigen::VectorXd means = training.rowwise().mean();
    for (int i = 0; i < panel.n_series(); ++i) {
        const double var =
            (training.row(i).array() - means(i)).square().sum() / (window_m - 1);
        if (!(var > 0.0)) {
            throw InvalidInput("series " + std::to_string(i + 1) +
                               " has zero variance over the training window");
        }
        out.values.row(i) /= std::sqrt(var);
    }
    return out;
}

}  // namespace facmon

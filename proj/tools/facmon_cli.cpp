// facmon: online structural-break monitoring for large factor panels.
//
// Subcommands:
//   monitor   run the sequential detector over a CSV panel (or stdin stream)
//   simulate  Monte Carlo size/power/delay tables over simulated panels
//   critval   boundary critical values (closed form, lookup, or simulation)
//   dgp       generate a simulated panel plus a planted-truth sidecar

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "facmon/critical_values.hpp"
#include "facmon/monitor.hpp"
#include "facmon/panel.hpp"
#include "facmon/simulate.hpp"

using nlohmann::json;
using namespace facmon;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitRuntimeFailure = 3;

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed_flag) {
    if (seed_flag.has_value()) return *seed_flag;
    std::random_device rd;
    const std::uint64_t seed =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::fprintf(stderr, "seed: %" PRIu64 "\n", seed);
    return seed;
}

Orientation parse_orientation(const std::string& name) {
    if (name == "rows_are_time") return Orientation::rows_are_time;
    if (name == "rows_are_series") return Orientation::rows_are_series;
    throw InvalidInput("orientation must be rows_are_time or rows_are_series");
}

json detection_to_json(const Detection& det) {
    return json{{"tau_hat", det.tau_hat},
                {"k_hat", det.k_hat},
                {"detector_at_stop", det.detector_at_stop},
                {"threshold_at_stop", det.threshold_at_stop},
                {"segment_start", det.segment_start},
                {"r_used", det.r_used}};
}

// ---------------------------------------------------------------------------
// monitor
// ---------------------------------------------------------------------------

struct MonitorArgs {
    std::string csv_path;
    int m = 100;
    std::string r = "auto";
    double eta = 0.45;
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    bool restart = false;
    std::string orientation = "rows_are_time";
    bool standardize = false;
    std::string path_out;
    std::string spectrum_out;
    std::string diag_out;
    int mc_reps = 100000;
    int mc_grid = 10000;
};

json monitor_config_json(const MonitorArgs& args, const ThresholdSpec& threshold,
                         std::uint64_t seed, const std::vector<int>& r_used) {
    return json{{"m", args.m},
                {"r", args.r},
                {"r_used", r_used},
                {"eta", args.eta},
                {"alpha", args.alpha},
                {"critical_value", threshold.critical_value},
                {"seed", seed},
                {"restart", args.restart},
                {"orientation", args.orientation},
                {"source", args.csv_path}};
}

int parse_fixed_r(const std::string& text) {
    std::size_t used = 0;
    int r = 0;
    try {
        r = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw InvalidInput("--r must be a nonnegative integer or 'auto'");
    }
    if (used != text.size() || r < 0)
        throw InvalidInput("--r must be a nonnegative integer or 'auto'");
    return r;
}

int run_monitor_stream(const MonitorArgs& args, const ThresholdSpec& threshold,
                       const RandomizerConfig& cfg);

int cmd_monitor(const MonitorArgs& args) {
    if (args.m < 2) throw InvalidInput("--m must be at least 2");
    RandomizerConfig cfg;
    cfg.seed = resolve_seed(args.seed);
    cfg.validate();

    WienerMcOptions mc;
    mc.replications = args.mc_reps;
    mc.grid_points = args.mc_grid;
    mc.seed = cfg.seed;
    const ThresholdSpec threshold = make_threshold(args.eta, args.alpha, args.m, mc);

    if (args.csv_path == "-") return run_monitor_stream(args, threshold, cfg);

    Panel panel = load_csv(args.csv_path, parse_orientation(args.orientation));
    if (panel.n_periods() < args.m + 1) throw InvalidInput("panel has fewer than m + 1 periods");
    if (args.standardize) panel = standardize(panel, args.m);

    const bool r_auto = (args.r == "auto");
    RestartPolicy policy;
    if (r_auto) {
        policy.choice = RestartPolicy::RChoice::auto_estimate;
    } else {
        policy.choice = RestartPolicy::RChoice::fixed;
        policy.fixed_r = parse_fixed_r(args.r);
        if (policy.fixed_r >= panel.n_series()) throw InvalidInput("--r must satisfy 0 <= r < N");
    }

    std::ofstream spectrum_file, diag_file, path_file;
    MonitorOptions opts;
    opts.record_path = true;
    if (!args.spectrum_out.empty()) {
        spectrum_file.open(args.spectrum_out);
        if (!spectrum_file) throw InvalidInput("cannot write '" + args.spectrum_out + "'");
        spectrum_file << "t,k,eigenvalue\n";
        opts.spectrum_out = &spectrum_file;
    }
    if (!args.diag_out.empty()) {
        diag_file.open(args.diag_out);
        if (!diag_file) throw InvalidInput("cannot write '" + args.diag_out + "'");
        diag_file << "t,lambda,phi,theta,psi,gamma\n";
        opts.diag_out = &diag_file;
    }
    if (!args.path_out.empty()) {
        path_file.open(args.path_out);
        if (!path_file) throw InvalidInput("cannot write '" + args.path_out + "'");
        path_file << "k,t,d,nu,crossed\n";
    }

    auto dump_path = [&](const Detection& det) {
        if (!path_file.is_open()) return;
        for (const auto& p : det.path)
            path_file << p.k << ',' << p.t << ',' << p.d << ',' << p.nu << ','
                      << (p.crossed ? 1 : 0) << '\n';
    };

    std::vector<Detection> detections;
    std::vector<int> r_used;
    if (args.restart) {
        detections = run_with_restarts(panel, args.m, policy, threshold, cfg, opts);
        for (const auto& det : detections) {
            r_used.push_back(det.r_used);
            dump_path(det);
        }
    } else {
        const int r = policy.choice == RestartPolicy::RChoice::fixed
                          ? policy.fixed_r
                          : detail::resolve_r(panel.values, args.m, policy, opts.center);
        r_used.push_back(r);
        const Detection det = run_online(panel, args.m, r, threshold, cfg, opts);
        dump_path(det);
        if (det.stopped) detections.push_back(det);
    }

    json report;
    report["schema_version"] = 1;
    report["config"] = monitor_config_json(args, threshold, cfg.seed, r_used);
    report["detections"] = json::array();
    for (const auto& det : detections) report["detections"].push_back(detection_to_json(det));
    if (!args.path_out.empty()) report["path_file"] = args.path_out;
    std::cout << report.dump(2) << '\n';
    return 0;
}

// Streaming replay: one CSV row (one period, rows_are_time) per stdin line;
// emits a detector state line per monitored step and the JSON report at the
// end. A detection always lands on the row that produced it, so the restart
// protocol re-trains starting from that same row.
int run_monitor_stream(const MonitorArgs& args, const ThresholdSpec& threshold,
                       const RandomizerConfig& cfg) {
    if (args.orientation != "rows_are_time")
        throw InvalidInput("streaming mode reads one period per line: use rows_are_time");
    if (args.r == "auto")
        throw InvalidInput("streaming mode needs a fixed --r; 'auto' would peek at the stream");
    const int r = parse_fixed_r(args.r);
    const int m = args.m;

    std::string line;
    long t = 0;              // original time of the row being processed
    long segment_start = 1;  // original time of the current training start
    int n_series = -1;
    std::vector<Eigen::VectorXd> training;
    Eigen::VectorXd training_mean;
    std::optional<RollingWindow> window;
    std::optional<CovarianceMatrix> cov;
    DetectorState state;
    int updates_since_sym = 0;
    bool monitoring = false;
    bool skip_next = false;  // restarted segments resume at tau_hat + m + 1
    std::vector<Detection> detections;

    std::cout << "k,t,d,nu,crossed\n";
    while (std::getline(std::cin, line)) {
        if (facmon::detail::trim(line).empty()) continue;
        const auto fields = facmon::detail::split_csv_line(line);
        Eigen::VectorXd x(static_cast<Eigen::Index>(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            double v;
            if (!facmon::detail::parse_double(fields[i], v))
                throw InvalidInput("non-numeric cell in stream at period " + std::to_string(t + 1));
            x(static_cast<Eigen::Index>(i)) = v;
        }
        if (n_series < 0) {
            n_series = static_cast<int>(x.size());
            if (n_series < 2) throw InvalidInput("stream rows need at least 2 series");
            if (r >= n_series) throw InvalidInput("--r must satisfy 0 <= r < N");
        } else if (x.size() != n_series) {
            throw InvalidInput("ragged stream row at period " + std::to_string(t + 1));
        }
        ++t;

        if (!monitoring) {
            training.push_back(x);
            if (static_cast<int>(training.size()) == m) {
                training_mean = Eigen::VectorXd::Zero(n_series);
                for (const auto& col : training) training_mean += col;
                training_mean /= static_cast<double>(m);
                window.emplace(n_series, m);
                for (const auto& col : training) window->push(col - training_mean);
                cov = rolling_covariance(*window);
                monitoring = true;
                training.clear();
            }
            continue;
        }

        const Eigen::VectorXd centered = x - training_mean;
        const Eigen::VectorXd outgoing = window->oldest();
        cov = update_covariance(std::move(*cov), centered, outgoing);
        window->push(centered);
        if (++updates_since_sym >= 64) {
            resymmetrize(*cov);
            updates_since_sym = 0;
        }
        if (skip_next) {
            skip_next = false;
            state = detector_start(m, t + 1);
            continue;
        }
        if (state.m == 0) state = detector_start(m, t);

        cov->t = t;
        const EigenSpectrum spectrum = eigen_symmetric(*cov);
        const RandomizerTrace trace = randomize_for_time(spectrum, r, m, cfg, t);
        state = detector_step(state, GammaStat{trace.gamma, trace.psi, trace.t});
        const double nu = threshold.boundary(state.k);
        const bool crossed = state.d() >= nu;
        std::cout << state.k << ',' << t << ',' << state.d() << ',' << nu << ','
                  << (crossed ? 1 : 0) << std::endl;
        if (!crossed) continue;

        Detection det;
        det.stopped = true;
        det.k_hat = state.k;
        det.tau_hat = t;
        det.detector_at_stop = state.d();
        det.threshold_at_stop = nu;
        det.r_used = r;
        det.segment_start = segment_start;
        detections.push_back(det);
        if (!args.restart) break;

        segment_start = t;  // re-estimate from the detection period
        monitoring = false;
        skip_next = true;
        state = DetectorState{};
        training.clear();
        training.push_back(x);
        window.reset();
        cov.reset();
    }

    json report;
    report["schema_version"] = 1;
    report["config"] = monitor_config_json(args, threshold, cfg.seed, {r});
    report["detections"] = json::array();
    for (const auto& det : detections) report["detections"].push_back(detection_to_json(det));
    std::cout << report.dump(2) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct KeyValueConfig {
    std::map<std::string, std::string> values;

    static KeyValueConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw InvalidInput("cannot open config '" + path + "'");
        KeyValueConfig cfg;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            const std::string trimmed = facmon::detail::trim(line);
            if (trimmed.empty()) continue;
            auto sep = trimmed.find('=');
            if (sep == std::string::npos) sep = trimmed.find(':');
            if (sep == std::string::npos)
                throw InvalidInput("config line " + std::to_string(line_no) +
                                   " is not 'key = value'");
            const std::string key = facmon::detail::trim(trimmed.substr(0, sep));
            const std::string value = facmon::detail::trim(trimmed.substr(sep + 1));
            if (key.empty() || value.empty())
                throw InvalidInput("config line " + std::to_string(line_no) +
                                   " has an empty key or value");
            cfg.values[key] = value;
        }
        if (cfg.values.empty()) throw InvalidInput("config '" + path + "' defines no keys");
        return cfg;
    }

    bool has(const std::string& key) const { return values.count(key) > 0; }
    const std::string& get(const std::string& key) const { return values.at(key); }
};

template <typename T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = facmon::detail::trim(item);
        if (item.empty()) continue;
        if constexpr (std::is_same_v<T, int>) {
            out.push_back(std::stoi(item));
        } else {
            out.push_back(std::stod(item));
        }
    }
    if (out.empty()) throw InvalidInput("empty list value '" + text + "'");
    return out;
}

McConfig build_mc_config(const KeyValueConfig& kv) {
    McConfig config;
    auto get_int = [&](const char* key, int fallback) {
        return kv.has(key) ? std::stoi(kv.get(key)) : fallback;
    };
    auto get_double = [&](const char* key, double fallback) {
        return kv.has(key) ? std::stod(kv.get(key)) : fallback;
    };

    if (kv.has("scenario")) {
        const auto sc = scenario_from_name(kv.get("scenario"));
        if (!sc.has_value()) throw InvalidInput("unknown scenario '" + kv.get("scenario") + "'");
        config.dgp.scenario = *sc;
    }
    config.dgp.n_series = get_int("N", config.dgp.n_series);
    config.dgp.n_periods = get_int("T", config.dgp.n_periods);
    config.dgp.tau = get_int("tau", static_cast<int>(config.dgp.tau));
    config.dgp.snr = get_double("snr", config.dgp.snr);
    config.dgp.kappa = get_double("kappa", config.dgp.kappa);
    config.dgp.var_coef_radius = get_double("radius", config.dgp.var_coef_radius);
    config.dgp.ar_coef_new_factor = get_double("ar_new_factor", config.dgp.ar_coef_new_factor);
    config.dgp.idio_cross_decay = get_double("cross_decay", config.dgp.idio_cross_decay);
    config.dgp.idio_time_decay = get_double("time_decay", config.dgp.idio_time_decay);
    if (kv.has("seed")) config.dgp.seed = std::stoull(kv.get("seed"));
    config.replications = get_int("replications", config.replications);
    config.workers = get_int("workers", config.workers);

    if (kv.has("m")) config.m_list = parse_list<int>(kv.get("m"));
    if (kv.has("r")) config.r_list = parse_list<int>(kv.get("r"));
    if (kv.has("eta")) config.eta_list = parse_list<double>(kv.get("eta"));
    if (kv.has("alpha")) config.alpha_list = parse_list<double>(kv.get("alpha"));
    config.dgp.train_m = config.effective_m().front();
    config.dgp.n_factors = config.effective_r().front();

    config.randomizer.delta_slack = get_double("delta_slack", config.randomizer.delta_slack);
    config.randomizer.psi_log_exponent =
        get_double("psi_exponent", config.randomizer.psi_log_exponent);
    config.randomizer.n_theta_draws = get_int("R", config.randomizer.n_theta_draws);
    config.randomizer.n_gamma_draws = get_int("W", config.randomizer.n_gamma_draws);
    config.randomizer.g_scale_window_exponent =
        get_double("window_exponent", config.randomizer.g_scale_window_exponent);
    if (kv.has("g_scale") || kv.has("g_power"))
        config.randomizer.g = ScalarTransform::scaled_power(
            get_double("g_scale", kDefaultGScale), get_double("g_power", kDefaultGPower));
    if (kv.has("h_scale") || kv.has("h_power"))
        config.randomizer.h = ScalarTransform::scaled_power(get_double("h_scale", 1.0),
                                                            get_double("h_power", 2.0));
    if (kv.has("g_transform") && kv.get("g_transform") == "identity")
        config.randomizer.g = ScalarTransform::identity();
    if (kv.has("h_transform") && kv.get("h_transform") == "identity")
        config.randomizer.h = ScalarTransform::identity();
    return config;
}

struct SimulateArgs {
    std::string config_path;
    std::optional<int> reps;
    std::string out;
    std::string format = "csv";
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string jsonl;
};

int cmd_simulate(const SimulateArgs& args) {
    KeyValueConfig kv = KeyValueConfig::from_file(args.config_path);
    for (const auto& ov : args.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("--set expects key=value, got '" + ov + "'");
        kv.values[facmon::detail::trim(ov.substr(0, eq))] =
            facmon::detail::trim(ov.substr(eq + 1));
    }

    McConfig config = build_mc_config(kv);
    if (args.reps.has_value()) config.replications = *args.reps;
    if (args.workers.has_value()) config.workers = *args.workers;
    if (args.seed.has_value()) config.dgp.seed = *args.seed;
    if (!args.seed.has_value() && !kv.has("seed")) config.dgp.seed = resolve_seed(std::nullopt);
    config.keep_rep_logs = !args.jsonl.empty();
    config.validate();
    config.dgp.validate();

    TableFormat format;
    if (args.format == "csv") {
        format = TableFormat::csv;
    } else if (args.format == "markdown") {
        format = TableFormat::markdown;
    } else {
        throw InvalidInput("--format must be csv or markdown");
    }

    const McResult result = run_table(config);

    for (const auto& cell : result.cells) {
        std::ostringstream median;
        if (std::isnan(cell.delay.p50)) median << "n/a";
        else median << cell.delay.p50;
        std::fprintf(stderr,
                     "cell scenario=%s m=%d r=%d eta=%g alpha=%g reps=%d detect=%.4f "
                     "in_window=%.4f median_delay=%s\n",
                     scenario_name(cell.scenario), cell.m, cell.r, cell.eta, cell.alpha,
                     cell.replications, cell.detect_fraction_total,
                     cell.detect_fraction_in_window, median.str().c_str());
    }

    if (args.out.empty() || args.out == "-") {
        emit_tables(result, format, std::cout);
    } else {
        std::ofstream out(args.out);
        if (!out) throw InvalidInput("cannot write '" + args.out + "'");
        emit_tables(result, format, out);
    }

    if (!args.jsonl.empty()) {
        std::ofstream out(args.jsonl);
        if (!out) throw InvalidInput("cannot write '" + args.jsonl + "'");
        for (const auto& log : result.logs) {
            json entry{{"m", log.m},     {"r", log.r},       {"eta", log.eta},
                       {"alpha", log.alpha}, {"rep", log.rep}, {"seed", log.seed},
                       {"stopped", log.stopped}};
            if (log.stopped) entry["tau_hat"] = log.tau_hat;
            else entry["tau_hat"] = nullptr;
            out << entry.dump() << '\n';
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// critval
// ---------------------------------------------------------------------------

struct CritvalArgs {
    double eta = 0.45;
    double alpha = 0.05;
    std::optional<int> m;
    int mc_reps = 100000;
    int mc_grid = 10000;
    std::optional<std::uint64_t> seed;
};

int cmd_critval(const CritvalArgs& args) {
    WienerMcOptions mc;
    mc.replications = args.mc_reps;
    mc.grid_points = args.mc_grid;
    mc.seed = args.seed.has_value() ? *args.seed : 1;
    const CriticalValue cv = critical_value(args.eta, args.alpha, args.m, mc);
    std::printf("%.6f %s\n", cv.value, cv.source_name().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// dgp
// ---------------------------------------------------------------------------

struct DgpArgs {
    std::string scenario = "null";
    int N = 100;
    int T = 1000;
    int m = 100;
    int r = 2;
    long tau = 500;
    double snr = 2.0;
    double kappa = 0.5;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_dgp(const DgpArgs& args) {
    const auto scenario = scenario_from_name(args.scenario);
    if (!scenario.has_value()) throw InvalidInput("unknown scenario '" + args.scenario + "'");
    DgpSpec spec;
    spec.scenario = *scenario;
    spec.n_series = args.N;
    spec.n_periods = args.T;
    spec.train_m = args.m;
    spec.n_factors = args.r;
    spec.tau = args.tau;
    spec.snr = args.snr;
    spec.kappa = args.kappa;
    spec.seed = resolve_seed(args.seed);
    spec.validate();

    const GeneratedPanel gp = gen_panel(spec);
    save_csv(gp.panel, args.out, Orientation::rows_are_time);

    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016" PRIx64, gp.truth.loadings_digest);
    json truth{{"schema_version", 1},
               {"scenario", scenario_name(gp.truth.scenario)},
               {"seed", gp.truth.seed},
               {"n_series", spec.n_series},
               {"n_periods", spec.n_periods},
               {"n_factors", spec.n_factors},
               {"loadings_digest", digest}};
    if (gp.truth.tau.has_value()) truth["tau"] = *gp.truth.tau;
    else truth["tau"] = nullptr;

    const std::string sidecar = args.out + ".truth.json";
    std::ofstream out(sidecar);
    if (!out) throw InvalidInput("cannot write '" + sidecar + "'");
    out << truth.dump(2) << '\n';
    std::fprintf(stderr, "wrote %s and %s\n", args.out.c_str(), sidecar.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online monitoring for structural breaks in large factor panels"};
    app.require_subcommand(1);

    MonitorArgs mon;
    auto* monitor = app.add_subcommand("monitor", "run the sequential detector over a panel");
    monitor->add_option("csv", mon.csv_path, "panel CSV path, or - for stdin streaming")
        ->required();
    monitor->add_option("--m", mon.m, "training window length")->required();
    monitor->add_option("--r", mon.r, "number of factors, or 'auto'");
    monitor->add_option("--eta", mon.eta, "boundary shape exponent in [0, 0.5]");
    monitor->add_option("--alpha", mon.alpha, "significance level in (0, 1)");
    monitor->add_option("--seed", mon.seed, "randomisation seed (drawn and printed if absent)");
    monitor->add_flag("--restart", mon.restart, "keep monitoring after detections");
    monitor->add_flag("--standardize", mon.standardize,
                      "scale each series by its training-window standard deviation");
    monitor->add_option("--orientation", mon.orientation,
                        "rows_are_time (default) or rows_are_series");
    monitor->add_option("--path-out", mon.path_out, "write detector path CSV here");
    monitor->add_option("--spectrum-out", mon.spectrum_out, "write eigenvalue dump CSV here");
    monitor->add_option("--diag-out", mon.diag_out, "write randomisation trace CSV here");
    monitor->add_option("--mc-reps", mon.mc_reps, "Wiener simulation paths for custom eta");
    monitor->add_option("--mc-grid", mon.mc_grid, "Wiener simulation grid for custom eta");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power/delay tables");
    simulate->add_option("--config", sim.config_path, "key = value scenario file")->required();
    simulate->add_option("--reps", sim.reps, "replications per cell");
    simulate->add_option("--out", sim.out, "table output file (default stdout)");
    simulate->add_option("--format", sim.format, "csv or markdown");
    simulate->add_option("--workers", sim.workers, "worker threads");
    simulate->add_option("--seed", sim.seed, "base seed (drawn and printed if absent)");
    simulate->add_option("--set", sim.overrides, "override any config key (key=value)");
    simulate->add_option("--jsonl", sim.jsonl, "per-replication JSONL log file");

    CritvalArgs cv;
    auto* critval = app.add_subcommand("critval", "boundary critical value");
    critval->add_option("--eta", cv.eta, "boundary shape exponent")->required();
    critval->add_option("--alpha", cv.alpha, "significance level")->required();
    critval->add_option("--m", cv.m, "training length (required when eta = 0.5)");
    critval->add_option("--mc-reps", cv.mc_reps, "Wiener simulation paths");
    critval->add_option("--mc-grid", cv.mc_grid, "Wiener simulation grid points");
    critval->add_option("--seed", cv.seed, "simulation seed");

    DgpArgs dgp;
    auto* dgp_cmd = app.add_subcommand("dgp", "generate a simulated panel + truth sidecar");
    dgp_cmd->add_option(
        "--scenario", dgp.scenario,
        "null|break_loadings|new_factor|weak_break|idio_var_break|vanishing_factor");
    dgp_cmd->add_option("--N", dgp.N, "number of series");
    dgp_cmd->add_option("--T", dgp.T, "number of periods");
    dgp_cmd->add_option("--m", dgp.m, "training window length recorded in the sidecar");
    dgp_cmd->add_option("--r", dgp.r, "number of factors");
    dgp_cmd->add_option("--tau", dgp.tau, "break period");
    dgp_cmd->add_option("--snr", dgp.snr, "signal-to-noise ratio");
    dgp_cmd->add_option("--kappa", dgp.kappa, "weak-break eigenvalue rate exponent");
    dgp_cmd->add_option("--seed", dgp.seed, "generation seed (drawn and printed if absent)");
    dgp_cmd->add_option("--out", dgp.out, "panel CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidInput;
    }

    try {
        if (monitor->parsed()) return cmd_monitor(mon);
        if (simulate->parsed()) return cmd_simulate(sim);
        if (critval->parsed()) return cmd_critval(cv);
        return cmd_dgp(dgp);
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntimeFailure;
    }
}

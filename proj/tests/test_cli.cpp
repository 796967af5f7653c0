#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string cli_path() {
    const char* env = std::getenv("FACMON_CLI");
    if (env == nullptr) throw std::runtime_error("FACMON_CLI not set");
    return env;
}

fs::path work_dir() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "facmon_cli_test";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

RunResult run(const std::string& args, const std::string& stdin_file = "") {
    const fs::path err_file = work_dir() / "stderr.txt";
    std::string cmd = cli_path() + " " + args + " 2>" + err_file.string();
    if (!stdin_file.empty()) cmd += " <" + stdin_file;
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) throw std::runtime_error("popen failed");
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_file);
    std::stringstream ss;
    ss << err.rdbuf();
    result.err = ss.str();
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Minimal JSON-schema checker covering the subset used by the shipped
// schemas: type (incl. unions), required, properties, items, enum, const.
bool matches_type(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "number") return value.is_number();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    return false;
}

void validate_schema(const json& value, const json& schema, const std::string& where,
                     std::vector<std::string>& errors) {
    if (schema.contains("type")) {
        const json& type = schema["type"];
        bool ok = false;
        if (type.is_string()) {
            ok = matches_type(value, type.get<std::string>());
        } else {
            for (const auto& t : type) ok = ok || matches_type(value, t.get<std::string>());
        }
        if (!ok) errors.push_back(where + ": type mismatch");
    }
    if (schema.contains("const") && value != schema["const"])
        errors.push_back(where + ": const mismatch");
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema["enum"]) ok = ok || (v == value);
        if (!ok) errors.push_back(where + ": not in enum");
    }
    if (value.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(where + ": missing required key " + key.get<std::string>());
            }
        }
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema["properties"].items()) {
                if (value.contains(key))
                    validate_schema(value[key], sub, where + "." + key, errors);
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        int i = 0;
        for (const auto& item : value)
            validate_schema(item, schema["items"], where + "[" + std::to_string(i++) + "]",
                            errors);
    }
}

void expect_schema_valid(const json& value, const std::string& schema_file) {
    const char* root = std::getenv("FACMON_REPO_ROOT");
    ASSERT_NE(root, nullptr) << "FACMON_REPO_ROOT not set";
    const fs::path schema_path = fs::path(root) / "schemas" / schema_file;
    json schema = json::parse(slurp(schema_path));
    std::vector<std::string> errors;
    validate_schema(value, schema, "$", errors);
    for (const auto& e : errors) ADD_FAILURE() << e;
}

std::string simulate_config(const fs::path& dir) {
    const fs::path cfg = dir / "sim.cfg";
    std::ofstream out(cfg);
    out << "scenario = break_loadings\n"
           "N = 100\nT = 500\nm = 100\nr = 1\ntau = 300\n"
           "eta = 0.45\nalpha = 0.05\nreplications = 3\nseed = 31415\n";
    return cfg.string();
}

}  // namespace

TEST(Critval, LookupValuesAreExact) {
    RunResult r = run("critval --eta 0.45 --alpha 0.05");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "2.799200 lookup\n");
    r = run("critval --eta 0.45 --alpha 0.10");
    EXPECT_EQ(r.out, "2.543700 lookup\n");
}

TEST(Critval, ClosedFormTagged) {
    const RunResult r = run("critval --eta 0.5 --alpha 0.05 --m 100");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out.substr(0, 6), "3.2408");
    EXPECT_NE(r.out.find("closed-form"), std::string::npos);
}

TEST(Critval, EtaHalfWithoutMFails) {
    const RunResult r = run("critval --eta 0.5 --alpha 0.05");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Critval, MonteCarloTagged) {
    const RunResult r =
        run("critval --eta 0.2 --alpha 0.05 --mc-reps 2000 --mc-grid 1000 --seed 5");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("monte-carlo"), std::string::npos);
}

TEST(Monitor, EtaOutOfRangeNamesConstraint) {
    const RunResult r = run("monitor /nonexistent.csv --m 100 --r 1 --eta 0.7 --seed 1");
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("[0, 0.5]"), std::string::npos) << r.err;
}

TEST(Monitor, UnknownFlagRejected) {
    const RunResult r = run("monitor x.csv --m 100 --bogus 3");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Monitor, MissingFileFails) {
    const RunResult r = run("monitor /no/such/file.csv --m 100 --r 1 --seed 1");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Dgp, SidecarCarriesPlantedTruth) {
    const fs::path null_csv = work_dir() / "null_panel.csv";
    RunResult r = run("dgp --scenario null --N 20 --T 80 --m 30 --r 1 --seed 11 --out " +
                      null_csv.string());
    ASSERT_EQ(r.exit_code, 0);
    json truth = json::parse(slurp(null_csv.string() + ".truth.json"));
    EXPECT_TRUE(truth["tau"].is_null());
    expect_schema_valid(truth, "dgp_truth.schema.json");

    const fs::path nf_csv = work_dir() / "nf_panel.csv";
    r = run("dgp --scenario new_factor --N 20 --T 120 --m 30 --r 1 --tau 60 --seed 11 --out " +
            nf_csv.string());
    ASSERT_EQ(r.exit_code, 0);
    truth = json::parse(slurp(nf_csv.string() + ".truth.json"));
    EXPECT_EQ(truth["tau"], 60);
    expect_schema_valid(truth, "dgp_truth.schema.json");
}

TEST(Dgp, DeterministicGivenSeed) {
    const fs::path a = work_dir() / "det_a.csv";
    const fs::path b = work_dir() / "det_b.csv";
    ASSERT_EQ(run("dgp --scenario new_factor --N 15 --T 90 --m 20 --r 2 --tau 50 --seed 321 "
                  "--out " +
                  a.string())
                  .exit_code,
              0);
    ASSERT_EQ(run("dgp --scenario new_factor --N 15 --T 90 --m 20 --r 2 --tau 50 --seed 321 "
                  "--out " +
                  b.string())
                  .exit_code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a.string() + ".truth.json"), slurp(b.string() + ".truth.json"));
}

TEST(Monitor, NullFixtureReportsNoDetections) {
    const fs::path csv = work_dir() / "h0.csv";
    ASSERT_EQ(run("dgp --scenario null --N 100 --T 300 --m 100 --r 2 --seed 2024 --out " +
                  csv.string())
                  .exit_code,
              0);
    const RunResult r =
        run("monitor " + csv.string() + " --m 100 --r 2 --eta 0.45 --alpha 0.05 --seed 2024");
    ASSERT_EQ(r.exit_code, 0);
    const json report = json::parse(r.out);
    EXPECT_TRUE(report["detections"].empty());
    expect_schema_valid(report, "detection_report.schema.json");
}

TEST(Monitor, BreakFixtureDetectsInWindow) {
    const fs::path csv = work_dir() / "break.csv";
    ASSERT_EQ(run("dgp --scenario break_loadings --N 100 --T 600 --m 100 --r 1 --tau 350 "
                  "--seed 4711 --out " +
                  csv.string())
                  .exit_code,
              0);
    const fs::path path_csv = work_dir() / "break_path.csv";
    const RunResult r = run("monitor " + csv.string() +
                            " --m 100 --r 1 --eta 0.45 --alpha 0.05 --seed 4711 --path-out " +
                            path_csv.string());
    ASSERT_EQ(r.exit_code, 0);
    const json report = json::parse(r.out);
    ASSERT_EQ(report["detections"].size(), 1u);
    const long tau_hat = report["detections"][0]["tau_hat"];
    EXPECT_GE(tau_hat, 350);
    EXPECT_LT(tau_hat, 450);
    expect_schema_valid(report, "detection_report.schema.json");

    const std::string path_content = slurp(path_csv);
    EXPECT_EQ(path_content.substr(0, 17), "k,t,d,nu,crossed\n");
    EXPECT_NE(path_content.find(",1\n"), std::string::npos);  // crossing row
}

TEST(Monitor, AutoRankEstimatesFactors) {
    const fs::path csv = work_dir() / "auto_r.csv";
    ASSERT_EQ(run("dgp --scenario null --N 100 --T 220 --m 100 --r 3 --seed 37 --out " +
                  csv.string())
                  .exit_code,
              0);
    const RunResult r =
        run("monitor " + csv.string() + " --m 100 --r auto --eta 0.45 --alpha 0.05 --seed 37");
    ASSERT_EQ(r.exit_code, 0);
    const json report = json::parse(r.out);
    EXPECT_EQ(report["config"]["r_used"][0], 3);
}

TEST(Monitor, StreamingMatchesBatchDecision) {
    const fs::path csv = work_dir() / "stream.csv";
    ASSERT_EQ(run("dgp --scenario break_loadings --N 100 --T 600 --m 100 --r 1 --tau 350 "
                  "--seed 4711 --out " +
                  csv.string())
                  .exit_code,
              0);
    const RunResult batch =
        run("monitor " + csv.string() + " --m 100 --r 1 --eta 0.45 --alpha 0.05 --seed 4711");
    ASSERT_EQ(batch.exit_code, 0);
    const json batch_report = json::parse(batch.out);
    ASSERT_EQ(batch_report["detections"].size(), 1u);

    const RunResult stream =
        run("monitor - --m 100 --r 1 --eta 0.45 --alpha 0.05 --seed 4711", csv.string());
    ASSERT_EQ(stream.exit_code, 0);
    const auto brace = stream.out.find('{');
    ASSERT_NE(brace, std::string::npos);
    EXPECT_NE(stream.out.find("k,t,d,nu,crossed"), std::string::npos);
    const json stream_report = json::parse(stream.out.substr(brace));
    ASSERT_EQ(stream_report["detections"].size(), batch_report["detections"].size());
    EXPECT_EQ(stream_report["detections"][0]["tau_hat"],
              batch_report["detections"][0]["tau_hat"]);
}

TEST(Monitor, SeedDrawnAndPrintedWhenAbsent) {
    const fs::path csv = work_dir() / "h0_small.csv";
    ASSERT_EQ(run("dgp --scenario null --N 30 --T 120 --m 40 --r 1 --seed 5 --out " + csv.string())
                  .exit_code,
              0);
    const RunResult r = run("monitor " + csv.string() + " --m 40 --r 1 --eta 0.45 --alpha 0.05");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.err.find("seed: "), std::string::npos);
}

TEST(Simulate, WorkerCountDoesNotChangeOutput) {
    const std::string cfg = simulate_config(work_dir());
    const fs::path out1 = work_dir() / "t1.csv";
    const fs::path out2 = work_dir() / "t2.csv";
    ASSERT_EQ(run("simulate --config " + cfg + " --workers 1 --out " + out1.string()).exit_code,
              0);
    ASSERT_EQ(run("simulate --config " + cfg + " --workers 2 --out " + out2.string()).exit_code,
              0);
    const std::string a = slurp(out1);
    EXPECT_EQ(a, slurp(out2));
    EXPECT_EQ(a.substr(0, 8), "scenario");
}

TEST(Simulate, RoundTripMatchesHarnessDecision) {
    const std::string cfg = simulate_config(work_dir());
    const fs::path jsonl = work_dir() / "reps.jsonl";
    ASSERT_EQ(run("simulate --config " + cfg + " --reps 2 --workers 2 --jsonl " + jsonl.string() +
                  " --out " + (work_dir() / "rt.csv").string())
                  .exit_code,
              0);
    std::ifstream in(jsonl);
    std::string first_line;
    ASSERT_TRUE(std::getline(in, first_line));
    const json rep = json::parse(first_line);
    const std::uint64_t seed = rep["seed"];

    const fs::path csv = work_dir() / "rt_panel.csv";
    ASSERT_EQ(run("dgp --scenario break_loadings --N 100 --T 500 --m 100 --r 1 --tau 300 "
                  "--seed " +
                  std::to_string(seed) + " --out " + csv.string())
                  .exit_code,
              0);
    const RunResult r = run("monitor " + csv.string() +
                            " --m 100 --r 1 --eta 0.45 --alpha 0.05 --seed " +
                            std::to_string(seed));
    ASSERT_EQ(r.exit_code, 0);
    const json report = json::parse(r.out);
    if (rep["stopped"].get<bool>()) {
        ASSERT_EQ(report["detections"].size(), 1u);
        EXPECT_EQ(report["detections"][0]["tau_hat"].get<long>(), rep["tau_hat"].get<long>());
    } else {
        EXPECT_TRUE(report["detections"].empty());
    }
}

TEST(Simulate, EmptyConfigFails) {
    const fs::path cfg = work_dir() / "empty.cfg";
    std::ofstream(cfg) << "";
    const RunResult r = run("simulate --config " + cfg.string());
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Simulate, MarkdownFormat) {
    const std::string cfg = simulate_config(work_dir());
    const RunResult r = run("simulate --config " + cfg + " --reps 1 --format markdown");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out.substr(0, 2), "| ");
    EXPECT_NE(r.out.find("| break_loadings |"), std::string::npos);
}

TEST(Monitor, RestartReportsSpacedDetections) {
    const fs::path csv = work_dir() / "restart.csv";
    ASSERT_EQ(run("dgp --scenario new_factor --N 100 --T 700 --m 100 --r 1 --tau 300 "
                  "--seed 9001 --out " +
                  csv.string())
                  .exit_code,
              0);
    const RunResult r = run("monitor " + csv.string() +
                            " --m 100 --r 1 --eta 0.45 --alpha 0.05 --seed 9001 --restart");
    ASSERT_EQ(r.exit_code, 0);
    const json report = json::parse(r.out);
    ASSERT_GE(report["detections"].size(), 1u);
    EXPECT_GE(report["detections"][0]["tau_hat"].get<long>(), 300);
    for (std::size_t i = 1; i < report["detections"].size(); ++i) {
        const long prev = report["detections"][i - 1]["tau_hat"];
        const long next = report["detections"][i]["tau_hat"];
        EXPECT_GE(next - prev, 101);  // m + 1 spacing
    }
    expect_schema_valid(report, "detection_report.schema.json");
}

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace damrl::cli {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Bad arguments detected past the parser; the launcher maps this to exit
/// code 2 like any other usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resolve a dataset path: used verbatim when it exists, otherwise looked up
/// under $REPO_DATA_DIR. Throws std::runtime_error naming the path when
/// neither resolves.
std::string resolve_data_path(const std::string& path);

/// `gen-data`: write a synthetic daily dataset (data.csv) plus manifest.
struct GenDataOptions {
    std::string config_path; // optional key-value config (synth.* keys)
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed; // overrides synth.seed
    std::optional<int> years;          // overrides synth.years
};

/// `fit-inflow`: fit GLS / DLM / GLS+DLM on the train split, score one-step
/// NSE on train and test, write model JSONs, forecast CSVs, metrics, manifest.
struct FitInflowOptions {
    std::string config_path;
    std::string data_path;
    int train_end_year = 0; // 0 = penultimate calendar year in the data
    int test_year = 0;      // 0 = last calendar year in the data
    int k = 7;
    std::string out_dir = ".";
};

/// `train`: train one algorithm on the calibrated simulator; write policy
/// JSON, learning-curve CSV, manifest. A non-empty `seeds` list runs a sweep
/// (one subdirectory per seed, up to `jobs` worker threads).
struct TrainOptions {
    std::string config_path;
    std::string data_path;
    std::string inflow = "replay"; // fitted model JSON path, or "replay"
    std::string algo = "td3";
    long steps = 50000;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;
    int jobs = 1;
    int train_end_year = 0; // 0 = penultimate calendar year in the data
    std::string out_dir = ".";
};

/// `evaluate`: run listed trained policies (plus optionally the baseline
/// schedule) on the held-out test year with shared episode seeds; write
/// metrics JSON and per-episode trace CSVs.
struct EvaluateOptions {
    std::string config_path;
    std::string data_path;
    std::string inflow = "replay";
    std::vector<std::string> policies;
    bool baseline = false;
    int test_year = 0; // 0 = last calendar year in the data
    int episodes = 3;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

/// `simulate`: one-episode rollout dump (trace.csv + manifest). Without
/// --data a synthetic dataset is generated from the seed and replayed.
struct SimulateOptions {
    std::string config_path;
    std::string data_path;
    std::string inflow = "replay";
    std::string policy = "baseline"; // "baseline" or a trained-policy JSON path
    std::string start_date;          // ISO date; empty = derived from the data
    std::uint64_t seed = 7;
    std::string out_dir = ".";
};

/// Each command returns a process exit code (0 success, 1 runtime failure
/// reported on stderr by the caller via exceptions). Usage validation is the
/// argument parser's job (exit code 2).
int cmd_gen_data(const GenDataOptions& opt);
int cmd_fit_inflow(const FitInflowOptions& opt);
int cmd_train(const TrainOptions& opt);
int cmd_evaluate(const EvaluateOptions& opt);
int cmd_simulate(const SimulateOptions& opt);

} // namespace damrl::cli

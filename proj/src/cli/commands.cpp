#include "damrl/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "json.hpp"

#include "damrl/common/config.hpp"
#include "damrl/common/rng.hpp"
#include "damrl/data/records.hpp"
#include "damrl/data/synthetic.hpp"
#include "damrl/env/episode.hpp"
#include "damrl/inflow/filter.hpp"
#include "damrl/policy/policies.hpp"
#include "damrl/rl/learners.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace damrl::cli {

namespace {

std::string iso_timestamp_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

KeyValueConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return KeyValueConfig::parse_file(path);
}

/// Effective configuration snapshot for the manifest: simulator parameters,
/// then the config file, then command-line effective values (highest wins).
std::map<std::string, std::string>
snapshot_config(const KeyValueConfig& file_cfg, const hydro::SimParams& params,
                const std::vector<std::pair<std::string, std::string>>& extra) {
    KeyValueConfig sim;
    params.to_config(sim);
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : sim.entries()) out[k] = v;
    for (const auto& [k, v] : file_cfg.entries()) out[k] = v;
    for (const auto& [k, v] : extra) out[k] = v;
    return out;
}

void write_manifest(const std::string& dir, const std::string& command, std::uint64_t seed,
                    const std::map<std::string, std::string>& config,
                    const std::vector<std::pair<std::string, std::string>>& artifacts,
                    const std::string& status = "ok") {
    json j;
    j["command"] = command;
    j["toolkit_version"] = kToolkitVersion;
    j["seed"] = seed;
    j["status"] = status;
    j["timestamp"] = iso_timestamp_utc();
    j["config"] = json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["artifacts"] = json::object();
    for (const auto& [k, v] : artifacts) j["artifacts"][k] = v;
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

/// Scheduled release volume per record date (0 where the schedule is silent);
/// used to back out inflow from level differences when the data lacks it.
std::vector<double> baseline_release_volumes(const std::vector<data::DailyRecord>& records) {
    const auto& table = policy::baseline_schedule();
    std::vector<double> rel(records.size(), 0.0);
    for (std::size_t i = 0; i < records.size(); ++i)
        if (const auto d = policy::schedule_discharge(table, records[i].date))
            rel[i] = hydro::discharge_to_volume(hydro::Discharge{*d}).bcm;
    return rel;
}

std::vector<data::DailyRecord> load_records(const std::string& data_path,
                                            const hydro::SimParams& params,
                                            std::string* resolved_out = nullptr) {
    const std::string path = resolve_data_path(data_path);
    if (resolved_out) *resolved_out = path;
    auto records = data::load_csv(path);
    if (records.empty()) throw std::runtime_error("empty dataset: " + path);
    const auto releases = baseline_release_volumes(records);
    return data::derive_inflow(std::move(records), params.curve(), releases);
}

/// Aligned forecastable series: leading records without inflow are dropped,
/// interior gaps are an error.
struct Series {
    std::vector<Date> dates;
    std::vector<double> rainfall;
    std::vector<double> inflow;
};

Series series_from(const std::vector<data::DailyRecord>& records, const char* split_name) {
    Series s;
    bool started = false;
    for (const auto& r : records) {
        if (!r.inflow_bcm) {
            if (!started) continue;
            throw std::runtime_error(std::string(split_name) + " split: missing inflow at " +
                                     r.date.to_string() +
                                     " (provide inflow_bcm or water levels on adjacent days)");
        }
        started = true;
        s.dates.push_back(r.date);
        s.rainfall.push_back(r.rainfall_mm);
        s.inflow.push_back(*r.inflow_bcm);
    }
    if (s.dates.size() < 2)
        throw std::runtime_error(std::string(split_name) + " split has too few usable records");
    return s;
}

int resolve_test_year(const std::vector<data::DailyRecord>& records, int test_year) {
    return test_year != 0 ? test_year : records.back().date.year();
}

int resolve_train_end(int train_end, int test_year) {
    return train_end != 0 ? train_end : test_year - 1;
}

/// Episode start for held-out evaluation: the test year's water-year start
/// when the data covers the full episode from there, else Jan 01 of the test
/// year. Requires full replay coverage either way.
Date choose_eval_start(const std::vector<data::DailyRecord>& records, int test_year,
                       const hydro::SimParams& params) {
    const long first = records.front().date.serial();
    const long last = records.back().date.serial();
    const Date candidates[] = {Date{test_year, params.water_year_start.month,
                                    params.water_year_start.day},
                               Date{test_year, 1, 1}};
    for (const Date& c : candidates)
        if (c.serial() >= first && c.serial() + params.max_step - 1 <= last) return c;
    throw std::runtime_error("dataset does not cover a full " + std::to_string(params.max_step) +
                             "-day episode inside test year " + std::to_string(test_year));
}

/// Latest water-year start from which the data still covers a full episode.
Date default_start_date(const std::vector<data::DailyRecord>& records,
                        const hydro::SimParams& params) {
    const long first = records.front().date.serial();
    const long last = records.back().date.serial();
    for (int y = records.back().date.year(); y >= records.front().date.year(); --y) {
        const Date c{y, params.water_year_start.month, params.water_year_start.day};
        if (c.serial() >= first && c.serial() + params.max_step - 1 <= last) return c;
    }
    throw std::runtime_error("dataset shorter than one episode (" +
                             std::to_string(params.max_step) + " days)");
}

/// Initial level: config override, else the observed level on the start
/// date, else the month-day climatology, else 60% of capacity storage.
hydro::WaterLevel initial_level_for(const std::vector<data::DailyRecord>& records, Date start,
                                    const hydro::SimParams& params, const KeyValueConfig& cfg) {
    if (cfg.has("episode.initial_level_m"))
        return hydro::WaterLevel{cfg.get_real("episode.initial_level_m")};
    double sum = 0.0;
    int n = 0;
    for (const auto& r : records) {
        if (!r.water_level_m) continue;
        if (r.date.serial() == start.serial()) return hydro::WaterLevel{*r.water_level_m};
        if (r.date.month() == start.month() && r.date.day() == start.day()) {
            sum += *r.water_level_m;
            ++n;
        }
    }
    if (n > 0) return hydro::WaterLevel{sum / n};
    const auto curve = params.curve();
    return curve.level_from_storage(
        hydro::StorageVolume{0.6 * curve.storage_from_level(params.dam_cap).bcm});
}

Date parse_date_arg(const std::string& text, const char* what) {
    const auto d = Date::parse(text);
    if (!d) throw UsageError(std::string("invalid ") + what + ": " + text);
    return *d;
}

std::shared_ptr<const env::InflowSource>
make_inflow_source(const std::string& spec,
                   std::shared_ptr<const std::vector<data::DailyRecord>> records) {
    if (spec == "replay") return std::make_shared<env::ReplayInflow>(std::move(records));
    if (!fs::exists(spec)) throw std::runtime_error("inflow model not found: " + spec);
    auto model = std::make_shared<inflow::FittedInflowModel>(inflow::load_model_json(spec));
    return std::make_shared<env::ModelInflow>(std::move(model));
}

rl::LearnerConfig learner_config_from(const KeyValueConfig& cfg, const hydro::SimParams& params,
                                      const std::string& algo, long steps) {
    rl::LearnerConfig lc;
    lc.algorithm = rl::algorithm_from_string(algo);
    lc.gamma = cfg.get_real("train.gamma", params.discount);
    lc.actor_lr = cfg.get_real("train.actor_lr", lc.actor_lr);
    lc.critic_lr = cfg.get_real("train.critic_lr", lc.critic_lr);
    lc.tau = cfg.get_real("train.tau", lc.tau);
    lc.batch_size = static_cast<int>(cfg.get_int("train.batch_size", lc.batch_size));
    lc.buffer_capacity = static_cast<std::size_t>(
        cfg.get_int("train.buffer_capacity", static_cast<long>(lc.buffer_capacity)));
    lc.exploration_sigma = cfg.get_real("train.exploration_sigma", lc.exploration_sigma);
    lc.policy_delay = static_cast<int>(cfg.get_int("train.policy_delay", lc.policy_delay));
    lc.target_noise_sigma = cfg.get_real("train.target_noise_sigma", lc.target_noise_sigma);
    lc.target_noise_clip = cfg.get_real("train.target_noise_clip", lc.target_noise_clip);
    lc.sac_alpha = cfg.get_real("train.sac_alpha", lc.sac_alpha);
    lc.use_adam = cfg.get_int("train.use_adam", lc.use_adam ? 1 : 0) != 0;
    lc.timeout_terminal = cfg.get_int("train.timeout_terminal", lc.timeout_terminal ? 1 : 0) != 0;
    lc.reward_scale = cfg.get_real("train.reward_scale", lc.reward_scale);
    lc.total_steps = steps;
    lc.warmup_steps = cfg.get_int("train.warmup_steps", lc.warmup_steps);
    lc.eval_interval = cfg.get_int("train.eval_interval", lc.eval_interval);
    lc.eval_episodes = static_cast<int>(cfg.get_int("train.eval_episodes", lc.eval_episodes));
    if (cfg.has("train.hidden")) {
        std::vector<int> dims;
        const std::string text = cfg.get_string("train.hidden");
        std::size_t pos = 0;
        while (pos < text.size()) {
            const std::size_t comma = text.find(',', pos);
            const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                : comma - pos);
            dims.push_back(std::stoi(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        lc.hidden_dims = dims;
    }
    lc.validate();
    return lc;
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void require_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite metric: " + what);
}

} // namespace

std::string resolve_data_path(const std::string& path) {
    if (path.empty()) throw std::runtime_error("no dataset path given");
    if (fs::exists(path)) return path;
    if (const char* root = std::getenv("REPO_DATA_DIR")) {
        const fs::path joined = fs::path(root) / path;
        if (fs::exists(joined)) return joined.string();
    }
    throw std::runtime_error("dataset not found: " + path);
}

int cmd_gen_data(const GenDataOptions& opt) {
    const KeyValueConfig cfg = load_config(opt.config_path);
    hydro::SimParams params = hydro::SimParams::from_config(cfg);
    params.validate();

    const std::uint64_t seed =
        opt.seed ? *opt.seed : static_cast<std::uint64_t>(cfg.get_int("synth.seed", 0));
    const int start_year = static_cast<int>(cfg.get_int("synth.start_year", 2012));
    const int years = opt.years ? *opt.years : static_cast<int>(cfg.get_int("synth.years", 8));

    auto sc = data::SyntheticConfig::monsoon_preset(seed, start_year, years);
    sc.params = params;
    sc.initial_level_m = cfg.get_real("synth.initial_level_m", sc.initial_level_m);
    sc.catchment_bcm_per_mm = cfg.get_real("synth.catchment_bcm_per_mm", sc.catchment_bcm_per_mm);
    sc.runoff_start = cfg.get_real("synth.runoff_start", sc.runoff_start);
    sc.runoff_end = cfg.get_real("synth.runoff_end", sc.runoff_end);
    sc.noise_rho = cfg.get_real("synth.noise_rho", sc.noise_rho);
    sc.noise_sigma = cfg.get_real("synth.noise_sigma", sc.noise_sigma);
    sc.validate();

    const auto records = data::synthesize(sc);
    fs::create_directories(opt.out_dir);
    const std::string data_path = join_path(opt.out_dir, "data.csv");
    data::write_csv(records, data_path);

    double rain_total = 0.0, inflow_total = 0.0;
    double level_min = 1e300, level_max = -1e300;
    for (const auto& r : records) {
        rain_total += r.rainfall_mm;
        inflow_total += r.inflow_bcm.value_or(0.0);
        if (r.water_level_m) {
            level_min = std::min(level_min, *r.water_level_m);
            level_max = std::max(level_max, *r.water_level_m);
        }
    }
    write_manifest(opt.out_dir, "gen-data", seed,
                   snapshot_config(cfg, params,
                                   {{"synth.seed", std::to_string(seed)},
                                    {"synth.start_year", std::to_string(start_year)},
                                    {"synth.years", std::to_string(years)}}),
                   {{"data", "data.csv"}});
    std::printf("gen-data: %zu records %s..%s, %.0f mm/yr rain, %.2f BCM/yr inflow, "
                "levels %.2f..%.2f m -> %s\n",
                records.size(), records.front().date.to_string().c_str(),
                records.back().date.to_string().c_str(), rain_total / years, inflow_total / years,
                level_min, level_max, data_path.c_str());
    return 0;
}

int cmd_fit_inflow(const FitInflowOptions& opt) {
    const KeyValueConfig cfg = load_config(opt.config_path);
    hydro::SimParams params = hydro::SimParams::from_config(cfg);
    params.validate();

    std::string data_path;
    const auto records = load_records(opt.data_path, params, &data_path);
    const int test_year = resolve_test_year(records, opt.test_year);
    const int train_end = resolve_train_end(opt.train_end_year, test_year);
    const auto [train_records, test_records] = data::split_by_year(records, train_end, test_year);
    const Series train = series_from(train_records, "train");
    const Series test = series_from(test_records, "test");

    inflow::FilterConfig base;
    base.dlm_discount = cfg.get_real("inflow.dlm_discount", base.dlm_discount);
    base.dlm_prior_scale = cfg.get_real("inflow.dlm_prior_scale", base.dlm_prior_scale);
    if (cfg.has("inflow.dlm_obs_variance"))
        base.dlm_obs_variance = cfg.get_real("inflow.dlm_obs_variance");
    base.warmup_days = static_cast<int>(cfg.get_int("inflow.warmup_days", base.warmup_days));

    fs::create_directories(opt.out_dir);
    json models = json::object();
    std::vector<std::pair<std::string, std::string>> artifacts;
    const inflow::InflowModelKind kinds[] = {
        inflow::InflowModelKind::GLS, inflow::InflowModelKind::DLM,
        inflow::InflowModelKind::GLS_PLUS_DLM, inflow::InflowModelKind::REPLAY};
    for (const auto kind : kinds) {
        const std::string name = inflow::to_string(kind);
        try {
            const auto fit = inflow::filter_series(kind, train.dates, train.rainfall, train.inflow,
                                                   opt.k, base);
            inflow::FilterConfig heldout = base;
            heldout.gls = fit.gls;
            heldout.dlm = fit.dlm;
            const auto held = inflow::filter_series(kind, test.dates, test.rainfall, test.inflow,
                                                    opt.k, heldout);
            const double train_nse = inflow::nse(fit.records);
            const double test_nse = inflow::nse(held.records);
            require_finite(train_nse, name + " train NSE");
            require_finite(test_nse, name + " test NSE");

            const std::string train_csv = name + "_train_forecast.csv";
            const std::string test_csv = name + "_test_forecast.csv";
            inflow::write_forecast_csv(fit.records, join_path(opt.out_dir, train_csv));
            inflow::write_forecast_csv(held.records, join_path(opt.out_dir, test_csv));
            artifacts.emplace_back(name + "_train_forecast", train_csv);
            artifacts.emplace_back(name + "_test_forecast", test_csv);
            if (kind != inflow::InflowModelKind::REPLAY) {
                inflow::FittedInflowModel model;
                model.kind = kind;
                model.k = opt.k;
                model.gls = fit.gls;
                model.dlm = fit.dlm;
                const std::string model_file = name + ".json";
                inflow::write_model_json(model, join_path(opt.out_dir, model_file));
                artifacts.emplace_back(name + "_model", model_file);
            }
            models[name] = {{"train_nse", train_nse}, {"test_nse", test_nse}};
            std::printf("fit-inflow: %-12s train NSE %.4f  test NSE %.4f\n", name.c_str(),
                        train_nse, test_nse);
        } catch (const std::exception& e) {
            throw std::runtime_error(name + ": " + e.what());
        }
    }

    json metrics;
    metrics["data"] = data_path;
    metrics["k"] = opt.k;
    metrics["train_end_year"] = train_end;
    metrics["test_year"] = test_year;
    metrics["models"] = models;
    write_text(join_path(opt.out_dir, "metrics.json"), metrics.dump(2) + "\n");
    artifacts.emplace_back("metrics", "metrics.json");

    write_manifest(opt.out_dir, "fit-inflow", 0,
                   snapshot_config(cfg, params,
                                   {{"data", data_path},
                                    {"k", std::to_string(opt.k)},
                                    {"train_end_year", std::to_string(train_end)},
                                    {"test_year", std::to_string(test_year)}}),
                   artifacts);
    return 0;
}

int cmd_train(const TrainOptions& opt) {
    const KeyValueConfig cfg = load_config(opt.config_path);
    hydro::SimParams params = hydro::SimParams::from_config(cfg);
    params.validate();

    std::string data_path;
    auto all_records = load_records(opt.data_path, params, &data_path);
    const int last_year = all_records.back().date.year();
    const int train_end = opt.train_end_year != 0
                              ? opt.train_end_year
                              : (last_year > all_records.front().date.year() ? last_year - 1
                                                                             : last_year);
    std::vector<data::DailyRecord> train_slice;
    for (const auto& r : all_records)
        if (r.date.year() <= train_end) train_slice.push_back(r);
    if (train_slice.empty())
        throw std::runtime_error("no records at or before train-end year " +
                                 std::to_string(train_end));

    auto full = std::make_shared<const std::vector<data::DailyRecord>>(std::move(all_records));
    auto train_records =
        std::make_shared<const std::vector<data::DailyRecord>>(std::move(train_slice));

    env::EpisodeConfig ecfg;
    ecfg.params = params;
    ecfg.rainfall = std::make_shared<env::BootstrapRainfall>(train_records);
    ecfg.inflow = make_inflow_source(opt.inflow, full);
    ecfg.start_date = cfg.has("episode.start_date")
                          ? parse_date_arg(cfg.get_string("episode.start_date"),
                                           "episode.start_date")
                          : Date{train_end, params.water_year_start.month,
                                 params.water_year_start.day};
    if (opt.inflow == "replay") {
        const long last_needed = ecfg.start_date.serial() + params.max_step - 1;
        if (last_needed > full->back().date.serial() ||
            ecfg.start_date.serial() < full->front().date.serial())
            throw std::runtime_error(
                "replay inflow does not cover the training episode starting " +
                ecfg.start_date.to_string() + "; fit a model or extend the data");
    }
    ecfg.initial_level = initial_level_for(*train_records, ecfg.start_date, params, cfg);
    ecfg.validate();

    const rl::LearnerConfig lc_base = learner_config_from(cfg, params, opt.algo, opt.steps);

    std::vector<std::uint64_t> seeds = opt.seeds;
    if (seeds.empty()) seeds.push_back(opt.seed);
    const bool sweep = seeds.size() > 1;
    fs::create_directories(opt.out_dir);

    const auto config_extra = [&](std::uint64_t seed) {
        return std::vector<std::pair<std::string, std::string>>{
            {"data", data_path},
            {"inflow", opt.inflow},
            {"train.algo", opt.algo},
            {"train.steps", std::to_string(opt.steps)},
            {"train.seed", std::to_string(seed)},
            {"train_end_year", std::to_string(train_end)},
            {"episode.start_date", ecfg.start_date.to_string()},
            {"episode.initial_level_m", std::to_string(ecfg.initial_level.meters)}};
    };

    std::atomic<bool> any_aborted{false};
    std::mutex err_mx;
    std::string first_error;

    const auto run_one = [&](const std::string& dir, std::uint64_t seed) {
        fs::create_directories(dir);
        rl::DamTrainEnv train_env(ecfg);
        rl::DamTrainEnv eval_env(ecfg);
        rl::LearnerConfig lc = lc_base;
        lc.seed = seed;
        const rl::TrainResult res = rl::train(train_env, eval_env, lc);
        rl::write_policy_json(res.policy, join_path(dir, "policy.json"));
        rl::write_curve_csv(res.curve, join_path(dir, "curve.csv"));
        write_manifest(dir, "train", seed, snapshot_config(cfg, params, config_extra(seed)),
                       {{"policy", "policy.json"}, {"curve", "curve.csv"}},
                       res.aborted ? "aborted: " + res.abort_reason : "ok");
        if (res.aborted) {
            any_aborted = true;
            std::fprintf(stderr, "train: %s seed %llu aborted: %s (partial curve kept)\n",
                         opt.algo.c_str(), static_cast<unsigned long long>(seed),
                         res.abort_reason.c_str());
        } else {
            const double final_return = res.curve.empty() ? 0.0 : res.curve.back().mean_return;
            std::printf("train: %s seed %llu done, final eval return %.3f -> %s\n",
                        opt.algo.c_str(), static_cast<unsigned long long>(seed), final_return,
                        (dir + "/policy.json").c_str());
        }
    };

    if (!sweep) {
        run_one(opt.out_dir, seeds[0]);
    } else {
        std::vector<std::string> dirs;
        std::vector<std::pair<std::string, std::string>> top_artifacts;
        for (const auto s : seeds) {
            dirs.push_back(join_path(opt.out_dir, "seed_" + std::to_string(s)));
            top_artifacts.emplace_back("seed_" + std::to_string(s),
                                       "seed_" + std::to_string(s) + "/policy.json");
        }
        std::atomic<std::size_t> next{0};
        const int workers = std::max(1, std::min<int>(opt.jobs, static_cast<int>(seeds.size())));
        const auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= seeds.size()) return;
                try {
                    run_one(dirs[i], seeds[i]);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mx);
                    if (first_error.empty()) first_error = e.what();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (!first_error.empty()) throw std::runtime_error(first_error);
        write_manifest(opt.out_dir, "train", seeds[0],
                       snapshot_config(cfg, params, config_extra(seeds[0])), top_artifacts);
    }
    return any_aborted ? 1 : 0;
}

int cmd_evaluate(const EvaluateOptions& opt) {
    const KeyValueConfig cfg = load_config(opt.config_path);
    hydro::SimParams params = hydro::SimParams::from_config(cfg);
    params.validate();
    if (opt.policies.empty() && !opt.baseline)
        throw UsageError("nothing to evaluate: pass --policies and/or --baseline");
    if (opt.episodes < 1) throw UsageError("--episodes must be >= 1");

    std::string data_path;
    auto records_vec = load_records(opt.data_path, params, &data_path);
    const int test_year = resolve_test_year(records_vec, opt.test_year);
    const Date start = choose_eval_start(records_vec, test_year, params);
    auto records =
        std::make_shared<const std::vector<data::DailyRecord>>(std::move(records_vec));

    env::EpisodeConfig ecfg;
    ecfg.params = params;
    ecfg.rainfall = std::make_shared<env::ReplayRainfall>(records);
    ecfg.inflow = make_inflow_source(opt.inflow, records);
    ecfg.start_date = start;
    ecfg.initial_level = initial_level_for(*records, start, params, cfg);
    ecfg.validate();

    struct Entry {
        std::string name;
        std::unique_ptr<policy::PolicyInterface> policy;
    };
    std::vector<Entry> entries;
    const auto unique_name = [&entries](std::string base) {
        std::string name = base;
        int suffix = 2;
        while (std::any_of(entries.begin(), entries.end(),
                           [&](const Entry& e) { return e.name == name; }))
            name = base + "_" + std::to_string(suffix++);
        return name;
    };
    if (opt.baseline)
        entries.push_back({"baseline", std::make_unique<policy::SchedulePolicy>(
                                           params, policy::baseline_schedule(),
                                           policy::estimator_from_source(ecfg.inflow))});
    for (const auto& path : opt.policies) {
        if (!fs::exists(path)) throw std::runtime_error("policy artifact not found: " + path);
        auto trained = rl::load_policy_json(path);
        entries.push_back({unique_name(fs::path(path).stem().string()),
                           std::make_unique<rl::RlPolicy>(std::move(trained))});
    }

    fs::create_directories(opt.out_dir);
    const auto curve = params.curve();
    json policies = json::object();
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::printf("evaluate: test year %d, start %s, initial level %.2f m, %d episode(s)\n",
                test_year, start.to_string().c_str(), ecfg.initial_level.meters, opt.episodes);
    for (auto& entry : entries) {
        std::vector<double> undisc, disc;
        long flood_days = 0;
        double spill_total = 0.0;
        for (int e = 0; e < opt.episodes; ++e) {
            env::EpisodeConfig run_cfg = ecfg;
            run_cfg.seed = derive_seed(opt.seed, "eval-episode." + std::to_string(e));
            const auto trace = env::run_episode(*entry.policy, run_cfg, /*explore=*/false);
            undisc.push_back(trace.undiscounted_return);
            disc.push_back(trace.discounted_return);
            for (const auto& s : trace.steps) {
                if (s.overflowed) ++flood_days;
                spill_total += s.spilled.bcm;
            }
            const std::string trace_file =
                entry.name + "_ep" + std::to_string(e) + "_trace.csv";
            env::write_trace_csv(trace, curve, join_path(opt.out_dir, trace_file));
            artifacts.emplace_back(entry.name + "_ep" + std::to_string(e), trace_file);
        }
        double mean_u = 0.0, mean_d = 0.0;
        for (std::size_t i = 0; i < undisc.size(); ++i) {
            mean_u += undisc[i];
            mean_d += disc[i];
        }
        mean_u /= static_cast<double>(undisc.size());
        mean_d /= static_cast<double>(disc.size());
        const double std_u = sample_std(undisc, mean_u);
        const double std_d = sample_std(disc, mean_d);
        for (const double v : {mean_u, std_u, mean_d, std_d, spill_total})
            require_finite(v, entry.name + " returns");
        policies[entry.name] = {{"mean_undiscounted_return", mean_u},
                                {"std_undiscounted_return", std_u},
                                {"mean_discounted_return", mean_d},
                                {"std_discounted_return", std_d},
                                {"flood_days", flood_days},
                                {"spill_total_bcm", spill_total},
                                {"episodes", opt.episodes}};
        std::printf("evaluate: %-16s mean return %10.3f (std %.3f), discounted %10.3f, "
                    "flood days %ld, spill %.4f BCM\n",
                    entry.name.c_str(), mean_u, std_u, mean_d, flood_days, spill_total);
    }

    json metrics;
    metrics["data"] = data_path;
    metrics["test_year"] = test_year;
    metrics["start_date"] = start.to_string();
    metrics["initial_level_m"] = ecfg.initial_level.meters;
    metrics["episodes"] = opt.episodes;
    metrics["seed"] = opt.seed;
    metrics["policies"] = policies;
    write_text(join_path(opt.out_dir, "metrics.json"), metrics.dump(2) + "\n");
    artifacts.emplace_back("metrics", "metrics.json");

    write_manifest(opt.out_dir, "evaluate", opt.seed,
                   snapshot_config(cfg, params,
                                   {{"data", data_path},
                                    {"inflow", opt.inflow},
                                    {"test_year", std::to_string(test_year)},
                                    {"episodes", std::to_string(opt.episodes)}}),
                   artifacts);
    return 0;
}

int cmd_simulate(const SimulateOptions& opt) {
    const KeyValueConfig cfg = load_config(opt.config_path);
    hydro::SimParams params = hydro::SimParams::from_config(cfg);
    params.validate();

    std::optional<Date> start;
    if (!opt.start_date.empty()) start = parse_date_arg(opt.start_date, "--start-date");
    else if (cfg.has("episode.start_date"))
        start = parse_date_arg(cfg.get_string("episode.start_date"), "episode.start_date");

    std::vector<data::DailyRecord> records_vec;
    std::string data_path = "<synthetic>";
    if (!opt.data_path.empty()) {
        records_vec = load_records(opt.data_path, params, &data_path);
        if (!start) start = default_start_date(records_vec, params);
    } else {
        // No dataset: generate one around the episode so replay always covers it.
        if (!start) start = Date{2018, params.water_year_start.month, params.water_year_start.day};
        const int start_year = start->year() - 1;
        const Date last_needed = start->plus_days(params.max_step - 1);
        auto sc = data::SyntheticConfig::monsoon_preset(opt.seed, start_year,
                                                        last_needed.year() - start_year + 1);
        sc.params = params;
        sc.validate();
        records_vec = data::synthesize(sc);
    }
    auto records =
        std::make_shared<const std::vector<data::DailyRecord>>(std::move(records_vec));

    env::EpisodeConfig ecfg;
    ecfg.params = params;
    ecfg.rainfall = std::make_shared<env::ReplayRainfall>(records);
    ecfg.inflow = make_inflow_source(opt.inflow, records);
    ecfg.start_date = *start;
    ecfg.initial_level = initial_level_for(*records, *start, params, cfg);
    ecfg.seed = opt.seed;
    ecfg.validate();

    std::unique_ptr<policy::PolicyInterface> pol;
    if (opt.policy == "baseline") {
        pol = std::make_unique<policy::SchedulePolicy>(params, policy::baseline_schedule(),
                                                       policy::estimator_from_source(ecfg.inflow));
    } else {
        if (!fs::exists(opt.policy))
            throw std::runtime_error("policy artifact not found: " + opt.policy);
        pol = std::make_unique<rl::RlPolicy>(rl::load_policy_json(opt.policy));
    }

    const auto trace = env::run_episode(*pol, ecfg, /*explore=*/false);
    fs::create_directories(opt.out_dir);
    env::write_trace_csv(trace, params.curve(), join_path(opt.out_dir, "trace.csv"));
    write_manifest(opt.out_dir, "simulate", opt.seed,
                   snapshot_config(cfg, params,
                                   {{"data", data_path},
                                    {"inflow", opt.inflow},
                                    {"policy", opt.policy},
                                    {"episode.start_date", start->to_string()},
                                    {"episode.initial_level_m",
                                     std::to_string(ecfg.initial_level.meters)}}),
                   {{"trace", "trace.csv"}});
    std::printf("simulate: %s from %s, %zu rows, return %.3f -> %s\n", opt.policy.c_str(),
                start->to_string().c_str(), trace.steps.size(), trace.undiscounted_return,
                join_path(opt.out_dir, "trace.csv").c_str());
    return 0;
}

} // namespace damrl::cli

#include <cstdio>
#include <exception>

#include "CLI11.hpp"

#include "damrl/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"reservoir-operation simulator, inflow filters and RL training harness"};
    app.set_version_flag("--version", damrl::cli::kToolkitVersion);
    app.require_subcommand(1);

    int rc = 0;

    damrl::cli::GenDataOptions gen_opt;
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic daily dataset");
    gen->add_option("--config", gen_opt.config_path, "key-value config file");
    gen->add_option("--out", gen_opt.out_dir, "output directory");
    gen->add_option("--seed", gen_opt.seed, "generator seed (overrides synth.seed)");
    gen->add_option("--years", gen_opt.years, "calendar years to generate");
    gen->callback([&] { rc = damrl::cli::cmd_gen_data(gen_opt); });

    damrl::cli::FitInflowOptions fit_opt;
    auto* fit = app.add_subcommand("fit-inflow", "fit inflow forecasting models and report NSE");
    fit->add_option("--data", fit_opt.data_path, "daily records CSV")->required();
    fit->add_option("--train-end", fit_opt.train_end_year, "last training calendar year");
    fit->add_option("--test-year", fit_opt.test_year, "held-out calendar year");
    fit->add_option("--k", fit_opt.k, "rainfall window length");
    fit->add_option("--out", fit_opt.out_dir, "output directory");
    fit->add_option("--config", fit_opt.config_path, "key-value config file");
    fit->callback([&] { rc = damrl::cli::cmd_fit_inflow(fit_opt); });

    damrl::cli::TrainOptions train_opt;
    auto* train = app.add_subcommand("train", "train a policy on the calibrated simulator");
    train->add_option("--algo", train_opt.algo, "learning algorithm")
        ->check(CLI::IsMember({"ddpg", "td3", "sac"}));
    train->add_option("--steps", train_opt.steps, "environment steps");
    train->add_option("--seed", train_opt.seed, "master seed");
    train->add_option("--seeds", train_opt.seeds, "seed sweep (comma-separated)")
        ->delimiter(',');
    train->add_option("--jobs", train_opt.jobs, "parallel workers for a seed sweep");
    train->add_option("--data", train_opt.data_path, "daily records CSV")->required();
    train->add_option("--inflow", train_opt.inflow, "fitted inflow model JSON, or 'replay'");
    train->add_option("--train-end", train_opt.train_end_year, "last training calendar year");
    train->add_option("--out", train_opt.out_dir, "output directory");
    train->add_option("--config", train_opt.config_path, "key-value config file");
    train->callback([&] { rc = damrl::cli::cmd_train(train_opt); });

    damrl::cli::EvaluateOptions eval_opt;
    auto* eval = app.add_subcommand("evaluate", "evaluate policies on the held-out test year");
    eval->add_option("--policies", eval_opt.policies, "trained policy JSONs (comma-separated)")
        ->delimiter(',');
    eval->add_flag("--baseline", eval_opt.baseline, "include the baseline schedule policy");
    eval->add_option("--data", eval_opt.data_path, "daily records CSV")->required();
    eval->add_option("--test-year", eval_opt.test_year, "held-out calendar year");
    eval->add_option("--inflow", eval_opt.inflow, "fitted inflow model JSON, or 'replay'");
    eval->add_option("--episodes", eval_opt.episodes, "evaluation episodes per policy");
    eval->add_option("--seed", eval_opt.seed, "shared evaluation seed");
    eval->add_option("--out", eval_opt.out_dir, "output directory");
    eval->add_option("--config", eval_opt.config_path, "key-value config file");
    eval->callback([&] { rc = damrl::cli::cmd_evaluate(eval_opt); });

    damrl::cli::SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate", "dump a single-episode trace");
    sim->add_option("--policy", sim_opt.policy, "'baseline' or a trained policy JSON");
    sim->add_option("--seed", sim_opt.seed, "episode seed");
    sim->add_option("--start-date", sim_opt.start_date, "episode start (YYYY-MM-DD)");
    sim->add_option("--data", sim_opt.data_path, "daily records CSV (synthesized when absent)");
    sim->add_option("--inflow", sim_opt.inflow, "fitted inflow model JSON, or 'replay'");
    sim->add_option("--out", sim_opt.out_dir, "output directory");
    sim->add_option("--config", sim_opt.config_path, "key-value config file");
    sim->callback([&] { rc = damrl::cli::cmd_simulate(sim_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const damrl::cli::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}

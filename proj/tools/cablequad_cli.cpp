// Copyright 2026 The cablequad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cablequad/checkpoint.hpp"
#include "cablequad/config.hpp"
#include "cablequad/csv.hpp"
#include "cablequad/environment.hpp"
#include "cablequad/ppo.hpp"
#include "cablequad/scenarios.hpp"

namespace fs = std::filesystem;
using namespace cablequad;

namespace {

AppConfig load_app_config(const std::string& path) {
    if (path.empty()) return AppConfig::defaults();
    return AppConfig::from_config(Config::from_file(path));
}

ControllerChoice load_controller(const std::string& policy) {
    ControllerChoice c;
    if (policy.empty() || policy == "baseline") {
        c.use_baseline = true;
    } else {
        c.use_baseline = false;
        c.policy = load_checkpoint(policy);
    }
    return c;
}

int cmd_gen_ref(std::uint64_t seed, const std::string& out, double horizon) {
    RngStream rng(seed);
    ReferenceSpec spec = sample_reference(rng, horizon);
    CsvWriter w(out);
    w.header(
        "t,x_P_d_x,x_P_d_y,x_P_d_z,v_P_d_x,v_P_d_y,v_P_d_z,"
        "a_P_d_x,a_P_d_y,a_P_d_z,q_d_x,q_d_y,q_d_z,"
        "x_Q_d_x,x_Q_d_y,x_Q_d_z,v_Q_d_x,v_Q_d_y,v_Q_d_z");
    int steps = static_cast<int>(horizon * 100.0 + 0.5);
    SystemParams nominal;
    for (int k = 0; k <= steps; ++k) {
        double t = k * 0.01;
        ReferenceSample r = quadrotor_reference(t, spec, nominal.m_payload,
                                                nominal.cable_length, nominal.g);
        w.field(t);
        for (int i = 0; i < 3; ++i) w.field(r.x_payload(i));
        for (int i = 0; i < 3; ++i) w.field(r.v_payload(i));
        for (int i = 0; i < 3; ++i) w.field(r.a_payload(i));
        for (int i = 0; i < 3; ++i) w.field(r.q_cable(i));
        for (int i = 0; i < 3; ++i) w.field(r.x_quad(i));
        for (int i = 0; i < 3; ++i) w.field(r.v_quad(i));
        w.end_row();
    }
    return 0;
}

int cmd_simulate(const AppConfig& app, const ControllerChoice& ctrl,
                 std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    EpisodeLog log;
    if (ctrl.use_baseline) {
        BaselineEpisodeSetup setup;
        setup.horizon = app.env.episode_horizon;
        setup.hover = false;
        setup.model = app.env.cable_model;
        log = run_baseline_episode(app, setup, seed);
        if (log.end_reason == "divergence")
            throw DivergenceError("simulate: baseline episode diverged");
    } else {
        log = run_policy_episode(app.env, ctrl.policy, seed,
                                 /*record_divergence=*/false);
    }
    write_trajectory_csv(log, (fs::path(out_dir) / "trajectory.csv").string());
    ScenarioRow row;
    row.scenario = "simulate";
    row.seed = seed;
    row.m_payload = app.env.nominal.m_payload;
    row.cable_length = app.env.nominal.cable_length;
    row.metrics = metrics_from_log(log, app.env.nominal.cable_length);
    row.slack_taut_events = log.slack_to_taut_events();
    row.end_reason = log.end_reason;
    write_metrics_csv({row}, (fs::path(out_dir) / "metrics.csv").string());
    return 0;
}

int cmd_train(const AppConfig& app, std::uint64_t seed,
              const std::string& out_dir, int iters_override, bool quiet) {
    NetworkSpec spec = app.network_spec();
    RngStream init_rng = RngStream(seed).substream(0x77);
    PolicyParams params = PolicyParams::random_init(spec, init_rng);

    std::vector<Environment> envs;
    for (int e = 0; e < app.ppo.num_envs; ++e)
        envs.emplace_back(app.env, RngStream(seed).substream(0x100 + e).state());

    TrainOptions opt;
    opt.total_iters = iters_override > 0 ? iters_override : app.train_iters;
    opt.checkpoint_every = app.checkpoint_every;
    opt.out_dir = out_dir;
    opt.seed = seed;
    opt.verbose = !quiet;
    TrainResult result = train_loop(envs, params, app.ppo, opt);
    std::printf("best return %.3f (%s)\n", result.best_return,
                result.best_checkpoint.c_str());
    return 0;
}

int cmd_eval(const AppConfig& app, const std::string& scenario,
             const ControllerChoice& ctrl, std::uint64_t seed, int num_seeds,
             const std::string& out_dir) {
    run_scenario(scenario, app, ctrl, seed, num_seeds, out_dir);
    return 0;
}

int cmd_sweep(const AppConfig& app, const std::string& grid,
              const ControllerChoice& ctrl, std::uint64_t seed,
              const std::string& out_dir) {
    int nm = 5, nl = 5, ns = 3;
    if (std::sscanf(grid.c_str(), "%dx%dx%d", &nm, &nl, &ns) != 3 || nm < 1 ||
        nl < 1 || ns < 1)
        throw ConfigError("sweep: --grid expects COLSxROWSxSEEDS, e.g. 5x5x3");
    fs::create_directories(out_dir);
    auto rows = run_grid_sweep(app, ctrl, nm, nl, ns, seed);
    write_metrics_csv(rows, (fs::path(out_dir) / "metrics.csv").string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"quadrotor cable-payload simulator, trainer and evaluator"};
    cli.require_subcommand(1);

    std::string config_path, policy_path, out_path, scenario, grid = "5x5x3";
    std::uint64_t seed = 0;
    int num_seeds = 1, iters = 0;
    bool quiet = false;

    auto* sim = cli.add_subcommand("simulate", "run one episode and log it");
    sim->add_option("--config", config_path, "config file");
    sim->add_option("--policy", policy_path, "checkpoint path or 'baseline'");
    sim->add_option("--out", out_path, "output directory")->required();
    sim->add_option("--seed", seed, "random seed");

    auto* train = cli.add_subcommand("train", "train a policy with PPO");
    train->add_option("--config", config_path, "config file");
    train->add_option("--out", out_path, "output directory")->required();
    train->add_option("--seed", seed, "random seed");
    train->add_option("--iters", iters, "override training iterations");
    train->add_flag("--quiet", quiet, "suppress progress lines");

    auto* ev = cli.add_subcommand("eval", "run an evaluation scenario");
    ev->add_option("--scenario", scenario, "scenario name")->required();
    ev->add_option("--config", config_path, "config file");
    ev->add_option("--policy", policy_path, "checkpoint path or 'baseline'");
    ev->add_option("--seeds", num_seeds, "number of seeds");
    ev->add_option("--seed", seed, "base seed");
    ev->add_option("--out", out_path, "output directory")->required();

    auto* sw = cli.add_subcommand("sweep", "run an (m_P, l) grid sweep");
    sw->add_option("--grid", grid, "grid spec COLSxROWSxSEEDS (default 5x5x3)");
    sw->add_option("--config", config_path, "config file");
    sw->add_option("--policy", policy_path, "checkpoint path or 'baseline'");
    sw->add_option("--seed", seed, "base seed");
    sw->add_option("--out", out_path, "output directory")->required();

    auto* gr = cli.add_subcommand("gen-ref", "emit a sampled reference CSV");
    gr->add_option("--seed", seed, "random seed");
    gr->add_option("--out", out_path, "output CSV file")->required();
    double horizon = 25.0;
    gr->add_option("--horizon", horizon, "episode horizon in seconds");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        std::fprintf(stderr, "%s\n", e.what());
        std::fprintf(stderr, "%s", cli.help().c_str());
        return 1;
    }

    try {
        AppConfig app = load_app_config(config_path);
        if (sim->parsed())
            return cmd_simulate(app, load_controller(policy_path), seed, out_path);
        if (train->parsed()) return cmd_train(app, seed, out_path, iters, quiet);
        if (ev->parsed())
            return cmd_eval(app, scenario, load_controller(policy_path), seed,
                            num_seeds, out_path);
        if (sw->parsed())
            return cmd_sweep(app, grid, load_controller(policy_path), seed,
                             out_path);
        if (gr->parsed()) return cmd_gen_ref(seed, out_path, horizon);
    } catch (const DivergenceError& e) {
        std::fprintf(stderr, "runtime divergence: %s\n", e.what());
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

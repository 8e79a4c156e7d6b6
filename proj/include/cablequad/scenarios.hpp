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

#ifndef CABLEQUAD_SCENARIOS_HPP_
#define CABLEQUAD_SCENARIOS_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cablequad/baseline.hpp"
#include "cablequad/config.hpp"
#include "cablequad/csv.hpp"
#include "cablequad/environment.hpp"
#include "cablequad/metrics.hpp"
#include "cablequad/network.hpp"

namespace cablequad {

// 100 Hz episode trace used for metrics and the trajectory CSV.
struct EpisodeLog {
    std::vector<double> t;
    std::vector<SystemState> states;
    std::vector<ReferenceSample> refs;
    std::vector<Wrench> wrenches;
    double dt{0.01};
    std::string end_reason{"timeout"};

    int slack_to_taut_events() const {
        int n = 0;
        for (std::size_t i = 1; i < states.size(); ++i)
            if (states[i - 1].mode == CableMode::Slack &&
                states[i].mode == CableMode::Taut)
                ++n;
        return n;
    }

    std::vector<Vec3> payload_positions() const {
        std::vector<Vec3> v;
        for (const auto& s : states) v.push_back(s.payload.x);
        return v;
    }

    std::vector<Vec3> desired_payload_positions() const {
        std::vector<Vec3> v;
        for (const auto& r : refs) v.push_back(r.x_payload);
        return v;
    }

    std::vector<double> payload_error_norms() const {
        std::vector<double> v;
        for (std::size_t i = 0; i < states.size(); ++i)
            v.push_back((states[i].payload.x - refs[i].x_payload).norm());
        return v;
    }
};

inline void write_trajectory_csv(const EpisodeLog& log,
                                 const std::string& path) {
    CsvWriter w(path);
    w.header(
        "t,x_Q,y_Q,z_Q,vx_Q,vy_Q,vz_Q,r11,r12,r13,r21,r22,r23,r31,r32,r33,"
        "wx,wy,wz,x_P,y_P,z_P,vx_P,vy_P,vz_P,mode,f,Mx,My,Mz");
    for (std::size_t i = 0; i < log.states.size(); ++i) {
        const SystemState& s = log.states[i];
        const Wrench& u = log.wrenches[i];
        w.field(log.t[i]);
        for (int k = 0; k < 3; ++k) w.field(s.quad.x(k));
        for (int k = 0; k < 3; ++k) w.field(s.quad.v(k));
        for (double r : s.quad.R.m) w.field(r);
        for (int k = 0; k < 3; ++k) w.field(s.quad.omega(k));
        for (int k = 0; k < 3; ++k) w.field(s.payload.x(k));
        for (int k = 0; k < 3; ++k) w.field(s.payload.v(k));
        w.field(std::string(to_string(s.mode)));
        w.field(u.f);
        for (int k = 0; k < 3; ++k) w.field(u.moment(k));
        w.end_row();
    }
}

// Roll one episode with a trained policy (deterministic actions). With
// `record_divergence` a diverging run truncates the log instead of
// propagating, so multi-run protocols report it as an outcome.
inline EpisodeLog run_policy_episode(const EnvConfig& cfg,
                                     const PolicyParams& params,
                                     std::uint64_t seed,
                                     bool record_divergence = true) {
    Environment env(cfg, seed);
    std::vector<double> obs = env.reset();
    RngStream unused(0);

    EpisodeLog log;
    log.dt = cfg.dt_policy();
    log.t.push_back(0.0);
    log.states.push_back(env.state());
    log.refs.push_back(env.reference_sample(0.0));
    log.wrenches.push_back(env.applied_wrench());

    const int max_steps = cfg.max_steps();
    for (int k = 0; k < max_steps; ++k) {
        ActResult act = policy_act(params, obs, unused, true);
        Environment::StepResult sr;
        try {
            sr = env.step(act.action);
        } catch (const DivergenceError&) {
            if (!record_divergence) throw;
            log.end_reason = "divergence";
            break;
        }
        obs = sr.obs;
        log.t.push_back(env.time());
        log.states.push_back(env.state());
        log.refs.push_back(env.reference_sample(env.time()));
        log.wrenches.push_back(env.applied_wrench());
        if (sr.done) {
            log.end_reason = sr.reason ? sr.reason : "timeout";
            break;
        }
    }
    return log;
}

struct BaselineEpisodeSetup {
    double horizon{15.0};
    bool hover{true};                       // hover vs sampled reference
    std::optional<double> slack_drop_frac;  // start slack at this fraction of l
    bool perturb_initial{false};            // sample the hover-recovery offsets
    CableModel model{CableModel::Ideal};
};

// Roll one episode under the geometric controller. The control law runs at
// the simulation rate on ideal actuators (direct mixer, no lag or delay),
// which is its role as the classical oracle.
inline EpisodeLog run_baseline_episode(const AppConfig& app,
                                       const BaselineEpisodeSetup& setup,
                                       std::uint64_t seed) {
    const SystemParams& p = app.env.nominal;
    const double dt = app.env.dt_sim;
    const int substeps = app.env.substeps;
    RngStream rng = RngStream(seed).substream(7);

    ReferenceSpec spec;
    if (setup.hover) {
        spec = hover_reference(app.env.base_position, setup.horizon);
    } else {
        spec = sample_reference(rng, setup.horizon);
        spec.origin = app.env.base_position;
    }

    SystemState state = make_hover_state(app.env.base_position, p);
    if (setup.slack_drop_frac && p.has_payload()) {
        state.payload.x =
            state.quad.x + Vec3{0.0, 0.0, -*setup.slack_drop_frac * p.cable_length};
        state.payload.v = Vec3::zero();
        state.mode = CableMode::Slack;
        detail::refresh_cable_geometry(state);
    }
    if (setup.perturb_initial) {
        InitialPerturbation d = sample_initial_perturbation(rng);
        state.quad.x += d.position;
        state.payload.x += d.position;
        state.quad.v += d.velocity;
        state.payload.v += d.velocity;
        state.quad.R =
            state.quad.R * rot_from_euler_zyx(d.attitude.x, d.attitude.y,
                                              d.attitude.z);
        state.quad.omega += d.body_rate;
        if (!p.has_payload()) {
            state.payload.x = state.quad.x;
            state.payload.v = state.quad.v;
        }
    }

    EpisodeLog log;
    log.dt = dt * substeps;
    auto sample_ref = [&](double t) {
        return quadrotor_reference(t, spec, p.m_payload, p.cable_length, p.g);
    };

    Wrench applied{};
    int total_steps = static_cast<int>(setup.horizon / (dt * substeps) + 0.5);
    for (int k = 0; k <= total_steps; ++k) {
        double t = k * dt * substeps;
        log.t.push_back(t);
        log.states.push_back(state);
        log.refs.push_back(sample_ref(t));
        log.wrenches.push_back(applied);
        if (k == total_steps) break;
        try {
            for (int j = 0; j < substeps; ++j) {
                double t_sub = t + j * dt;
                ReferenceSample ref = sample_ref(t_sub);
                auto [f, moment] =
                    geometric_baseline_control(state, ref, p, app.baseline);
                std::array<double, 4> thrusts = mix_to_rotors(f, moment, p);
                applied = wrench_from_rotors(thrusts, p);
                state = integrate_step(state, thrusts, Disturbance::none(), p,
                                       t_sub, dt, setup.model);
            }
        } catch (const DivergenceError&) {
            log.end_reason = "divergence";
            break;
        }
    }
    return log;
}

struct ScenarioRow {
    std::string scenario;
    std::uint64_t seed{0};
    double m_payload{0.0};
    double cable_length{0.0};
    int history_len{-1};
    TrackingMetrics metrics;
    int slack_taut_events{0};
    std::string end_reason;
};

inline void write_metrics_csv(const std::vector<ScenarioRow>& rows,
                              const std::string& path) {
    CsvWriter w(path);
    w.header(
        "scenario,seed,m_P,l,H,rmse_x,rmse_y,rmse_z,rmse_total,rmse_inst,"
        "T_s,T_s_over_T_n,e_ss,slack_taut_events,end_reason");
    for (const auto& r : rows) {
        w.field(r.scenario);
        w.field(static_cast<int>(r.seed));
        w.field(r.m_payload);
        w.field(r.cable_length);
        w.field(r.history_len);
        w.field(r.metrics.rmse_x);
        w.field(r.metrics.rmse_y);
        w.field(r.metrics.rmse_z);
        w.field(r.metrics.rmse_total);
        w.field(r.metrics.rmse_instant);
        w.field(r.metrics.settling_time);
        w.field(r.metrics.settling_periods);
        w.field(r.metrics.steady_state_error);
        w.field(r.slack_taut_events);
        w.field(r.end_reason);
        w.end_row();
    }
}

inline TrackingMetrics metrics_from_log(const EpisodeLog& log,
                                        double cable_length) {
    TrackingMetrics m = rmse_metrics(log.payload_positions(),
                                     log.desired_payload_positions());
    if (log.states.size() > 1 &&
        (log.states.size() - 1) * log.dt >= 0.5) {
        SettlingMetrics s =
            settling_metrics(log.payload_error_norms(), log.dt, cable_length);
        m.settling_time = s.settling_time;
        m.settling_periods = s.settling_periods;
        m.steady_state_error = s.steady_state_error;
    }
    return m;
}

// A controller for scenario runs: either the classical baseline or a
// trained policy checkpoint.
struct ControllerChoice {
    bool use_baseline{true};
    PolicyParams policy;  // valid when !use_baseline
};

namespace detail {

inline EnvConfig eval_env_config(const AppConfig& app) {
    EnvConfig e = app.env;
    e.noise_enabled = false;
    e.randomize_params_enabled = false;
    e.initial_perturbation_enabled = false;
    e.impulse_enabled = false;
    e.ground_effect_enabled = false;
    e.slack_init_prob = 0.0;
    return e;
}

inline ScenarioRow run_tracking_once(const AppConfig& app,
                                     const ControllerChoice& ctrl,
                                     const std::string& name, double m_payload,
                                     double cable_length, std::uint64_t seed,
                                     int history_mask, EpisodeLog* out_log) {
    ScenarioRow row;
    row.scenario = name;
    row.seed = seed;
    row.m_payload = m_payload;
    row.cable_length = cable_length;
    row.history_len = history_mask;

    EpisodeLog log;
    if (ctrl.use_baseline) {
        AppConfig local = app;
        local.env.nominal.m_payload = m_payload;
        local.env.nominal.cable_length = cable_length;
        BaselineEpisodeSetup setup;
        setup.horizon = app.env.episode_horizon;
        setup.hover = false;
        setup.model = app.env.cable_model;
        log = run_baseline_episode(local, setup, seed);
    } else {
        EnvConfig e = eval_env_config(app);
        e.nominal.m_payload = m_payload;
        e.nominal.cable_length = cable_length;
        e.history_mask = history_mask;
        log = run_policy_episode(e, ctrl.policy, seed);
    }
    row.metrics = metrics_from_log(log, cable_length);
    row.slack_taut_events = log.slack_to_taut_events();
    row.end_reason = log.end_reason;
    if (out_log) *out_log = log;
    return row;
}

}  // namespace detail

inline std::vector<ScenarioRow> run_grid_sweep(const AppConfig& app,
                                               const ControllerChoice& ctrl,
                                               int n_mass, int n_len, int seeds,
                                               std::uint64_t seed_base);

// Scenario protocols. Every run is deterministic in (config, seed).
inline std::vector<ScenarioRow> run_scenario(const std::string& name,
                                             const AppConfig& app,
                                             const ControllerChoice& ctrl,
                                             std::uint64_t seed_base,
                                             int num_seeds,
                                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<ScenarioRow> rows;
    EpisodeLog first_log;
    bool have_log = false;

    auto track_endpoint = [&](double m_p, double l) {
        for (int s = 0; s < num_seeds; ++s) {
            EpisodeLog log;
            ScenarioRow row = detail::run_tracking_once(
                app, ctrl, name, m_p, l, seed_base + s, -1,
                s == 0 ? &log : nullptr);
            if (s == 0) {
                first_log = log;
                have_log = true;
            }
            rows.push_back(row);
        }
    };

    if (name == "track_no_payload") {
        track_endpoint(0.0, 0.0);
    } else if (name == "track_payload") {
        track_endpoint(0.2, 1.0);
    } else if (name == "hover_recovery") {
        for (int s = 0; s < num_seeds; ++s) {
            std::uint64_t seed = seed_base + s;
            EpisodeLog log;
            if (ctrl.use_baseline) {
                BaselineEpisodeSetup setup;
                setup.horizon = 15.0;
                setup.hover = true;
                setup.perturb_initial = true;
                setup.model = app.env.cable_model;
                log = run_baseline_episode(app, setup, seed);
            } else {
                EnvConfig e = detail::eval_env_config(app);
                e.hover_reference = true;
                e.episode_horizon = 15.0;
                e.initial_perturbation_enabled = true;
                log = run_policy_episode(e, ctrl.policy, seed);
            }
            ScenarioRow row;
            row.scenario = name;
            row.seed = seed;
            row.m_payload = app.env.nominal.m_payload;
            row.cable_length = app.env.nominal.cable_length;
            row.metrics = metrics_from_log(log, app.env.nominal.cable_length);
            row.slack_taut_events = log.slack_to_taut_events();
            row.end_reason = log.end_reason;
            rows.push_back(row);
            if (s == 0) {
                first_log = log;
                have_log = true;
            }
        }
    } else if (name == "slack_taut_drop") {
        AppConfig local = app;
        local.env.nominal.m_payload = 0.2;
        local.env.nominal.cable_length = 1.0;
        for (int s = 0; s < num_seeds; ++s) {
            std::uint64_t seed = seed_base + s;
            EpisodeLog log;
            if (ctrl.use_baseline) {
                BaselineEpisodeSetup setup;
                setup.horizon = 10.0;
                setup.hover = true;
                setup.slack_drop_frac = 0.3;
                setup.model = CableModel::Compliant;
                log = run_baseline_episode(local, setup, seed);
            } else {
                EnvConfig e = detail::eval_env_config(local);
                e.hover_reference = true;
                e.episode_horizon = 10.0;
                e.cable_model = CableModel::Compliant;
                e.slack_init_prob = 1.0;
                e.slack_init_frac = 0.3;
                e.randomize_params_enabled = false;
                log = run_policy_episode(e, ctrl.policy, seed);
            }
            ScenarioRow row;
            row.scenario = name;
            row.seed = seed;
            row.m_payload = local.env.nominal.m_payload;
            row.cable_length = local.env.nominal.cable_length;
            row.metrics = metrics_from_log(log, local.env.nominal.cable_length);
            row.slack_taut_events = log.slack_to_taut_events();
            row.end_reason = log.end_reason;
            rows.push_back(row);
            if (s == 0) {
                first_log = log;
                have_log = true;
            }
        }
    } else if (name == "grid_sweep") {
        rows = run_grid_sweep(app, ctrl, 5, 5, std::max(num_seeds, 1), seed_base);
    } else if (name == "history_ablation") {
        const int h_values[] = {0, 1, 5, 10};
        struct Endpoint { double m_p, l; } endpoints[] = {{0.0, 0.0}, {0.2, 1.0}};
        for (const auto& ep : endpoints) {
            for (int h : h_values) {
                int mask = std::min(h, app.env.obs.history_len);
                for (int s = 0; s < num_seeds; ++s) {
                    ScenarioRow row = detail::run_tracking_once(
                        app, ctrl, name, ep.m_p, ep.l, seed_base + s, mask,
                        nullptr);
                    row.history_len = h;
                    rows.push_back(row);
                }
            }
        }
    } else {
        throw ConfigError("unknown scenario: " + name);
    }

    if (have_log)
        write_trajectory_csv(first_log,
                             (fs::path(out_dir) / "trajectory.csv").string());
    write_metrics_csv(rows, (fs::path(out_dir) / "metrics.csv").string());
    return rows;
}

// (m_P, l) grid, `seeds` runs per cell, assembled in cell-index order.
inline std::vector<ScenarioRow> run_grid_sweep(const AppConfig& app,
                                               const ControllerChoice& ctrl,
                                               int n_mass, int n_len, int seeds,
                                               std::uint64_t seed_base) {
    std::vector<ScenarioRow> rows;
    for (int i = 0; i < n_mass; ++i) {
        double m_p = n_mass == 1 ? 0.0 : 0.2 * i / (n_mass - 1);
        for (int j = 0; j < n_len; ++j) {
            double l = n_len == 1 ? 0.0 : 1.0 * j / (n_len - 1);
            for (int s = 0; s < seeds; ++s) {
                rows.push_back(detail::run_tracking_once(
                    app, ctrl, "grid_sweep", m_p, l,
                    seed_base + static_cast<std::uint64_t>(s), -1, nullptr));
            }
        }
    }
    return rows;
}

}  // namespace cablequad

#endif  // CABLEQUAD_SCENARIOS_HPP_

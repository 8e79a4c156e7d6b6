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

#ifndef CABLEQUAD_ENVIRONMENT_HPP_
#define CABLEQUAD_ENVIRONMENT_HPP_

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "cablequad/actuation.hpp"
#include "cablequad/dynamics.hpp"
#include "cablequad/randomization.hpp"
#include "cablequad/reference.hpp"
#include "cablequad/reward.hpp"
#include "cablequad/sensing.hpp"

namespace cablequad {

// Everything an episode needs. Scenario builders tweak copies of this.
struct EnvConfig {
    SystemParams nominal{};
    CableModel cable_model{CableModel::Compliant};
    double dt_sim{0.002};
    int substeps{5};               // policy period = substeps * dt_sim
    double episode_horizon{25.0};  // s
    Vec3 base_position{0.0, 0.0, 2.0};

    ObservationLayout obs{};
    NoiseConfig noise{};
    bool noise_enabled{true};
    RewardConfig reward{};
    TerminationConfig termination{};
    RatePidState pid{};

    bool randomize_params_enabled{true};
    RandomizationRanges ranges{};
    bool initial_perturbation_enabled{true};
    bool impulse_enabled{true};
    bool ground_effect_enabled{true};
    double ground_effect_height{0.5};
    double ground_effect_peak{0.3};
    double slack_init_prob{0.2};   // fraction of episodes starting slack
    double slack_init_frac{0.5};   // hang distance as a fraction of l

    bool hover_reference{false};   // zero-amplitude reference family
    int history_mask{-1};          // ablation: visible history entries

    double dt_policy() const { return dt_sim * substeps; }
    int max_steps() const {
        return static_cast<int>(episode_horizon / dt_policy() + 0.5);
    }
};

// One simulated episode streamer: owns params, reference, actuator and
// sensing state. Deterministic per (seed, episode index).
class Environment {
public:
    struct StepResult {
        std::vector<double> obs;
        double reward{0.0};
        bool done{false};
        const char* reason{nullptr};  // null while running, else cause
    };

    Environment(const EnvConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), seed_(seed), history_(cfg.obs.history_len) {}

    int obs_dim() const { return cfg_.obs.size(); }
    const SystemParams& params() const { return params_; }
    const SystemState& state() const { return state_; }
    const ReferenceSpec& reference() const { return spec_; }
    double time() const { return static_cast<double>(step_count_) * cfg_.dt_policy(); }
    const Wrench& applied_wrench() const { return last_wrench_; }
    const Disturbance& impulse() const { return impulse_; }

    ReferenceSample reference_sample(double t) const {
        return quadrotor_reference(t, spec_, params_.m_payload,
                                   params_.cable_length, params_.g);
    }

    std::vector<double> reset() {
        RngStream ep(RngStream(seed_).substream(episode_index_));
        ++episode_index_;
        return reset_with(ep);
    }

    // Deterministic reset from an explicit stream (scenario runners).
    std::vector<double> reset_with(RngStream ep) {
        rng_ = ep.substream(1);

        params_ = cfg_.randomize_params_enabled
                      ? randomize_params(cfg_.nominal, cfg_.ranges, rng_)
                      : cfg_.nominal;

        RngStream ref_rng = ep.substream(2);
        if (cfg_.hover_reference) {
            spec_ = hover_reference(cfg_.base_position, cfg_.episode_horizon);
        } else {
            spec_ = sample_reference(ref_rng, cfg_.episode_horizon);
            spec_.origin = cfg_.base_position;
        }

        state_ = make_hover_state(cfg_.base_position, params_);
        if (params_.has_payload() && cfg_.slack_init_prob > 0.0 &&
            rng_.uniform01() < cfg_.slack_init_prob) {
            // start with a hanging slack cable
            double hang = cfg_.slack_init_frac * params_.cable_length;
            state_.payload.x = state_.quad.x + Vec3{0.0, 0.0, -hang};
            state_.mode = CableMode::Slack;
            detail::refresh_cable_geometry(state_);
        }

        if (cfg_.initial_perturbation_enabled) {
            InitialPerturbation d = sample_initial_perturbation(rng_);
            apply_perturbation(d);
        }

        impulse_ = Disturbance::none();
        if (cfg_.impulse_enabled) {
            double lo = spec_.t_start + spec_.ramp;
            double hi = std::max(lo, spec_.t_end - spec_.ramp);
            impulse_ = sample_impulse_disturbance(rng_, lo, hi);
        }

        pid_ = cfg_.pid;
        pid_.reset();
        double hover_f = params_.total_mass() * params_.g;
        motors_.reset(mix_to_rotors(hover_f, Vec3::zero(), params_),
                      params_.delay);
        last_wrench_ = wrench_from_rotors(motors_.thrust, params_);

        history_ = HistoryBuffer(cfg_.obs.history_len);
        action_history_.clear();
        prev_action_ = Action{};
        step_count_ = 0;
        terminated_reason_ = nullptr;

        SystemState noisy = observe(state_);
        std::vector<double> obs = assemble_observation(
            noisy, spec_, time(), history_, prev_action_, cfg_.obs, params_,
            cfg_.history_mask);
        push_history(noisy, time(), prev_action_);
        return obs;
    }

    StepResult step(const Action& raw_action) {
        Action a = raw_action.clamped();
        auto [f_cmd, omega_d] = map_action(a, params_);

        Vec3 ground_force = Vec3::zero();
        if (cfg_.ground_effect_enabled &&
            state_.quad.x.z < cfg_.ground_effect_height) {
            ground_force = ground_effect_force(
                state_.quad.x.z, rng_, cfg_.ground_effect_height,
                cfg_.ground_effect_peak);
        }

        for (int j = 0; j < cfg_.substeps; ++j) {
            double t_sub = time() + j * cfg_.dt_sim;
            auto [moment, pid_next] =
                rate_pid_step(state_.quad.omega, omega_d, pid_, cfg_.dt_sim);
            pid_ = pid_next;
            std::array<double, 4> cmds = mix_to_rotors(f_cmd, moment, params_);
            auto [motors_next, applied] =
                motor_and_delay_step(motors_, cmds, t_sub, cfg_.dt_sim, params_);
            motors_ = motors_next;

            Disturbance eff;
            eff.force = ground_force +
                        (impulse_.active(t_sub) ? impulse_.force : Vec3::zero());
            eff.moment = impulse_.active(t_sub) ? impulse_.moment : Vec3::zero();
            eff.t_start = t_sub;
            eff.duration = cfg_.dt_sim;

            last_wrench_ = wrench_from_rotors(applied, params_);
            state_ = integrate_step(state_, applied, eff, params_, t_sub,
                                    cfg_.dt_sim, cfg_.cable_model);
        }
        ++step_count_;

        ReferenceSample ref_now = reference_sample(time());

        action_history_.push_front(a);
        while (action_history_.size() >
               static_cast<std::size_t>(cfg_.reward.dact_window + 1))
            action_history_.pop_back();

        auto [reward, terms] =
            compute_reward(state_, ref_now, a, action_history_,
                           params_.has_payload() ? params_.cable_length : 0.0,
                           cfg_.reward);

        StepResult out;
        out.reward = reward;
        auto term = check_termination(state_, ref_now, cfg_.termination);
        bool truncated = step_count_ >= cfg_.max_steps();
        out.done = term.has_value() || truncated;
        if (term.has_value()) {
            terminated_reason_ = to_string(*term);
            out.reason = terminated_reason_;
        } else if (truncated) {
            out.reason = "timeout";
        }

        SystemState noisy = observe(state_);
        out.obs = assemble_observation(noisy, spec_, time(), history_,
                                       a, cfg_.obs, params_, cfg_.history_mask);
        push_history(noisy, time(), a);
        prev_action_ = a;
        return out;
    }

private:
    SystemState observe(const SystemState& s) {
        return cfg_.noise_enabled ? add_sensor_noise(s, cfg_.noise, rng_) : s;
    }

    void push_history(const SystemState& noisy, double t, const Action& a) {
        if (cfg_.obs.history_len == 0) return;
        ReferenceSample ref = reference_sample(t);
        history_.push(make_history_entry(noisy, ref, a, params_, cfg_.obs));
    }

    void apply_perturbation(const InitialPerturbation& d) {
        state_.quad.x += d.position;
        state_.payload.x += d.position;
        state_.quad.v += d.velocity;
        state_.payload.v += d.velocity;
        state_.quad.R = state_.quad.R * rot_from_euler_zyx(d.attitude.x,
                                                           d.attitude.y,
                                                           d.attitude.z);
        state_.quad.omega += d.body_rate;
        if (!params_.has_payload()) {
            state_.payload.x = state_.quad.x;
            state_.payload.v = state_.quad.v;
        }
    }

    EnvConfig cfg_;
    std::uint64_t seed_;
    std::uint64_t episode_index_{0};

    RngStream rng_{};
    SystemParams params_{};
    ReferenceSpec spec_{};
    SystemState state_{};
    RatePidState pid_{};
    MotorState motors_{};
    Disturbance impulse_{};
    HistoryBuffer history_;
    std::deque<Action> action_history_;
    Action prev_action_{};
    Wrench last_wrench_{};
    int step_count_{0};
    const char* terminated_reason_{nullptr};
};

}  // namespace cablequad

#endif  // CABLEQUAD_ENVIRONMENT_HPP_

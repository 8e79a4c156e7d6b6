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

#ifndef CABLEQUAD_CONFIG_HPP_
#define CABLEQUAD_CONFIG_HPP_

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cablequad/baseline.hpp"
#include "cablequad/environment.hpp"
#include "cablequad/network.hpp"
#include "cablequad/ppo.hpp"

namespace cablequad {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys = {
        "sim.dt", "sim.substeps", "sim.horizon", "sim.base_height",
        "sim.cable_model", "sim.task",
        "params.m_quad", "params.j_xx", "params.j_yy", "params.j_zz",
        "params.m_payload", "params.cable_length", "params.f_max",
        "params.omega_max", "params.g", "params.cable_stiffness",
        "params.cable_damping", "params.arm_length", "params.torque_coeff",
        "params.rotor_tau_up", "params.rotor_tau_down", "params.delay",
        "params.com_x", "params.com_y", "params.com_z",
        "pid.kp_roll", "pid.kp_pitch", "pid.kp_yaw", "pid.ki_roll",
        "pid.ki_pitch", "pid.ki_yaw", "pid.kd_roll", "pid.kd_pitch",
        "pid.kd_yaw", "pid.integral_limit", "pid.moment_max",
        "noise.enabled", "noise.sigma_x", "noise.clip_x", "noise.sigma_v",
        "noise.clip_v", "noise.sigma_theta", "noise.clip_theta",
        "noise.sigma_omega", "noise.clip_omega",
        "observation.history", "observation.preview", "observation.x_max",
        "observation.v_max", "observation.payload_info",
        "reward.w_pos", "reward.alpha_pos", "reward.w_yaw", "reward.alpha_yaw",
        "reward.w_omega", "reward.alpha_omega", "reward.w_qdot",
        "reward.alpha_qdot", "reward.w_act", "reward.alpha_act",
        "reward.w_dact", "reward.alpha_dact", "reward.dact_decay",
        "reward.dact_window",
        "termination.eps_pos", "termination.eps_vel",
        "termination.attitude_limit",
        "randomization.enabled", "randomization.faithful",
        "randomization.mass_scale", "randomization.inertia_scale",
        "randomization.com_offset_max", "randomization.inertia_tilt_max",
        "randomization.gear_scale", "randomization.m_payload_min",
        "randomization.m_payload_max", "randomization.cable_length_min",
        "randomization.cable_length_max", "randomization.rotor_tau_scale",
        "randomization.delay_min", "randomization.delay_max",
        "randomization.initial_perturbation", "randomization.impulse",
        "randomization.ground_effect", "randomization.ground_effect_height",
        "randomization.ground_effect_peak", "randomization.slack_init_prob",
        "randomization.slack_init_frac",
        "ppo.gamma", "ppo.lam", "ppo.clip_eps", "ppo.epochs",
        "ppo.minibatches", "ppo.lr", "ppo.entropy_coeff", "ppo.value_coeff",
        "ppo.grad_clip", "ppo.steps_per_iter", "ppo.num_envs", "ppo.iters",
        "ppo.checkpoint_every", "ppo.reward_scale", "ppo.anneal_lr",
        "network.enc_hist", "network.enc_prev", "network.trunk",
        "network.log_std_init",
        "baseline.k_pos", "baseline.k_vel", "baseline.k_rot",
        "baseline.k_omega",
    };
    return keys;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

// Flat "key = value" file with [section] headers, '#' comments and a closed
// key set: any key outside the registry is an error, which catches typos.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("config: cannot open " + path);
        Config c;
        std::string line, section;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            std::string t = detail::trim(line);
            std::size_t hash = t.find('#');
            if (hash != std::string::npos) t = detail::trim(t.substr(0, hash));
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ConfigError("config: malformed section at line " +
                                      std::to_string(lineno));
                section = detail::trim(t.substr(1, t.size() - 2));
                continue;
            }
            std::size_t eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config: expected key = value at line " +
                                  std::to_string(lineno));
            std::string key = detail::trim(t.substr(0, eq));
            std::string value = detail::trim(t.substr(eq + 1));
            std::string full = section.empty() ? key : section + "." + key;
            if (detail::known_config_keys().count(full) == 0)
                throw ConfigError("config: unknown key '" + full + "' at line " +
                                  std::to_string(lineno));
            c.values_[full] = value;
        }
        return c;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            std::size_t used = 0;
            double v = std::stod(it->second, &used);
            if (used != it->second.size())
                throw ConfigError("config: bad number for " + key);
            return v;
        } catch (const std::invalid_argument&) {
            throw ConfigError("config: bad number for " + key);
        }
    }

    int get_int(const std::string& key, int fallback) const {
        double v = get_double(key, fallback);
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("config: expected integer for " + key);
        return i;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("config: expected true/false for " + key);
    }

    std::string get_string(const std::string& key,
                           const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

private:
    std::map<std::string, std::string> values_;
};

// Full application configuration assembled from a Config (or defaults).
struct AppConfig {
    EnvConfig env{};
    PPOConfig ppo{};
    int train_iters{100};
    int checkpoint_every{10};
    BaselineGains baseline{};
    int enc_hist{64}, enc_prev{32}, trunk{256};
    double log_std_init{std::log(0.3)};

    NetworkSpec network_spec() const {
        NetworkSpec s;
        s.present_dim = 42;
        s.history_dim = 42 * env.obs.history_len;
        s.preview_dim = 12 * env.obs.preview_len;
        s.enc_hist = enc_hist;
        s.enc_prev = enc_prev;
        s.trunk = trunk;
        s.action_dim = 4;
        s.log_std_init = log_std_init;
        return s;
    }

    static AppConfig defaults() { return AppConfig{}; }

    static AppConfig from_config(const Config& c) {
        AppConfig a;
        a.env.dt_sim = c.get_double("sim.dt", a.env.dt_sim);
        a.env.substeps = c.get_int("sim.substeps", a.env.substeps);
        a.env.episode_horizon = c.get_double("sim.horizon", a.env.episode_horizon);
        double bh = c.get_double("sim.base_height", a.env.base_position.z);
        a.env.base_position = {0.0, 0.0, bh};
        std::string model = c.get_string("sim.cable_model", "compliant");
        if (model == "compliant") a.env.cable_model = CableModel::Compliant;
        else if (model == "ideal") a.env.cable_model = CableModel::Ideal;
        else throw ConfigError("config: cable_model must be compliant or ideal");
        std::string task = c.get_string("sim.task", "track");
        if (task == "hover") a.env.hover_reference = true;
        else if (task != "track")
            throw ConfigError("config: task must be track or hover");

        SystemParams& p = a.env.nominal;
        p.m_quad = c.get_double("params.m_quad", p.m_quad);
        p.inertia = Mat3::diag(c.get_double("params.j_xx", p.inertia(0, 0)),
                               c.get_double("params.j_yy", p.inertia(1, 1)),
                               c.get_double("params.j_zz", p.inertia(2, 2)));
        p.m_payload = c.get_double("params.m_payload", p.m_payload);
        p.cable_length = c.get_double("params.cable_length", p.cable_length);
        p.f_max = c.get_double("params.f_max", p.f_max);
        p.omega_max = c.get_double("params.omega_max", p.omega_max);
        p.g = c.get_double("params.g", p.g);
        p.cable_stiffness = c.get_double("params.cable_stiffness", p.cable_stiffness);
        p.cable_damping = c.get_double("params.cable_damping", p.cable_damping);
        p.arm_length = c.get_double("params.arm_length", p.arm_length);
        p.torque_coeff = c.get_double("params.torque_coeff", p.torque_coeff);
        p.rotor_tau_up = c.get_double("params.rotor_tau_up", p.rotor_tau_up);
        p.rotor_tau_down = c.get_double("params.rotor_tau_down", p.rotor_tau_down);
        p.delay = c.get_double("params.delay", p.delay);
        p.com_offset = {c.get_double("params.com_x", 0.0),
                        c.get_double("params.com_y", 0.0),
                        c.get_double("params.com_z", 0.0)};
        p.validate();

        RatePidState& pid = a.env.pid;
        pid.kp = {c.get_double("pid.kp_roll", pid.kp.x),
                  c.get_double("pid.kp_pitch", pid.kp.y),
                  c.get_double("pid.kp_yaw", pid.kp.z)};
        pid.ki = {c.get_double("pid.ki_roll", pid.ki.x),
                  c.get_double("pid.ki_pitch", pid.ki.y),
                  c.get_double("pid.ki_yaw", pid.ki.z)};
        pid.kd = {c.get_double("pid.kd_roll", pid.kd.x),
                  c.get_double("pid.kd_pitch", pid.kd.y),
                  c.get_double("pid.kd_yaw", pid.kd.z)};
        double il = c.get_double("pid.integral_limit", pid.integral_limit.x);
        pid.integral_limit = {il, il, il};
        pid.moment_max = c.get_double("pid.moment_max", pid.moment_max);

        a.env.noise_enabled = c.get_bool("noise.enabled", a.env.noise_enabled);
        NoiseConfig& nz = a.env.noise;
        nz.sigma_x = c.get_double("noise.sigma_x", nz.sigma_x);
        nz.clip_x = c.get_double("noise.clip_x", nz.clip_x);
        nz.sigma_v = c.get_double("noise.sigma_v", nz.sigma_v);
        nz.clip_v = c.get_double("noise.clip_v", nz.clip_v);
        nz.sigma_theta = c.get_double("noise.sigma_theta", nz.sigma_theta);
        nz.clip_theta = c.get_double("noise.clip_theta", nz.clip_theta);
        nz.sigma_omega = c.get_double("noise.sigma_omega", nz.sigma_omega);
        nz.clip_omega = c.get_double("noise.clip_omega", nz.clip_omega);

        a.env.obs.history_len = c.get_int("observation.history", a.env.obs.history_len);
        a.env.obs.preview_len = c.get_int("observation.preview", a.env.obs.preview_len);
        a.env.obs.x_max = c.get_double("observation.x_max", a.env.obs.x_max);
        a.env.obs.v_max = c.get_double("observation.v_max", a.env.obs.v_max);
        a.env.obs.payload_info = c.get_bool("observation.payload_info",
                                            a.env.obs.payload_info);
        a.env.obs.dt_policy = a.env.dt_sim * a.env.substeps;

        RewardConfig& rw = a.env.reward;
        rw.w_pos = c.get_double("reward.w_pos", rw.w_pos);
        rw.alpha_pos = c.get_double("reward.alpha_pos", rw.alpha_pos);
        rw.w_yaw = c.get_double("reward.w_yaw", rw.w_yaw);
        rw.alpha_yaw = c.get_double("reward.alpha_yaw", rw.alpha_yaw);
        rw.w_omega = c.get_double("reward.w_omega", rw.w_omega);
        rw.alpha_omega = c.get_double("reward.alpha_omega", rw.alpha_omega);
        rw.w_qdot = c.get_double("reward.w_qdot", rw.w_qdot);
        rw.alpha_qdot = c.get_double("reward.alpha_qdot", rw.alpha_qdot);
        rw.w_act = c.get_double("reward.w_act", rw.w_act);
        rw.alpha_act = c.get_double("reward.alpha_act", rw.alpha_act);
        rw.w_dact = c.get_double("reward.w_dact", rw.w_dact);
        rw.alpha_dact = c.get_double("reward.alpha_dact", rw.alpha_dact);
        rw.dact_decay = c.get_double("reward.dact_decay", rw.dact_decay);
        rw.dact_window = c.get_int("reward.dact_window", rw.dact_window);

        a.env.termination.eps_pos = c.get_double("termination.eps_pos",
                                                 a.env.termination.eps_pos);
        a.env.termination.eps_vel = c.get_double("termination.eps_vel",
                                                 a.env.termination.eps_vel);
        a.env.termination.attitude_limit = c.get_double(
            "termination.attitude_limit", a.env.termination.attitude_limit);

        a.env.randomize_params_enabled =
            c.get_bool("randomization.enabled", a.env.randomize_params_enabled);
        RandomizationRanges& rr = a.env.ranges;
        rr.mass_scale = c.get_double("randomization.mass_scale", rr.mass_scale);
        rr.inertia_scale = c.get_double("randomization.inertia_scale", rr.inertia_scale);
        rr.com_offset_max = c.get_double("randomization.com_offset_max", rr.com_offset_max);
        rr.inertia_tilt_max = c.get_double("randomization.inertia_tilt_max", rr.inertia_tilt_max);
        rr.gear_scale = c.get_double("randomization.gear_scale", rr.gear_scale);
        rr.m_payload_min = c.get_double("randomization.m_payload_min", rr.m_payload_min);
        rr.m_payload_max = c.get_double("randomization.m_payload_max", rr.m_payload_max);
        rr.cable_length_min = c.get_double("randomization.cable_length_min", rr.cable_length_min);
        rr.cable_length_max = c.get_double("randomization.cable_length_max", rr.cable_length_max);
        rr.rotor_tau_scale = c.get_double("randomization.rotor_tau_scale", rr.rotor_tau_scale);
        rr.delay_min = c.get_double("randomization.delay_min", rr.delay_min);
        rr.delay_max = c.get_double("randomization.delay_max", rr.delay_max);

        // Faithful mode pins the protocol ranges to their fixed values.
        if (c.get_bool("randomization.faithful", true)) {
            auto check = [](double got, double want, const char* name) {
                if (got != want)
                    throw ConfigError(std::string("config: ") + name +
                                      " is fixed in faithful mode; set "
                                      "randomization.faithful = false to override");
            };
            check(rr.m_payload_min, 0.0, "m_payload_min");
            check(rr.m_payload_max, 0.2, "m_payload_max");
            check(rr.cable_length_min, 0.0, "cable_length_min");
            check(rr.cable_length_max, 1.0, "cable_length_max");
            check(rr.delay_min, 0.010, "delay_min");
            check(rr.delay_max, 0.030, "delay_max");
        }

        a.env.initial_perturbation_enabled = c.get_bool(
            "randomization.initial_perturbation", a.env.initial_perturbation_enabled);
        a.env.impulse_enabled = c.get_bool("randomization.impulse", a.env.impulse_enabled);
        a.env.ground_effect_enabled =
            c.get_bool("randomization.ground_effect", a.env.ground_effect_enabled);
        a.env.ground_effect_height = c.get_double(
            "randomization.ground_effect_height", a.env.ground_effect_height);
        a.env.ground_effect_peak = c.get_double(
            "randomization.ground_effect_peak", a.env.ground_effect_peak);
        a.env.slack_init_prob = c.get_double("randomization.slack_init_prob",
                                             a.env.slack_init_prob);
        a.env.slack_init_frac = c.get_double("randomization.slack_init_frac",
                                             a.env.slack_init_frac);

        a.ppo.gamma = c.get_double("ppo.gamma", a.ppo.gamma);
        a.ppo.lam = c.get_double("ppo.lam", a.ppo.lam);
        a.ppo.clip_eps = c.get_double("ppo.clip_eps", a.ppo.clip_eps);
        a.ppo.epochs = c.get_int("ppo.epochs", a.ppo.epochs);
        a.ppo.minibatches = c.get_int("ppo.minibatches", a.ppo.minibatches);
        a.ppo.lr = c.get_double("ppo.lr", a.ppo.lr);
        a.ppo.entropy_coeff = c.get_double("ppo.entropy_coeff", a.ppo.entropy_coeff);
        a.ppo.value_coeff = c.get_double("ppo.value_coeff", a.ppo.value_coeff);
        a.ppo.grad_clip = c.get_double("ppo.grad_clip", a.ppo.grad_clip);
        a.ppo.steps_per_iter = c.get_int("ppo.steps_per_iter", a.ppo.steps_per_iter);
        a.ppo.num_envs = c.get_int("ppo.num_envs", a.ppo.num_envs);
        a.ppo.reward_scale = c.get_double("ppo.reward_scale", a.ppo.reward_scale);
        a.ppo.anneal_lr = c.get_bool("ppo.anneal_lr", a.ppo.anneal_lr);
        a.train_iters = c.get_int("ppo.iters", a.train_iters);
        a.checkpoint_every = c.get_int("ppo.checkpoint_every", a.checkpoint_every);

        a.enc_hist = c.get_int("network.enc_hist", a.enc_hist);
        a.enc_prev = c.get_int("network.enc_prev", a.enc_prev);
        a.trunk = c.get_int("network.trunk", a.trunk);
        a.log_std_init = c.get_double("network.log_std_init", a.log_std_init);

        a.baseline.k_pos = c.get_double("baseline.k_pos", a.baseline.k_pos);
        a.baseline.k_vel = c.get_double("baseline.k_vel", a.baseline.k_vel);
        a.baseline.k_rot = c.get_double("baseline.k_rot", a.baseline.k_rot);
        a.baseline.k_omega = c.get_double("baseline.k_omega", a.baseline.k_omega);
        a.baseline.moment_max = a.env.pid.moment_max;
        return a;
    }
};

}  // namespace cablequad

#endif  // CABLEQUAD_CONFIG_HPP_

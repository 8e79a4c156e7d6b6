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

#ifndef CABLEQUAD_REWARD_HPP_
#define CABLEQUAD_REWARD_HPP_

#include <array>
#include <cmath>
#include <deque>
#include <optional>

#include "cablequad/actuation.hpp"
#include "cablequad/math.hpp"
#include "cablequad/reference.hpp"
#include "cablequad/state.hpp"

namespace cablequad {

// Exponentiated penalty terms. Scales chosen so each term spans roughly
// (0.1, 1) over typical training excursions.
struct RewardConfig {
    double w_pos{1.0},   alpha_pos{5.0};     // payload position error
    double w_yaw{1.0},   alpha_yaw{1.0};
    double w_omega{1.0}, alpha_omega{0.5};   // body rates
    double w_qdot{1.0},  alpha_qdot{0.5};    // cable motion
    double w_act{1.0},   alpha_act{0.1};     // action magnitude
    double w_dact{1.0},  alpha_dact{1.0};    // action variation
    double dact_decay{0.8};                  // decay of the change window
    int dact_window{5};                      // number of recent differences
};

struct RewardTerms {
    double pos{0.0}, yaw{0.0}, omega{0.0}, qdot{0.0}, act{0.0}, dact{0.0};
};

// Exponentially weighted L2 norm of recent successive action changes.
// The most recent difference has weight 1.
inline double action_change_norm(const std::deque<Action>& history,
                                 double decay, int window) {
    double acc = 0.0;
    double w = 1.0;
    int n = static_cast<int>(history.size());
    for (int k = 0; k < window && k + 1 < n; ++k) {
        // history is newest-first: entry 0 is a_t, entry 1 is a_{t-1}, ...
        Action d = history[k] - history[k + 1];
        double nd = d.norm();
        acc += w * nd * nd;
        w *= decay;
    }
    return std::sqrt(acc);
}

// r = r_pos (1 + r_yaw + r_omega + r_qdot) + r_act + r_dact.
// `action_history` must hold at least the current action (newest first).
inline std::pair<double, RewardTerms> compute_reward(
    const SystemState& s, const ReferenceSample& ref, const Action& a,
    const std::deque<Action>& action_history, double cable_length,
    const RewardConfig& cfg) {
    RewardTerms t;
    double pos_err = (s.payload.x - ref.x_payload).norm();
    t.pos = cfg.w_pos * std::exp(-cfg.alpha_pos * pos_err);

    double yaw = euler_zyx(s.quad.R).yaw;
    t.yaw = cfg.w_yaw * std::exp(-cfg.alpha_yaw * std::abs(yaw));

    t.omega = cfg.w_omega * std::exp(-cfg.alpha_omega * s.quad.omega.norm());

    double qdot = cable_length > 0.0
                      ? (s.payload.v - s.quad.v).norm() / cable_length
                      : 0.0;
    t.qdot = cfg.w_qdot * std::exp(-cfg.alpha_qdot * qdot);

    t.act = cfg.w_act * std::exp(-cfg.alpha_act * a.norm());

    double dact =
        action_change_norm(action_history, cfg.dact_decay, cfg.dact_window);
    t.dact = cfg.w_dact * std::exp(-cfg.alpha_dact * dact);

    double r = t.pos * (1.0 + t.yaw + t.omega + t.qdot) + t.act + t.dact;
    return {r, t};
}

struct TerminationConfig {
    double eps_pos{1.0};           // m
    double eps_vel{5.0};           // m/s
    double attitude_limit{kPi / 2.0};  // rad, any ZYX Euler angle
};

enum class TerminationReason { Ground, PayloadPosError, PayloadVelError, Attitude };

inline const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::Ground: return "ground";
        case TerminationReason::PayloadPosError: return "payload_pos";
        case TerminationReason::PayloadVelError: return "payload_vel";
        case TerminationReason::Attitude: return "attitude";
    }
    return "unknown";
}

inline std::optional<TerminationReason> check_termination(
    const SystemState& s, const ReferenceSample& ref,
    const TerminationConfig& cfg) {
    if (s.quad.x.z < 0.0) return TerminationReason::Ground;
    if ((s.payload.x - ref.x_payload).norm() > cfg.eps_pos)
        return TerminationReason::PayloadPosError;
    if ((s.payload.v - ref.v_payload).norm() > cfg.eps_vel)
        return TerminationReason::PayloadVelError;
    EulerZyx e = euler_zyx(s.quad.R);
    if (std::abs(e.roll) > cfg.attitude_limit ||
        std::abs(e.pitch) > cfg.attitude_limit ||
        std::abs(e.yaw) > cfg.attitude_limit)
        return TerminationReason::Attitude;
    return std::nullopt;
}

}  // namespace cablequad

#endif  // CABLEQUAD_REWARD_HPP_

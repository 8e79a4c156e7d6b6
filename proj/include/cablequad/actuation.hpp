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

#ifndef CABLEQUAD_ACTUATION_HPP_
#define CABLEQUAD_ACTUATION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <utility>

#include "cablequad/dynamics.hpp"
#include "cablequad/math.hpp"
#include "cablequad/params.hpp"

namespace cablequad {

// Normalized policy action: collective channel plus three rate channels.
struct Action {
    double collective{0.0};
    double rate_x{0.0};
    double rate_y{0.0};
    double rate_z{0.0};

    double operator()(int i) const { return (&collective)[i]; }
    double& operator()(int i) { return (&collective)[i]; }

    Action clamped() const {
        Action a;
        for (int i = 0; i < 4; ++i) a(i) = std::clamp((*this)(i), -1.0, 1.0);
        return a;
    }

    double norm() const {
        return std::sqrt(collective * collective + rate_x * rate_x +
                         rate_y * rate_y + rate_z * rate_z);
    }

    Action operator-(const Action& o) const {
        Action r;
        for (int i = 0; i < 4; ++i) r(i) = (*this)(i)-o(i);
        return r;
    }
};

struct WrenchCommand {
    double f{0.0};
    Vec3 moment{};
};

// Affine action map: f = f_max/2 (1 + a_c), rate setpoint = omega_max * a.
inline std::pair<double, Vec3> map_action(const Action& a,
                                          const SystemParams& p) {
    double f = 0.5 * p.f_max * (1.0 + a.collective);
    Vec3 omega_d = p.omega_max * Vec3{a.rate_x, a.rate_y, a.rate_z};
    return {f, omega_d};
}

// Per-axis rate PID with clamping anti-windup and symmetric moment limits.
struct RatePidState {
    Vec3 integral{};
    Vec3 prev_error{};
    bool has_prev{false};
    Vec3 kp{0.1, 0.1, 0.05};
    Vec3 ki{0.05, 0.05, 0.025};
    Vec3 kd{0.002, 0.002, 0.001};
    Vec3 integral_limit{0.5, 0.5, 0.5};
    double moment_max{0.1};   // N m, per axis; lower bound is -moment_max

    void reset() {
        integral = Vec3::zero();
        prev_error = Vec3::zero();
        has_prev = false;
    }
};

inline std::pair<Vec3, RatePidState> rate_pid_step(const Vec3& omega,
                                                   const Vec3& omega_d,
                                                   const RatePidState& pid,
                                                   double dt) {
    RatePidState next = pid;
    Vec3 err = omega_d - omega;
    Vec3 derr = pid.has_prev ? (err - pid.prev_error) / dt : Vec3::zero();
    Vec3 m;
    for (int i = 0; i < 3; ++i) {
        double unsat = pid.kp(i) * err(i) + pid.ki(i) * pid.integral(i) +
                       pid.kd(i) * derr(i);
        double sat = std::clamp(unsat, -pid.moment_max, pid.moment_max);
        if (sat == unsat) {
            next.integral(i) = std::clamp(pid.integral(i) + err(i) * dt,
                                          -pid.integral_limit(i),
                                          pid.integral_limit(i));
        }
        m(i) = sat;
    }
    next.prev_error = err;
    next.has_prev = true;
    return {m, next};
}

// Inverse allocation for the symmetric X frame. The forward map's rows are
// mutually orthogonal, so the inverse is closed-form; outputs are clipped to
// [0, f_max/4], which is the documented saturation behavior.
inline std::array<double, 4> mix_to_rotors(double f, const Vec3& moment,
                                           const SystemParams& p) {
    double d = p.arm_length / std::sqrt(2.0);
    std::array<double, 4> t{};
    for (int i = 0; i < 4; ++i) {
        double raw = 0.25 * f + kRotorSignY[i] * moment.x / (4.0 * d) -
                     kRotorSignX[i] * moment.y / (4.0 * d) +
                     kRotorSpin[i] * moment.z / (4.0 * p.torque_coeff);
        t[i] = std::clamp(raw, 0.0, p.rotor_thrust_max());
    }
    return t;
}

// First-order rotor lag behind a per-episode transport delay. Commands are
// enqueued with their timestamp and become visible once they age past the
// delay; the lag uses the exact exponential update with asymmetric rise and
// fall constants. Gear scales the thrust each rotor actually delivers.
struct MotorState {
    std::array<double, 4> thrust{};            // N, lag state per rotor
    std::array<double, 4> active_cmd{};        // command currently visible
    std::deque<std::pair<double, std::array<double, 4>>> queue;
    double delay{0.020};                       // s, sampled per episode

    void reset(const std::array<double, 4>& initial, double delay_s) {
        thrust = initial;
        active_cmd = initial;
        queue.clear();
        delay = delay_s;
    }
};

inline std::pair<MotorState, std::array<double, 4>> motor_and_delay_step(
    const MotorState& m, const std::array<double, 4>& commanded, double t,
    double dt, const SystemParams& p) {
    MotorState next = m;
    next.queue.emplace_back(t, commanded);
    while (!next.queue.empty() && t - next.queue.front().first >= next.delay) {
        next.active_cmd = next.queue.front().second;
        next.queue.pop_front();
    }
    std::array<double, 4> applied{};
    for (int i = 0; i < 4; ++i) {
        double cmd = next.active_cmd[i];
        double tau = cmd > next.thrust[i] ? p.rotor_tau_up : p.rotor_tau_down;
        next.thrust[i] = cmd + (next.thrust[i] - cmd) * std::exp(-dt / tau);
        applied[i] = p.gear[i] * next.thrust[i];
    }
    return {next, applied};
}

}  // namespace cablequad

#endif  // CABLEQUAD_ACTUATION_HPP_

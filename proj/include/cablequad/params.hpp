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

#ifndef CABLEQUAD_PARAMS_HPP_
#define CABLEQUAD_PARAMS_HPP_

#include <array>
#include <stdexcept>

#include "cablequad/math.hpp"

namespace cablequad {

// Physical constants of the quadrotor + cable + payload platform.
// Defaults are the nominal desk-scale platform.
struct SystemParams {
    double m_quad{0.835};                              // kg
    Mat3 inertia{Mat3::diag(4.01e-3, 3.58e-3, 6.36e-3)};  // kg m^2, body frame
    double m_payload{0.1};                             // kg
    double cable_length{0.5};                          // m
    double f_max{30.0};                                // N, total thrust bound
    double omega_max{10.0};                            // rad/s, body-rate bound
    double g{9.81};                                    // m/s^2
    double cable_stiffness{500.0};                     // N/m
    double cable_damping{5.0};                         // N s/m
    double arm_length{0.15};                           // m
    double torque_coeff{0.016};                        // m, yaw moment per thrust
    double rotor_tau_up{0.030};                        // s
    double rotor_tau_down{0.060};                      // s
    double delay{0.020};                               // s, actuation input delay
    Vec3 com_offset{};                                 // m, CoM minus geometric center
    std::array<double, 4> gear{1.0, 1.0, 1.0, 1.0};    // per-rotor thrust scale

    double rotor_thrust_max() const { return f_max / 4.0; }
    double total_mass() const { return m_quad + m_payload; }
    bool has_payload() const { return m_payload > 0.0 && cable_length > 0.0; }

    void validate() const {
        if (!(m_quad > 0.0)) throw std::invalid_argument("m_quad must be positive");
        if (!(m_payload >= 0.0)) throw std::invalid_argument("m_payload must be non-negative");
        if (!(cable_length >= 0.0)) throw std::invalid_argument("cable_length must be non-negative");
        if (!(f_max > 0.0)) throw std::invalid_argument("f_max must be positive");
        if (!(cable_stiffness > 0.0)) throw std::invalid_argument("cable_stiffness must be positive");
        for (int i = 0; i < 3; ++i)
            if (!(inertia(i, i) > 0.0))
                throw std::invalid_argument("inertia diagonal must be positive");
    }
};

// Constant external wrench active on [t_start, t_start + duration).
struct Disturbance {
    Vec3 force{};        // N, inertial frame, on the quadrotor body
    Vec3 moment{};       // N m, body frame
    double t_start{0.0};
    double duration{0.0};

    bool active(double t) const {
        return duration > 0.0 && t >= t_start && t < t_start + duration;
    }

    static Disturbance none() { return {}; }
};

}  // namespace cablequad

#endif  // CABLEQUAD_PARAMS_HPP_

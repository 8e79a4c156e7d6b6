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

#ifndef CABLEQUAD_BASELINE_HPP_
#define CABLEQUAD_BASELINE_HPP_

#include <algorithm>

#include "cablequad/dynamics.hpp"
#include "cablequad/math.hpp"
#include "cablequad/reference.hpp"
#include "cablequad/state.hpp"

namespace cablequad {

// Classical SE(3) tracking gains, tuned once against the nominal platform.
struct BaselineGains {
    double k_pos{8.0};
    double k_vel{4.0};
    double k_rot{2.0};
    double k_omega{0.3};
    double moment_max{0.1};  // N m per axis
};

// Geometric tracking law on the quadrotor reference: desired force from
// position/velocity feedback plus gravity/acceleration feedforward, thrust
// as its projection on the body z axis, attitude steered toward the desired
// thrust direction at zero yaw. Intended for the quadrotor-only or
// small-swing regime; serves as the classical test oracle.
inline std::pair<double, Vec3> geometric_baseline_control(
    const SystemState& s, const ReferenceSample& ref,
    const SystemParams& p, const BaselineGains& g) {
    Vec3 e_x = ref.x_quad - s.quad.x;
    Vec3 e_v = ref.v_quad - s.quad.v;
    double m_total = p.total_mass();
    Vec3 f_des = m_total * (ref.a_payload + Vec3{0.0, 0.0, p.g}) +
                 g.k_pos * e_x + g.k_vel * e_v;

    Vec3 b3 = s.quad.R.col(2);
    double f = std::clamp(f_des.dot(b3), 0.0, p.f_max);

    // Desired attitude: body z along the desired force, yaw to zero.
    Vec3 b3_d = f_des.norm() > 1e-9 ? f_des.normalized() : Vec3{0.0, 0.0, 1.0};
    Vec3 b1_ref{1.0, 0.0, 0.0};
    Vec3 b2_d = b3_d.cross(b1_ref);
    if (b2_d.norm() < 1e-6) b2_d = b3_d.cross(Vec3{0.0, 1.0, 0.0});
    b2_d = b2_d.normalized();
    Vec3 b1_d = b2_d.cross(b3_d);
    Mat3 R_d;
    for (int i = 0; i < 3; ++i) {
        R_d(i, 0) = b1_d(i);
        R_d(i, 1) = b2_d(i);
        R_d(i, 2) = b3_d(i);
    }

    Mat3 err = R_d.transposed() * s.quad.R - s.quad.R.transposed() * R_d;
    Vec3 e_rot{0.5 * err(2, 1), 0.5 * err(0, 2), 0.5 * err(1, 0)};
    Vec3 e_omega = s.quad.omega;  // desired body rate is zero

    Vec3 moment = -g.k_rot * e_rot - g.k_omega * e_omega +
                  s.quad.omega.cross(p.inertia * s.quad.omega);
    moment = moment.cwise_clamped(-g.moment_max, g.moment_max);
    return {f, moment};
}

}  // namespace cablequad

#endif  // CABLEQUAD_BASELINE_HPP_

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

#ifndef CABLEQUAD_RANDOMIZATION_HPP_
#define CABLEQUAD_RANDOMIZATION_HPP_

#include <algorithm>

#include "cablequad/math.hpp"
#include "cablequad/params.hpp"

namespace cablequad {

// Per-episode randomization ranges. Payload mass, cable length, delay and
// impulse bounds are fixed protocol values; the remaining widths are
// platform-perturbation choices.
struct RandomizationRanges {
    double mass_scale{0.10};        // +-fraction of m_quad
    double inertia_scale{0.10};     // +-fraction per diagonal axis
    double com_offset_max{0.01};    // m, uniform box half-width
    double inertia_tilt_max{5.0 * kPi / 180.0};  // rad, inertia frame tilt
    double gear_scale{0.05};        // +-fraction per rotor
    double m_payload_min{0.0}, m_payload_max{0.2};   // kg
    double cable_length_min{0.0}, cable_length_max{1.0};  // m
    double rotor_tau_scale{0.30};   // +-fraction
    double delay_min{0.010}, delay_max{0.030};  // s

    static RandomizationRanges off() {
        RandomizationRanges r;
        r.mass_scale = r.inertia_scale = 0.0;
        r.com_offset_max = r.inertia_tilt_max = 0.0;
        r.gear_scale = r.rotor_tau_scale = 0.0;
        return r;
    }
};

// Draw a perturbed parameter set around `nominal`. Payload mass and cable
// length are drawn from their own ranges, replacing the nominal values.
inline SystemParams randomize_params(const SystemParams& nominal,
                                     const RandomizationRanges& rr,
                                     RngStream& rng) {
    SystemParams p = nominal;
    p.m_quad = nominal.m_quad *
               (1.0 + rng.uniform(-rr.mass_scale, rr.mass_scale));

    Vec3 jd{nominal.inertia(0, 0), nominal.inertia(1, 1), nominal.inertia(2, 2)};
    for (int i = 0; i < 3; ++i)
        jd(i) *= 1.0 + rng.uniform(-rr.inertia_scale, rr.inertia_scale);
    Mat3 J = Mat3::diag(jd);
    if (rr.inertia_tilt_max > 0.0) {
        Vec3 axis = rng.unit_sphere();
        double angle = rng.uniform(0.0, rr.inertia_tilt_max);
        Rot3 Rp = so3_exp(axis * angle);
        J = Rp * J * Rp.transposed();
    }
    p.inertia = J;

    p.com_offset = rng.uniform_box(-rr.com_offset_max, rr.com_offset_max);
    for (int i = 0; i < 4; ++i)
        p.gear[i] = 1.0 + rng.uniform(-rr.gear_scale, rr.gear_scale);

    p.m_payload = rng.uniform(rr.m_payload_min, rr.m_payload_max);
    p.cable_length = rng.uniform(rr.cable_length_min, rr.cable_length_max);

    p.rotor_tau_up = nominal.rotor_tau_up *
                     (1.0 + rng.uniform(-rr.rotor_tau_scale, rr.rotor_tau_scale));
    p.rotor_tau_down =
        nominal.rotor_tau_down *
        (1.0 + rng.uniform(-rr.rotor_tau_scale, rr.rotor_tau_scale));
    p.delay = rng.uniform(rr.delay_min, rr.delay_max);

    p.validate();
    return p;
}

// Initial-state offsets: the position offset shifts quadrotor and payload
// rigidly; velocity offsets apply to both bodies as well.
struct InitialPerturbation {
    Vec3 position{};      // m, both bodies
    Vec3 velocity{};      // m/s, both bodies
    Vec3 attitude{};      // rad, ZYX Euler offsets
    Vec3 body_rate{};     // rad/s

    static InitialPerturbation none() { return {}; }
};

inline InitialPerturbation sample_initial_perturbation(RngStream& rng) {
    InitialPerturbation d;
    d.position = rng.uniform_box(-0.1, 0.1);
    d.velocity = rng.uniform_box(-0.1, 0.1);
    d.attitude = rng.uniform_box(-kPi / 12.0, kPi / 12.0);
    d.body_rate = rng.uniform_box(-kPi / 12.0, kPi / 12.0);
    return d;
}

// Impulse wrench sampled per episode; starts somewhere in [t_lo, t_hi].
inline Disturbance sample_impulse_disturbance(RngStream& rng,
                                              double t_lo = 8.0,
                                              double t_hi = 17.0) {
    Disturbance d;
    d.force = rng.uniform_box(-0.5, 0.5);
    d.moment = rng.uniform_box(-0.005, 0.005);
    d.duration = rng.uniform(0.0, 0.5);
    d.t_start = rng.uniform(t_lo, t_hi);
    return d;
}

}  // namespace cablequad

#endif  // CABLEQUAD_RANDOMIZATION_HPP_

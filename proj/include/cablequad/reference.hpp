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

#ifndef CABLEQUAD_REFERENCE_HPP_
#define CABLEQUAD_REFERENCE_HPP_

#include <array>
#include <cmath>
#include <stdexcept>

#include "cablequad/math.hpp"

namespace cablequad {

// Windowed-sinusoid payload reference family. Each axis follows
// w(t) * A (1 - cos(2 pi f t + phi)) with a smoothstep window that holds
// hover at both ends of the episode. Amplitudes are uniformly rescaled when
// the nominal peak speed would exceed v_max.
struct ReferenceSpec {
    Vec3 amp{};                 // m
    Vec3 freq_hz{};             // Hz, sign kept as sampled
    Vec3 phase{kPi / 2.0, kPi / 2.0, kPi / 2.0};  // rad, pi/2 or 3pi/2
    double t_start{5.0};        // s, window opens
    double t_end{20.0};         // s, window closes
    double ramp{3.0};           // s, smoothstep transition
    double t_final{25.0};       // s, episode horizon
    double v_max{4.0};          // m/s, nominal peak-speed cap
    Vec3 origin{};              // m, world offset of the hover point

    double nominal_peak_speed() const {
        double peak = 0.0;
        for (int i = 0; i < 3; ++i)
            peak = std::max(peak,
                            std::abs(amp(i)) * std::abs(2.0 * kPi * freq_hz(i)));
        return peak;
    }
};

// Reference state at one instant: payload flat outputs plus the quadrotor
// pose implied by the tension direction.
struct ReferenceSample {
    Vec3 x_payload{}, v_payload{}, a_payload{};
    Vec3 x_quad{}, v_quad{}, a_quad{};
    Vec3 q_cable{0.0, 0.0, -1.0};  // unit, quadrotor -> payload
    double tension{0.0};           // N, magnitude of the nominal cable force
};

struct PayloadReference {
    Vec3 pos{}, vel{}, acc{}, jerk{}, snap{};
};

namespace detail {

// Window value and derivatives up to 4th order (piecewise cubic).
inline std::array<double, 5> window_derivs(double t, const ReferenceSpec& s) {
    std::array<double, 5> w{};
    double d = s.ramp;
    if (t < s.t_start || t > s.t_end) {
        return w;
    }
    if (t <= s.t_start + d) {
        double a = (t - s.t_start) / d;
        w[0] = 3.0 * a * a - 2.0 * a * a * a;
        w[1] = (6.0 * a - 6.0 * a * a) / d;
        w[2] = (6.0 - 12.0 * a) / (d * d);
        w[3] = -12.0 / (d * d * d);
        return w;
    }
    if (t < s.t_end - d) {
        w[0] = 1.0;
        return w;
    }
    double b = (s.t_end - t) / d;  // db/dt = -1/d
    w[0] = 3.0 * b * b - 2.0 * b * b * b;
    w[1] = -(6.0 * b - 6.0 * b * b) / d;
    w[2] = (6.0 - 12.0 * b) / (d * d);
    w[3] = 12.0 / (d * d * d);
    return w;
}

}  // namespace detail

inline std::pair<double, double> smooth_window(double t,
                                               const ReferenceSpec& s) {
    auto w = detail::window_derivs(t, s);
    return {w[0], w[1]};
}

inline PayloadReference payload_reference(double t, const ReferenceSpec& s) {
    auto w = detail::window_derivs(t, s);
    PayloadReference r;
    for (int i = 0; i < 3; ++i) {
        double omega = 2.0 * kPi * s.freq_hz(i);
        double theta = omega * t + s.phase(i);
        double c = std::cos(theta), sn = std::sin(theta);
        double a = s.amp(i);
        // Oscillation and its first four derivatives.
        double g0 = a * (1.0 - c);
        double g1 = a * omega * sn;
        double g2 = a * omega * omega * c;
        double g3 = -a * omega * omega * omega * sn;
        double g4 = -a * omega * omega * omega * omega * c;
        r.pos(i) = w[0] * g0;
        r.vel(i) = w[1] * g0 + w[0] * g1;
        r.acc(i) = w[2] * g0 + 2.0 * w[1] * g1 + w[0] * g2;
        r.jerk(i) = w[3] * g0 + 3.0 * w[2] * g1 + 3.0 * w[1] * g2 + w[0] * g3;
        r.snap(i) = w[4] * g0 + 4.0 * w[3] * g1 + 6.0 * w[2] * g2 +
                    4.0 * w[1] * g3 + w[0] * g4;
    }
    r.pos += s.origin;
    return r;
}

// Flatness map: the nominal cable tension -m_P (a + g e3) fixes the cable
// direction; the quadrotor reference sits one cable length up that
// direction. The payload mass cancels in the direction, so the same map
// serves the massless limit. Throws std::domain_error near free fall.
inline ReferenceSample quadrotor_reference(double t, const ReferenceSpec& s,
                                           double m_payload,
                                           double cable_length,
                                           double g = 9.81) {
    PayloadReference pr = payload_reference(t, s);
    Vec3 u = -(pr.acc + Vec3{0.0, 0.0, g});
    Vec3 du = -pr.jerk;
    Vec3 ddu = -pr.snap;
    double n = u.norm();
    if (n <= 0.1)
        throw std::domain_error("quadrotor_reference: tension direction singular");

    Vec3 q = u / n;
    double n1 = q.dot(du);
    Vec3 qd = (du - n1 * q) / n;
    double n2 = (du.dot(du) + u.dot(ddu) - n1 * n1) / n;
    Vec3 qdd = ddu / n - du * (2.0 * n1 / (n * n)) - u * (n2 / (n * n)) +
               u * (2.0 * n1 * n1 / (n * n * n));

    ReferenceSample out;
    out.x_payload = pr.pos;
    out.v_payload = pr.vel;
    out.a_payload = pr.acc;
    out.q_cable = q;
    out.tension = m_payload * n;
    out.x_quad = pr.pos - cable_length * q;
    out.v_quad = pr.vel - cable_length * qd;
    out.a_quad = pr.acc - cable_length * qdd;
    return out;
}

// Draw one spec from the randomized family. The caller supplies the horizon;
// hover segments and ramp lengths are fixed. Resamples on (practically
// unreachable) free-fall singularities.
inline ReferenceSpec sample_reference(RngStream& rng, double t_final = 25.0) {
    if (!(t_final > 16.0))
        throw std::invalid_argument("sample_reference: horizon too short");
    for (int attempt = 0; attempt < 100; ++attempt) {
        ReferenceSpec s;
        s.t_final = t_final;
        s.t_start = 5.0;
        s.t_end = t_final - 5.0;
        s.ramp = 3.0;
        s.amp = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                 rng.uniform(-1.0, 1.0)};
        s.freq_hz = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                     rng.uniform(-0.1, 0.1)};
        for (int i = 0; i < 3; ++i)
            s.phase(i) = rng.uniform_index(2) == 0 ? kPi / 2.0 : 3.0 * kPi / 2.0;

        double peak = s.nominal_peak_speed();
        if (peak > s.v_max) s.amp *= s.v_max / peak;

        bool singular = false;
        for (double t = 0.0; t <= t_final; t += 0.01) {
            Vec3 a = payload_reference(t, s).acc;
            if ((a + Vec3{0.0, 0.0, 9.81}).norm() <= 0.1) {
                singular = true;
                break;
            }
        }
        if (!singular) return s;
    }
    throw std::runtime_error("sample_reference: no feasible spec found");
}

// Pure hover at `origin` for the whole horizon.
inline ReferenceSpec hover_reference(const Vec3& origin, double t_final = 25.0) {
    ReferenceSpec s;
    s.t_final = t_final;
    s.t_start = 5.0;
    s.t_end = std::max(t_final - 5.0, 5.0);
    s.origin = origin;
    return s;
}

}  // namespace cablequad

#endif  // CABLEQUAD_REFERENCE_HPP_

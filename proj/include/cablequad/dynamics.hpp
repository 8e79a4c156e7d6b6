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

#ifndef CABLEQUAD_DYNAMICS_HPP_
#define CABLEQUAD_DYNAMICS_HPP_

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cablequad/math.hpp"
#include "cablequad/params.hpp"
#include "cablequad/state.hpp"

namespace cablequad {

// Ideal: rigid massless cable with explicit taut/slack modes and an impact
// map at re-tautening. Compliant: unilateral spring-damper link, no guard.
enum class CableModel { Ideal, Compliant };

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rotor order: 0 front-left, 1 rear-left, 2 rear-right, 3 front-right on a
// symmetric X frame; spin pattern (+,-,+,-) fixes the yaw reaction sign.
inline constexpr std::array<double, 4> kRotorSignX{+1.0, -1.0, -1.0, +1.0};
inline constexpr std::array<double, 4> kRotorSignY{+1.0, +1.0, -1.0, -1.0};
inline constexpr std::array<double, 4> kRotorSpin{+1.0, -1.0, +1.0, -1.0};

struct Wrench {
    double f{0.0};  // N, along body z
    Vec3 moment{};  // N m, body frame
};

// Forward allocation: per-rotor thrusts to total thrust and body moment,
// including the moment induced by a CoM offset from the geometric center.
inline Wrench wrench_from_rotors(const std::array<double, 4>& thrusts,
                                 const SystemParams& p) {
    double d = p.arm_length / std::sqrt(2.0);
    Wrench w;
    for (int i = 0; i < 4; ++i) {
        w.f += thrusts[i];
        w.moment.x += kRotorSignY[i] * d * thrusts[i];
        w.moment.y += -kRotorSignX[i] * d * thrusts[i];
        w.moment.z += kRotorSpin[i] * p.torque_coeff * thrusts[i];
    }
    // Thrust acts at the geometric center, offset -com_offset from the CoM.
    w.moment += (-p.com_offset).cross(Vec3{0.0, 0.0, w.f});
    return w;
}

struct SystemDerivative {
    Vec3 dx_quad{}, dv_quad{};
    Vec3 dx_payload{}, dv_payload{};
    Vec3 dq{}, domega_cable{};
    Vec3 body_rate{};   // R' = R hat(body_rate)
    Vec3 domega_body{};
};

namespace detail {

inline Vec3 rotational_accel(const Vec3& omega, const Vec3& moment,
                             const Vec3& w_moment, const SystemParams& p) {
    Vec3 rhs = moment + w_moment - omega.cross(p.inertia * omega);
    return p.inertia.inversed() * rhs;
}

}  // namespace detail

// Cable tension magnitude implied by the ideal taut model, i.e. the force the
// massless cable exerts on the payload toward the quadrotor. Negative values
// mean the rigid model would have to push, so the real cable goes slack.
inline double ideal_taut_tension(const SystemState& s, double f,
                                 const Vec3& w_force,
                                 const SystemParams& p) {
    Vec3 thrust_world = s.quad.R * Vec3{0.0, 0.0, f};
    const Vec3& q = s.cable_dir;
    Vec3 qdot = s.cable_omega.cross(q);
    double coupled = q.dot(thrust_world) - p.m_quad * p.cable_length * qdot.dot(qdot);
    return -p.m_payload * (coupled + w_force.dot(q)) / p.total_mass();
}

// Spring-damper tension vector applied to the quadrotor (negated on the
// payload). Unilateral: zero whenever the cable is shorter than rest length
// or the spring-damper law would push.
inline Vec3 compliant_cable_tension(const SystemState& s,
                                    const SystemParams& p) {
    Vec3 sep = s.payload.x - s.quad.x;
    double d = sep.norm();
    if (d < 1e-12) return Vec3::zero();
    Vec3 u = sep / d;
    if (d < p.cable_length) return Vec3::zero();
    double d_rate = u.dot(s.payload.v - s.quad.v);
    double T = p.cable_stiffness * (d - p.cable_length) + p.cable_damping * d_rate;
    if (T < 0.0) T = 0.0;
    return T * u;
}

// Continuous-time derivative of the active mode (ideal hybrid model).
inline SystemDerivative hybrid_derivative(const SystemState& s, double f,
                                          const Vec3& moment,
                                          const Vec3& w_force,
                                          const Vec3& w_moment,
                                          const SystemParams& p) {
    if (!s.all_finite() || !std::isfinite(f) || !moment.all_finite())
        throw std::invalid_argument("hybrid_derivative: non-finite input");
    if (f < 0.0) throw std::invalid_argument("hybrid_derivative: negative thrust");

    SystemDerivative d;
    d.body_rate = s.quad.omega;
    d.domega_body = detail::rotational_accel(s.quad.omega, moment, w_moment, p);

    Vec3 thrust_world = s.quad.R * Vec3{0.0, 0.0, f};
    Vec3 gravity{0.0, 0.0, -p.g};

    if (s.mode == CableMode::Taut && p.has_payload()) {
        const Vec3& q = s.cable_dir;
        const Vec3& w = s.cable_omega;
        Vec3 qdot = w.cross(q);
        double coupled = q.dot(thrust_world) -
                         p.m_quad * p.cable_length * qdot.dot(qdot);
        d.dx_payload = s.payload.v;
        d.dv_payload = (coupled * q + w_force) / p.total_mass() + gravity;
        d.dq = qdot;
        d.domega_cable = -q.cross(thrust_world) / (p.m_quad * p.cable_length);
        Vec3 qddot = d.domega_cable.cross(q) + w.cross(qdot);
        d.dx_quad = s.payload.v - p.cable_length * qdot;
        d.dv_quad = d.dv_payload - p.cable_length * qddot;
    } else if (p.m_payload > 0.0 && p.cable_length == 0.0) {
        // Zero-length cable: payload rides rigidly on the quadrotor.
        d.dx_quad = s.quad.v;
        d.dv_quad = (thrust_world + w_force) / p.total_mass() + gravity;
        d.dx_payload = d.dx_quad;
        d.dv_payload = d.dv_quad;
    } else {
        d.dx_quad = s.quad.v;
        d.dv_quad = (thrust_world + w_force) / p.m_quad + gravity;
        if (p.has_payload() && s.mode == CableMode::Slack) {
            d.dx_payload = s.payload.v;
            d.dv_payload = gravity;
        } else {
            d.dx_payload = d.dx_quad;
            d.dv_payload = d.dv_quad;
        }
    }
    return d;
}

// Derivative of the compliant (spring-damper) model; both bodies are free
// with the unilateral tension coupling them.
inline SystemDerivative compliant_derivative(const SystemState& s, double f,
                                             const Vec3& moment,
                                             const Vec3& w_force,
                                             const Vec3& w_moment,
                                             const SystemParams& p) {
    SystemDerivative d;
    d.body_rate = s.quad.omega;
    d.domega_body = detail::rotational_accel(s.quad.omega, moment, w_moment, p);

    Vec3 thrust_world = s.quad.R * Vec3{0.0, 0.0, f};
    Vec3 gravity{0.0, 0.0, -p.g};

    if (!p.has_payload()) {
        d.dx_quad = s.quad.v;
        if (p.m_payload > 0.0 && p.cable_length == 0.0)
            d.dv_quad = (thrust_world + w_force) / p.total_mass() + gravity;
        else
            d.dv_quad = (thrust_world + w_force) / p.m_quad + gravity;
        d.dx_payload = d.dx_quad;
        d.dv_payload = d.dv_quad;
        return d;
    }

    Vec3 tension = compliant_cable_tension(s, p);
    d.dx_quad = s.quad.v;
    d.dv_quad = (thrust_world + w_force + tension) / p.m_quad + gravity;
    d.dx_payload = s.payload.v;
    d.dv_payload = gravity - tension / p.m_payload;
    return d;
}

// Hybrid guard for the ideal model. Slack->taut fires when the bodies reach
// cable length while separating; the impact removes the radial component of
// the relative velocity with a momentum-conserving impulse (restitution 0).
// Taut->slack fires when the supplied taut tension is non-positive.
inline std::pair<CableMode, SystemState> guard_and_impact(
    const SystemState& s, const SystemParams& p, double taut_tension) {
    SystemState out = s;
    if (!p.has_payload()) {
        out.mode = p.m_payload > 0.0 ? CableMode::Taut : CableMode::NoPayload;
        return {out.mode, out};
    }

    if (s.mode == CableMode::Slack) {
        Vec3 sep = s.payload.x - s.quad.x;
        double d = sep.norm();
        if (d >= p.cable_length && d > 1e-12) {
            Vec3 u = sep / d;
            double v_rad = (s.payload.v - s.quad.v).dot(u);
            if (v_rad >= 0.0) {
                double mu = p.m_quad * p.m_payload / p.total_mass();
                double impulse = mu * v_rad;
                out.quad.v += (impulse / p.m_quad) * u;
                out.payload.v -= (impulse / p.m_payload) * u;
                out.payload.x = s.quad.x + p.cable_length * u;
                out.cable_dir = u;
                out.cable_omega =
                    u.cross((out.payload.v - out.quad.v) / p.cable_length);
                out.mode = CableMode::Taut;
            }
        }
    } else if (s.mode == CableMode::Taut) {
        if (taut_tension <= 0.0) out.mode = CableMode::Slack;
    }
    return {out.mode, out};
}

// Randomized near-ground aerodynamic force on the quadrotor. Zero at or
// above the activation height; magnitude grows linearly as altitude drops,
// direction uniform on the upper hemisphere.
inline Vec3 ground_effect_force(double z, RngStream& rng,
                                double activation_height = 0.5,
                                double f_peak = 0.3) {
    if (z >= activation_height) return Vec3::zero();
    double scale = std::clamp(1.0 - z / activation_height, 0.0, 1.0);
    return (f_peak * scale) * rng.upper_hemisphere();
}

namespace detail {

using State18 = std::array<double, 18>;

inline void pack3(State18& y, int at, const Vec3& v) {
    y[at] = v.x; y[at + 1] = v.y; y[at + 2] = v.z;
}
inline Vec3 unpack3(const State18& y, int at) {
    return {y[at], y[at + 1], y[at + 2]};
}

// One classical RK4 step of y' = f(y). The incremental body rotation rides
// in the state vector as a rotation vector and is applied exponentially by
// the caller, which keeps R on the manifold.
template <typename Deriv>
State18 rk4_step(const State18& y0, double dt, Deriv&& deriv) {
    State18 k1 = deriv(y0);
    State18 y1, y2, y3;
    for (int i = 0; i < 18; ++i) y1[i] = y0[i] + 0.5 * dt * k1[i];
    State18 k2 = deriv(y1);
    for (int i = 0; i < 18; ++i) y2[i] = y0[i] + 0.5 * dt * k2[i];
    State18 k3 = deriv(y2);
    for (int i = 0; i < 18; ++i) y3[i] = y0[i] + dt * k3[i];
    State18 k4 = deriv(y3);
    State18 out;
    for (int i = 0; i < 18; ++i)
        out[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// Refresh the kinematic cable fields from positions/velocities.
inline void refresh_cable_geometry(SystemState& s) {
    Vec3 sep = s.payload.x - s.quad.x;
    double d = sep.norm();
    if (d > 1e-9) {
        s.cable_dir = sep / d;
        Vec3 v_rel = s.payload.v - s.quad.v;
        Vec3 qdot = (v_rel - v_rel.dot(s.cable_dir) * s.cable_dir) / d;
        s.cable_omega = s.cable_dir.cross(qdot);
    }
}

}  // namespace detail

// Advance the coupled system by dt under constant rotor thrusts. The guard
// runs after the step in ideal mode; the compliant model only relabels the
// mode from the tension sign. Throws DivergenceError past 1e6 magnitude.
inline SystemState integrate_step(const SystemState& state,
                                  const std::array<double, 4>& rotor_thrusts,
                                  const Disturbance& dist,
                                  const SystemParams& p, double t,
                                  double dt = 0.002,
                                  CableModel model = CableModel::Ideal) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be positive");
    // Loose upper bound: per-rotor commands are clipped to f_max/4 upstream,
    // but gear randomization may scale the delivered thrust slightly above it.
    for (double th : rotor_thrusts)
        if (!(th >= 0.0) || th > 2.0 * p.rotor_thrust_max() || !std::isfinite(th))
            throw std::invalid_argument("integrate_step: rotor thrust out of range");

    Wrench w = wrench_from_rotors(rotor_thrusts, p);
    Vec3 w_force = dist.active(t) ? dist.force : Vec3::zero();
    Vec3 w_moment = dist.active(t) ? dist.moment : Vec3::zero();

    const Rot3 R0 = state.quad.R;
    SystemState next = state;

    bool taut_ideal = model == CableModel::Ideal &&
                      state.mode == CableMode::Taut && p.has_payload();

    detail::State18 y{};
    if (taut_ideal) {
        detail::pack3(y, 0, state.payload.x);
        detail::pack3(y, 3, state.payload.v);
        detail::pack3(y, 6, state.cable_dir);
        detail::pack3(y, 9, state.cable_omega);
        // y[12..14]: incremental rotation vector, y[15..17]: body rates
        detail::pack3(y, 12, Vec3::zero());
        detail::pack3(y, 15, state.quad.omega);
    } else {
        detail::pack3(y, 0, state.quad.x);
        detail::pack3(y, 3, state.quad.v);
        detail::pack3(y, 6, state.payload.x);
        detail::pack3(y, 9, state.payload.v);
        detail::pack3(y, 12, Vec3::zero());
        detail::pack3(y, 15, state.quad.omega);
    }

    auto deriv = [&](const detail::State18& yy) {
        SystemState st = state;
        st.quad.R = R0 * so3_exp(detail::unpack3(yy, 12));
        st.quad.omega = detail::unpack3(yy, 15);
        if (taut_ideal) {
            st.payload.x = detail::unpack3(yy, 0);
            st.payload.v = detail::unpack3(yy, 3);
            st.cable_dir = detail::unpack3(yy, 6);
            st.cable_omega = detail::unpack3(yy, 9);
            st.quad.x = st.payload.x - p.cable_length * st.cable_dir;
            st.quad.v = st.payload.v -
                        p.cable_length * st.cable_omega.cross(st.cable_dir);
        } else {
            st.quad.x = detail::unpack3(yy, 0);
            st.quad.v = detail::unpack3(yy, 3);
            st.payload.x = detail::unpack3(yy, 6);
            st.payload.v = detail::unpack3(yy, 9);
        }
        SystemDerivative d =
            model == CableModel::Compliant
                ? compliant_derivative(st, w.f, w.moment, w_force, w_moment, p)
                : hybrid_derivative(st, w.f, w.moment, w_force, w_moment, p);
        detail::State18 dy{};
        if (taut_ideal) {
            detail::pack3(dy, 0, d.dx_payload);
            detail::pack3(dy, 3, d.dv_payload);
            detail::pack3(dy, 6, d.dq);
            detail::pack3(dy, 9, d.domega_cable);
        } else {
            detail::pack3(dy, 0, d.dx_quad);
            detail::pack3(dy, 3, d.dv_quad);
            detail::pack3(dy, 6, d.dx_payload);
            detail::pack3(dy, 9, d.dv_payload);
        }
        detail::pack3(dy, 12, d.body_rate);
        detail::pack3(dy, 15, d.domega_body);
        return dy;
    };

    detail::State18 yn = detail::rk4_step(y, dt, deriv);

    next.quad.R = reorthonormalized(R0 * so3_exp(detail::unpack3(yn, 12)));
    next.quad.omega = detail::unpack3(yn, 15);

    if (taut_ideal) {
        next.payload.x = detail::unpack3(yn, 0);
        next.payload.v = detail::unpack3(yn, 3);
        Vec3 q = detail::unpack3(yn, 6).normalized();
        Vec3 omega_c = detail::unpack3(yn, 9);
        omega_c -= omega_c.dot(q) * q;
        next.cable_dir = q;
        next.cable_omega = omega_c;
        next.quad.x = next.payload.x - p.cable_length * q;
        next.quad.v = next.payload.v - p.cable_length * omega_c.cross(q);
        double tension = ideal_taut_tension(next, w.f, w_force, p);
        next = guard_and_impact(next, p, tension).second;
    } else {
        next.quad.x = detail::unpack3(yn, 0);
        next.quad.v = detail::unpack3(yn, 3);
        if (p.has_payload()) {
            next.payload.x = detail::unpack3(yn, 6);
            next.payload.v = detail::unpack3(yn, 9);
            detail::refresh_cable_geometry(next);
            if (model == CableModel::Compliant) {
                next.mode = compliant_cable_tension(next, p).norm() > 0.0
                                ? CableMode::Taut
                                : CableMode::Slack;
            } else {
                next = guard_and_impact(next, p, 1.0).second;
            }
        } else {
            next.payload.x = next.quad.x;
            next.payload.v = next.quad.v;
            next.mode = p.m_payload > 0.0 ? CableMode::Taut : CableMode::NoPayload;
        }
    }

    if (!next.all_finite() || next.max_abs() > 1e6)
        throw DivergenceError("integrate_step: state diverged");
    return next;
}

inline double kinetic_energy(const SystemState& s, const SystemParams& p) {
    double ke = 0.5 * p.m_quad * s.quad.v.norm_squared() +
                0.5 * p.m_payload * s.payload.v.norm_squared();
    ke += 0.5 * s.quad.omega.dot(p.inertia * s.quad.omega);
    return ke;
}

inline double mechanical_energy(const SystemState& s, const SystemParams& p) {
    return kinetic_energy(s, p) +
           p.g * (p.m_quad * s.quad.x.z + p.m_payload * s.payload.x.z);
}

}  // namespace cablequad

#endif  // CABLEQUAD_DYNAMICS_HPP_

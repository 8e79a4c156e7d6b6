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

#ifndef CABLEQUAD_STATE_HPP_
#define CABLEQUAD_STATE_HPP_

#include <string>

#include "cablequad/math.hpp"
#include "cablequad/params.hpp"

namespace cablequad {

struct QuadrotorState {
    Vec3 x{};          // m, inertial
    Vec3 v{};          // m/s, inertial
    Rot3 R{Mat3::identity()};  // body -> inertial
    Vec3 omega{};      // rad/s, body frame

    bool all_finite() const {
        return x.all_finite() && v.all_finite() && R.all_finite() &&
               omega.all_finite();
    }
};

struct PayloadState {
    Vec3 x{};  // m
    Vec3 v{};  // m/s

    bool all_finite() const { return x.all_finite() && v.all_finite(); }
};

enum class CableMode { Taut, Slack, NoPayload };

inline const char* to_string(CableMode m) {
    switch (m) {
        case CableMode::Taut: return "taut";
        case CableMode::Slack: return "slack";
        case CableMode::NoPayload: return "nopayload";
    }
    return "unknown";
}

// Full continuous state of the coupled system. `cable_dir` points from the
// quadrotor to the payload and is meaningful whenever the bodies are apart;
// `cable_omega` is the cable angular velocity (perpendicular to cable_dir).
struct SystemState {
    QuadrotorState quad{};
    PayloadState payload{};
    CableMode mode{CableMode::NoPayload};
    Vec3 cable_dir{0.0, 0.0, -1.0};
    Vec3 cable_omega{};

    bool all_finite() const {
        return quad.all_finite() && payload.all_finite() &&
               cable_dir.all_finite() && cable_omega.all_finite();
    }

    double max_abs() const {
        double m = 0.0;
        auto upd = [&m](const Vec3& v) {
            m = std::max({m, std::abs(v.x), std::abs(v.y), std::abs(v.z)});
        };
        upd(quad.x); upd(quad.v); upd(quad.omega);
        upd(payload.x); upd(payload.v);
        return m;
    }
};

// Taut vertical hang: payload directly below the quadrotor, everything at
// rest. For a payload-less platform this is plain hover.
inline SystemState make_hover_state(const Vec3& payload_pos,
                                    const SystemParams& p) {
    SystemState s;
    if (p.has_payload()) {
        s.mode = CableMode::Taut;
        s.cable_dir = {0.0, 0.0, -1.0};
        s.payload.x = payload_pos;
        s.quad.x = payload_pos - p.cable_length * s.cable_dir;
    } else {
        s.mode = p.m_payload > 0.0 ? CableMode::Taut : CableMode::NoPayload;
        s.quad.x = payload_pos;
        s.payload.x = s.quad.x;
    }
    return s;
}

}  // namespace cablequad

#endif  // CABLEQUAD_STATE_HPP_

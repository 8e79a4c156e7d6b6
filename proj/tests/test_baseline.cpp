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

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "cablequad/actuation.hpp"
#include "cablequad/baseline.hpp"

using namespace cablequad;

namespace {

SystemParams quad_only() {
    SystemParams p;
    p.m_payload = 0.0;
    p.cable_length = 0.0;
    return p;
}

ReferenceSample hover_ref_at(const Vec3& pos) {
    ReferenceSpec spec = hover_reference(pos);
    return quadrotor_reference(0.0, spec, 0.0, 0.0);
}

}  // namespace

TEST_CASE("baseline at hover commands weight and zero moment") {
    SystemParams p = quad_only();
    SystemState s = make_hover_state({0.0, 0.0, 2.0}, p);
    ReferenceSample ref = hover_ref_at({0.0, 0.0, 2.0});
    auto [f, m] = geometric_baseline_control(s, ref, p, BaselineGains{});
    CHECK(f == Catch::Approx(p.m_quad * p.g).margin(1e-12));
    CHECK(m.norm() < 1e-12);
}

TEST_CASE("baseline moment opposes a thrust-direction error") {
    SystemParams p = quad_only();
    SystemState s = make_hover_state({0.0, 0.0, 2.0}, p);
    // tilt the body 10 degrees about +x: body z leans toward -y... the
    // moment must roll the body back, i.e. negative-x moment for a
    // positive-x tilt
    double tilt = 10.0 * kPi / 180.0;
    s.quad.R = so3_exp({tilt, 0.0, 0.0});
    ReferenceSample ref = hover_ref_at({0.0, 0.0, 2.0});
    auto [f, m] = geometric_baseline_control(s, ref, p, BaselineGains{});
    CHECK(m.x < 0.0);
    CHECK(std::abs(m.y) < 1e-9);
}

TEST_CASE("baseline recovers a hover offset within three seconds") {
    SystemParams p = quad_only();
    BaselineGains g;
    SystemState s = make_hover_state({0.1, 0.0, 2.0}, p);  // 0.1 m offset
    ReferenceSample ref = hover_ref_at({0.0, 0.0, 2.0});
    double dt = 0.002;
    for (int k = 0; k < 1500; ++k) {  // 3 s
        auto [f, m] = geometric_baseline_control(s, ref, p, g);
        s = integrate_step(s, mix_to_rotors(f, m, p), Disturbance::none(), p,
                           k * dt, dt, CableModel::Ideal);
    }
    CHECK((s.quad.x - ref.x_quad).norm() < 0.01);
}

TEST_CASE("baseline thrust saturates at the platform limits") {
    SystemParams p = quad_only();
    SystemState s = make_hover_state({0.0, 0.0, 2.0}, p);
    ReferenceSample ref = hover_ref_at({0.0, 0.0, 50.0});  // huge error above
    auto [f, m] = geometric_baseline_control(s, ref, p, BaselineGains{});
    CHECK(f <= p.f_max);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(m(i)) <= 0.1 + 1e-12);
}

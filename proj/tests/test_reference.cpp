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

#include "cablequad/reference.hpp"

using namespace cablequad;

TEST_CASE("sampled specs respect the family ranges") {
    RngStream rng(17);
    for (int i = 0; i < 500; ++i) {
        ReferenceSpec s = sample_reference(rng, 25.0);
        CHECK(std::abs(s.amp.x) <= 2.0);
        CHECK(std::abs(s.amp.y) <= 2.0);
        CHECK(std::abs(s.amp.z) <= 1.0);
        CHECK(std::abs(s.freq_hz.x) <= 0.2);
        CHECK(std::abs(s.freq_hz.y) <= 0.2);
        CHECK(std::abs(s.freq_hz.z) <= 0.1);
        for (int k = 0; k < 3; ++k) {
            bool ok = s.phase(k) == kPi / 2.0 || s.phase(k) == 3.0 * kPi / 2.0;
            CHECK(ok);
        }
        CHECK(s.nominal_peak_speed() <= s.v_max + 1e-12);
        CHECK(s.t_start == 5.0);
        CHECK(s.t_end == 20.0);
    }
}

TEST_CASE("same seed reproduces the same spec") {
    RngStream a(99), b(99);
    ReferenceSpec sa = sample_reference(a, 25.0);
    ReferenceSpec sb = sample_reference(b, 25.0);
    CHECK(sa.amp.x == sb.amp.x);
    CHECK(sa.freq_hz.z == sb.freq_hz.z);
    CHECK(sa.phase.y == sb.phase.y);
}

TEST_CASE("horizon precondition") {
    RngStream rng(1);
    CHECK_THROWS_AS(sample_reference(rng, 15.0), std::invalid_argument);
}

TEST_CASE("smooth window cases") {
    ReferenceSpec s;
    s.t_start = 5.0;
    s.t_end = 20.0;
    s.ramp = 3.0;

    CHECK(smooth_window(2.0, s).first == 0.0);
    CHECK(smooth_window(21.0, s).first == 0.0);

    auto [w_mid, wd_mid] = smooth_window(5.0 + 1.5, s);  // alpha = 0.5
    CHECK(w_mid == Catch::Approx(0.5));

    auto [w_plateau, wd_plateau] = smooth_window(12.0, s);
    CHECK(w_plateau == 1.0);
    CHECK(wd_plateau == 0.0);

    // continuity at every boundary
    for (double t0 : {5.0, 8.0, 17.0, 20.0}) {
        auto [wl, wdl] = smooth_window(t0 - 1e-9, s);
        auto [wr, wdr] = smooth_window(t0 + 1e-9, s);
        CHECK(std::abs(wl - wr) < 1e-8);
        CHECK(std::abs(wdl - wdr) < 1e-7);
    }
}

TEST_CASE("payload reference holds hover outside the window") {
    RngStream rng(4);
    ReferenceSpec s = sample_reference(rng, 25.0);
    PayloadReference r = payload_reference(2.0, s);
    CHECK((r.pos - s.origin).norm() == 0.0);
    CHECK(r.vel.norm() == 0.0);
    CHECK(r.acc.norm() == 0.0);
}

TEST_CASE("plateau velocity matches the analytic sinusoid derivative") {
    ReferenceSpec s;
    s.amp = {1.5, 0.0, 0.0};
    s.freq_hz = {0.15, 0.0, 0.0};
    s.phase = {kPi / 2.0, kPi / 2.0, kPi / 2.0};
    s.t_start = 5.0;
    s.t_end = 20.0;
    double omega = 2.0 * kPi * 0.15;
    double peak = 0.0;
    for (double t = 8.0; t <= 17.0; t += 0.001) {
        PayloadReference r = payload_reference(t, s);
        double expected = s.amp.x * omega * std::sin(omega * t + s.phase.x);
        CHECK(r.vel.x == Catch::Approx(expected).margin(1e-12));
        peak = std::max(peak, std::abs(r.vel.x));
    }
    CHECK(peak <= s.amp.x * omega + 1e-12);
    CHECK(peak > 0.95 * s.amp.x * omega);
}

TEST_CASE("derivatives agree with central finite differences") {
    RngStream rng(12);
    const double h = 1e-4;
    for (int trial = 0; trial < 20; ++trial) {
        ReferenceSpec s = sample_reference(rng, 25.0);
        for (double t : {1.0, 6.1, 7.3, 12.0, 13.7, 18.2, 22.0}) {
            PayloadReference r = payload_reference(t, s);
            PayloadReference rp = payload_reference(t + h, s);
            PayloadReference rm = payload_reference(t - h, s);
            Vec3 v_fd = (rp.pos - rm.pos) / (2.0 * h);
            Vec3 a_fd = (rp.vel - rm.vel) / (2.0 * h);
            Vec3 j_fd = (rp.acc - rm.acc) / (2.0 * h);
            CHECK((v_fd - r.vel).norm() < 1e-6);
            CHECK((a_fd - r.acc).norm() < 1e-6);
            CHECK((j_fd - r.jerk).norm() < 1e-5);
        }
    }
}

TEST_CASE("position and velocity are continuous at window corners") {
    RngStream rng(23);
    ReferenceSpec s = sample_reference(rng, 25.0);
    for (double t0 : {s.t_start, s.t_start + s.ramp, s.t_end - s.ramp, s.t_end}) {
        PayloadReference l = payload_reference(t0 - 1e-9, s);
        PayloadReference r = payload_reference(t0 + 1e-9, s);
        CHECK((l.pos - r.pos).norm() < 1e-7);
        CHECK((l.vel - r.vel).norm() < 1e-6);
    }
}

TEST_CASE("flatness map at hover points straight up") {
    ReferenceSpec s;  // zero amplitudes: pure hover
    ReferenceSample r = quadrotor_reference(3.0, s, 0.2, 1.0);
    CHECK((r.q_cable - Vec3{0.0, 0.0, -1.0}).norm() < 1e-15);
    CHECK((r.x_quad - (r.x_payload + Vec3{0.0, 0.0, 1.0})).norm() < 1e-15);
    CHECK(r.tension == Catch::Approx(0.2 * 9.81));
}

TEST_CASE("cable direction is invariant to payload mass") {
    RngStream rng(6);
    ReferenceSpec s = sample_reference(rng, 25.0);
    for (double t : {6.0, 10.0, 14.0, 19.0}) {
        ReferenceSample a = quadrotor_reference(t, s, 0.2, 1.0);
        ReferenceSample b = quadrotor_reference(t, s, 0.1, 1.0);
        CHECK((a.q_cable - b.q_cable).norm() < 1e-15);
    }
}

TEST_CASE("quadrotor reference keeps the cable length exactly") {
    RngStream rng(61);
    ReferenceSpec s = sample_reference(rng, 25.0);
    for (double t = 0.0; t <= 25.0; t += 0.05) {
        ReferenceSample r = quadrotor_reference(t, s, 0.2, 0.7);
        CHECK(std::abs((r.x_quad - r.x_payload).norm() - 0.7) < 1e-12);
    }
}

TEST_CASE("quadrotor reference velocity matches finite differences") {
    RngStream rng(8);
    ReferenceSpec s = sample_reference(rng, 25.0);
    const double h = 1e-5;
    for (double t : {6.5, 11.0, 16.0}) {
        ReferenceSample r = quadrotor_reference(t, s, 0.2, 1.0);
        ReferenceSample rp = quadrotor_reference(t + h, s, 0.2, 1.0);
        ReferenceSample rm = quadrotor_reference(t - h, s, 0.2, 1.0);
        Vec3 v_fd = (rp.x_quad - rm.x_quad) / (2.0 * h);
        Vec3 a_fd = (rp.v_quad - rm.v_quad) / (2.0 * h);
        CHECK((v_fd - r.v_quad).norm() < 1e-5);
        CHECK((a_fd - r.a_quad).norm() < 1e-4);
    }
}

TEST_CASE("flatness consistency with the coupled taut equation") {
    // substituting the flat outputs into the taut translational equation
    // balances: residual of (m_Q+m_P)(a_P + g e3) - (q . u - m_Q l |qd|^2) q
    // with u the implied thrust vector.
    RngStream rng(77);
    const double m_q = 0.835, g = 9.81;
    for (int trial = 0; trial < 25; ++trial) {
        ReferenceSpec s = sample_reference(rng, 25.0);
        double m_p = rng.uniform(0.05, 0.2);
        double l = rng.uniform(0.3, 1.0);
        for (double t = 8.5; t <= 16.5; t += 0.5) {  // window plateau
            ReferenceSample r = quadrotor_reference(t, s, m_p, l, g);
            ReferenceSample rp = quadrotor_reference(t + 1e-5, s, m_p, l, g);
            ReferenceSample rm = quadrotor_reference(t - 1e-5, s, m_p, l, g);
            Vec3 qdot = (rp.q_cable - rm.q_cable) / 2e-5;
            // cable pulls the quadrotor toward the payload (+T q), so the
            // implied rotor thrust is m_Q (a_Q + g e3) - T q
            Vec3 u = m_q * (r.a_quad + Vec3{0.0, 0.0, g}) - r.tension * r.q_cable;
            Vec3 lhs = (m_q + m_p) * (r.a_payload + Vec3{0.0, 0.0, g});
            Vec3 rhs =
                (r.q_cable.dot(u) - m_q * l * qdot.dot(qdot)) * r.q_cable;
            double scale = std::max(lhs.norm(), (m_q + m_p) * g);
            CHECK((lhs - rhs).norm() / scale < 1e-3);
        }
    }
}

TEST_CASE("zero amplitude reduces to constant hover with offset") {
    ReferenceSpec s = hover_reference({0.0, 0.0, 2.0}, 25.0);
    for (double t = 0.0; t <= 25.0; t += 1.0) {
        ReferenceSample r = quadrotor_reference(t, s, 0.1, 0.5);
        CHECK((r.x_payload - Vec3{0.0, 0.0, 2.0}).norm() < 1e-15);
        CHECK((r.x_quad - Vec3{0.0, 0.0, 2.5}).norm() < 1e-15);
        CHECK(r.v_payload.norm() < 1e-15);
    }
}

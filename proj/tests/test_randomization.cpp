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

#include "cablequad/randomization.hpp"

using namespace cablequad;

TEST_CASE("randomized params stay inside the protocol ranges") {
    SystemParams nominal;
    RandomizationRanges rr;
    RngStream rng(10);
    for (int i = 0; i < 10000; ++i) {
        SystemParams p = randomize_params(nominal, rr, rng);
        CHECK(p.m_payload >= 0.0);
        CHECK(p.m_payload <= 0.2);
        CHECK(p.cable_length >= 0.0);
        CHECK(p.cable_length <= 1.0);
        CHECK(p.delay >= 0.010);
        CHECK(p.delay <= 0.030);
        CHECK(p.m_quad >= nominal.m_quad * 0.9 - 1e-12);
        CHECK(p.m_quad <= nominal.m_quad * 1.1 + 1e-12);
        for (int k = 0; k < 4; ++k) {
            CHECK(p.gear[k] >= 0.95 - 1e-12);
            CHECK(p.gear[k] <= 1.05 + 1e-12);
        }
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(p.com_offset(k)) <= 0.01 + 1e-12);
    }
}

TEST_CASE("randomized inertia stays symmetric positive definite") {
    SystemParams nominal;
    RandomizationRanges rr;
    RngStream rng(11);
    for (int i = 0; i < 2000; ++i) {
        SystemParams p = randomize_params(nominal, rr, rng);
        // symmetry
        Mat3 diff = p.inertia - p.inertia.transposed();
        for (double v : diff.m) CHECK(std::abs(v) < 1e-15);
        // positive definite via leading principal minors
        double d1 = p.inertia(0, 0);
        double d2 = p.inertia(0, 0) * p.inertia(1, 1) -
                    p.inertia(0, 1) * p.inertia(1, 0);
        double d3 = p.inertia.det();
        CHECK(d1 > 0.0);
        CHECK(d2 > 0.0);
        CHECK(d3 > 0.0);
    }
}

TEST_CASE("zero-width ranges reproduce the nominal platform") {
    SystemParams nominal;
    RandomizationRanges rr = RandomizationRanges::off();
    rr.m_payload_min = rr.m_payload_max = nominal.m_payload;
    rr.cable_length_min = rr.cable_length_max = nominal.cable_length;
    rr.delay_min = rr.delay_max = nominal.delay;
    RngStream rng(12);
    SystemParams p = randomize_params(nominal, rr, rng);
    CHECK(p.m_quad == nominal.m_quad);
    CHECK(p.m_payload == nominal.m_payload);
    CHECK(p.cable_length == nominal.cable_length);
    CHECK(p.delay == nominal.delay);
    for (int i = 0; i < 9; ++i) CHECK(p.inertia.m[i] == nominal.inertia.m[i]);
    for (int k = 0; k < 4; ++k) CHECK(p.gear[k] == 1.0);
}

TEST_CASE("same seed reproduces the same draw") {
    SystemParams nominal;
    RandomizationRanges rr;
    RngStream a(77), b(77);
    SystemParams pa = randomize_params(nominal, rr, a);
    SystemParams pb = randomize_params(nominal, rr, b);
    CHECK(pa.m_quad == pb.m_quad);
    CHECK(pa.m_payload == pb.m_payload);
    CHECK(pa.cable_length == pb.cable_length);
    CHECK(pa.delay == pb.delay);
    for (int i = 0; i < 9; ++i) CHECK(pa.inertia.m[i] == pb.inertia.m[i]);
}

TEST_CASE("initial perturbation stays in the protocol boxes") {
    RngStream rng(13);
    for (int i = 0; i < 10000; ++i) {
        InitialPerturbation d = sample_initial_perturbation(rng);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(d.position(k)) <= 0.1);
            CHECK(std::abs(d.velocity(k)) <= 0.1);
            CHECK(std::abs(d.attitude(k)) <= kPi / 12.0);
            CHECK(std::abs(d.body_rate(k)) <= kPi / 12.0);
        }
    }
}

TEST_CASE("impulse disturbance stays in the protocol bounds") {
    RngStream rng(14);
    for (int i = 0; i < 10000; ++i) {
        Disturbance d = sample_impulse_disturbance(rng, 8.0, 17.0);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(d.force(k)) <= 0.5);
            CHECK(std::abs(d.moment(k)) <= 0.005);
        }
        CHECK(d.duration >= 0.0);
        CHECK(d.duration <= 0.5);
        CHECK(d.t_start >= 8.0);
        CHECK(d.t_start <= 17.0);
    }
}

TEST_CASE("zero duration never activates") {
    Disturbance d;
    d.force = {0.3, 0.0, 0.0};
    d.t_start = 5.0;
    d.duration = 0.0;
    for (double t = 0.0; t < 10.0; t += 0.01) CHECK_FALSE(d.active(t));
}

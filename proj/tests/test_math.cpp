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

#include "cablequad/math.hpp"

using namespace cablequad;

TEST_CASE("hat map basics") {
    Mat3 z = hat(Vec3::zero());
    for (double v : z.m) CHECK(v == 0.0);

    Vec3 e2 = hat(Vec3::unit_z()) * Vec3::unit_x();
    CHECK(e2.x == Catch::Approx(0.0).margin(1e-15));
    CHECK(e2.y == Catch::Approx(1.0));
    CHECK(e2.z == Catch::Approx(0.0).margin(1e-15));

    Mat3 s = hat({1.0, 2.0, 3.0});
    Mat3 sum = s + s.transposed();
    for (double v : sum.m) CHECK(v == 0.0);
}

TEST_CASE("hat map reproduces the cross product") {
    RngStream rng(42);
    for (int i = 0; i < 200; ++i) {
        Vec3 v = rng.uniform_box(-10.0, 10.0);
        Vec3 w = rng.uniform_box(-10.0, 10.0);
        Vec3 a = hat(v) * w;
        Vec3 b = v.cross(w);
        CHECK((a - b).norm() < 1e-12);
    }
}

TEST_CASE("so3_exp identity and quarter turn") {
    Rot3 r = so3_exp(Vec3::zero());
    CHECK(orthonormality_error(r) < 1e-15);
    CHECK((r * Vec3::unit_x() - Vec3::unit_x()).norm() < 1e-15);

    Rot3 qz = so3_exp({0.0, 0.0, kPi / 2.0});
    Vec3 e2 = qz * Vec3::unit_x();
    CHECK((e2 - Vec3::unit_y()).norm() < 1e-12);
}

TEST_CASE("so3_exp inverse and orthonormality") {
    RngStream rng(7);
    for (int i = 0; i < 200; ++i) {
        Vec3 w = rng.unit_sphere() * rng.uniform(0.0, kPi - 1e-3);
        Rot3 r = so3_exp(w) * so3_exp(-w);
        Mat3 err = r - Mat3::identity();
        double mx = 0.0;
        for (double v : err.m) mx = std::max(mx, std::abs(v));
        CHECK(mx < 1e-12);

        Rot3 rr = so3_exp(w);
        CHECK(orthonormality_error(rr) < 1e-9);
        CHECK(std::abs(rr.det() - 1.0) < 1e-9);
    }
}

TEST_CASE("so3_exp small-angle branch stays finite and consistent") {
    Vec3 tiny{1e-10, -2e-10, 5e-11};
    Rot3 r = so3_exp(tiny);
    CHECK(orthonormality_error(r) < 1e-12);
    // compare against the large-angle formula just above the branch switch
    Vec3 w{2e-8, 1e-8, -1e-8};
    Rot3 a = so3_exp(w);
    Rot3 b = so3_exp(w * 0.5) * so3_exp(w * 0.5);
    Mat3 diff = a - b;
    for (double v : diff.m) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("euler zyx round trip") {
    RngStream rng(99);
    for (int i = 0; i < 100; ++i) {
        double roll = rng.uniform(-1.4, 1.4);
        double pitch = rng.uniform(-1.4, 1.4);
        double yaw = rng.uniform(-3.0, 3.0);
        Rot3 r = rot_from_euler_zyx(roll, pitch, yaw);
        EulerZyx e = euler_zyx(r);
        CHECK(e.roll == Catch::Approx(roll).margin(1e-9));
        CHECK(e.pitch == Catch::Approx(pitch).margin(1e-9));
        CHECK(e.yaw == Catch::Approx(yaw).margin(1e-9));
    }
}

TEST_CASE("reorthonormalization contracts drift") {
    Rot3 r = so3_exp({0.3, -0.2, 0.9});
    // inject artificial drift
    r(0, 0) += 1e-6;
    r(1, 2) -= 1e-6;
    Rot3 fixed = reorthonormalized(r);
    CHECK(orthonormality_error(fixed) < orthonormality_error(r) * 1e-2);
}

TEST_CASE("rng determinism and stream independence") {
    RngStream a(123), b(123);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    // empirical correlation between distinct-seed streams
    RngStream s1(1), s2(2);
    const int n = 100000;
    double sum1 = 0, sum2 = 0, sum11 = 0, sum22 = 0, sum12 = 0;
    for (int i = 0; i < n; ++i) {
        double x = s1.uniform01(), y = s2.uniform01();
        sum1 += x; sum2 += y;
        sum11 += x * x; sum22 += y * y; sum12 += x * y;
    }
    double m1 = sum1 / n, m2 = sum2 / n;
    double cov = sum12 / n - m1 * m2;
    double v1 = sum11 / n - m1 * m1, v2 = sum22 / n - m2 * m2;
    double corr = cov / std::sqrt(v1 * v2);
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("rng normal moments") {
    RngStream rng(5);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = rng.normal(0.0, 2.0);
        sum += x;
        sq += x * x;
    }
    double mean = sum / n;
    double stddev = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.03);
    CHECK(stddev == Catch::Approx(2.0).epsilon(0.02));
}

TEST_CASE("upper hemisphere sampling points up") {
    RngStream rng(11);
    for (int i = 0; i < 1000; ++i) {
        Vec3 v = rng.upper_hemisphere();
        CHECK(v.z >= 0.0);
        CHECK(v.norm() == Catch::Approx(1.0).margin(1e-12));
    }
}

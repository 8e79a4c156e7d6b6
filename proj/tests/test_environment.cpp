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

#include "cablequad/environment.hpp"

using namespace cablequad;

namespace {

EnvConfig quiet_config() {
    EnvConfig cfg;
    cfg.noise_enabled = false;
    cfg.randomize_params_enabled = false;
    cfg.initial_perturbation_enabled = false;
    cfg.impulse_enabled = false;
    cfg.ground_effect_enabled = false;
    cfg.slack_init_prob = 0.0;
    cfg.hover_reference = true;
    cfg.episode_horizon = 5.0;
    return cfg;
}

Action hover_action(const SystemParams& p) {
    Action a;
    a.collective = 2.0 * p.total_mass() * p.g / p.f_max - 1.0;
    return a;
}

}  // namespace

TEST_CASE("observation dimension matches the layout") {
    EnvConfig cfg = quiet_config();
    Environment env(cfg, 1);
    auto obs = env.reset();
    CHECK(static_cast<int>(obs.size()) == cfg.obs.size());
    CHECK(env.obs_dim() == cfg.obs.size());
}

TEST_CASE("hover action keeps the quiet environment at hover") {
    EnvConfig cfg = quiet_config();
    Environment env(cfg, 2);
    env.reset();
    Action a = hover_action(cfg.nominal);
    Vec3 start = env.state().quad.x;
    for (int k = 0; k < 200; ++k) {  // 2 s
        auto sr = env.step(a);
        REQUIRE_FALSE(sr.done);
    }
    CHECK((env.state().quad.x - start).norm() < 0.02);
    CHECK(env.state().quad.v.norm() < 0.03);
}

TEST_CASE("episodes truncate exactly at the horizon") {
    EnvConfig cfg = quiet_config();
    Environment env(cfg, 3);
    env.reset();
    Action a = hover_action(cfg.nominal);
    int steps = 0;
    while (true) {
        auto sr = env.step(a);
        ++steps;
        if (sr.done) {
            CHECK(std::string(sr.reason) == "timeout");
            break;
        }
        REQUIRE(steps < 10000);
    }
    CHECK(steps == cfg.max_steps());
}

TEST_CASE("episodes are deterministic per seed") {
    EnvConfig cfg = quiet_config();
    cfg.noise_enabled = true;
    cfg.randomize_params_enabled = true;
    cfg.initial_perturbation_enabled = true;
    cfg.impulse_enabled = true;
    cfg.hover_reference = false;
    cfg.episode_horizon = 25.0;

    Environment a(cfg, 42), b(cfg, 42);
    auto oa = a.reset();
    auto ob = b.reset();
    REQUIRE(oa.size() == ob.size());
    for (std::size_t i = 0; i < oa.size(); ++i) REQUIRE(oa[i] == ob[i]);

    Action act = hover_action(cfg.nominal);
    for (int k = 0; k < 100; ++k) {
        auto ra = a.step(act);
        auto rb = b.step(act);
        REQUIRE(ra.reward == rb.reward);
        REQUIRE(ra.done == rb.done);
        for (std::size_t i = 0; i < ra.obs.size(); ++i)
            REQUIRE(ra.obs[i] == rb.obs[i]);
        if (ra.done) break;
    }

    // distinct seeds diverge
    Environment c(cfg, 43);
    auto oc = c.reset();
    bool same = true;
    for (std::size_t i = 0; i < oa.size(); ++i)
        if (oa[i] != oc[i]) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("sensor noise corrupts only the observation path") {
    EnvConfig quiet = quiet_config();
    EnvConfig noisy = quiet;
    noisy.noise_enabled = true;

    Environment a(quiet, 9), b(noisy, 9);
    a.reset();
    b.reset();
    Action act = hover_action(quiet.nominal);
    for (int k = 0; k < 50; ++k) {
        auto ra = a.step(act);
        auto rb = b.step(act);
        // true simulator state identical; observations differ
        REQUIRE((a.state().quad.x - b.state().quad.x).norm() == 0.0);
        REQUIRE((a.state().payload.x - b.state().payload.x).norm() == 0.0);
        if (k == 0) {
            bool any_diff = false;
            for (std::size_t i = 0; i < ra.obs.size(); ++i)
                if (ra.obs[i] != rb.obs[i]) any_diff = true;
            CHECK(any_diff);
        }
    }
}

TEST_CASE("randomization draws fresh params per episode") {
    EnvConfig cfg = quiet_config();
    cfg.randomize_params_enabled = true;
    Environment env(cfg, 5);
    env.reset();
    double m1 = env.params().m_payload;
    env.reset();
    double m2 = env.params().m_payload;
    CHECK(m1 != m2);
}

TEST_CASE("forced slack start hangs the payload below on a loose cable") {
    EnvConfig cfg = quiet_config();
    cfg.nominal.m_payload = 0.2;
    cfg.nominal.cable_length = 1.0;
    cfg.slack_init_prob = 1.0;
    cfg.slack_init_frac = 0.3;
    Environment env(cfg, 6);
    env.reset();
    CHECK(env.state().mode == CableMode::Slack);
    double d = (env.state().payload.x - env.state().quad.x).norm();
    CHECK(d == Catch::Approx(0.3 * cfg.nominal.cable_length));
}

TEST_CASE("impulse disturbance bends the trajectory inside its window") {
    EnvConfig base = quiet_config();
    base.episode_horizon = 25.0;
    base.hover_reference = true;

    EnvConfig with = base;
    with.impulse_enabled = true;

    Environment a(base, 11), b(with, 11);
    a.reset();
    b.reset();
    const Disturbance& imp = b.impulse();
    REQUIRE(imp.duration >= 0.0);

    Action act = hover_action(base.nominal);
    double max_gap = 0.0;
    int steps = static_cast<int>((imp.t_start + imp.duration + 1.0) / 0.01);
    steps = std::min(steps, base.max_steps() - 1);
    for (int k = 0; k < steps; ++k) {
        a.step(act);
        b.step(act);
        max_gap = std::max(max_gap,
                           (a.state().quad.x - b.state().quad.x).norm());
    }
    if (imp.duration > 0.01 && imp.force.norm() > 0.05)
        CHECK(max_gap > 1e-5);
}

TEST_CASE("payload-free configuration aliases the payload state") {
    EnvConfig cfg = quiet_config();
    cfg.nominal.m_payload = 0.0;
    cfg.nominal.cable_length = 0.0;
    Environment env(cfg, 12);
    env.reset();
    Action act = hover_action(cfg.nominal);
    for (int k = 0; k < 20; ++k) env.step(act);
    CHECK((env.state().payload.x - env.state().quad.x).norm() == 0.0);
    CHECK(env.state().mode == CableMode::NoPayload);
}

TEST_CASE("ground effect only acts near the ground") {
    EnvConfig low = quiet_config();
    low.nominal.m_payload = 0.0;   // quad-only so the body sits at the base
    low.nominal.cable_length = 0.0;
    low.base_position = {0.0, 0.0, 0.3};  // inside the activation band
    low.ground_effect_enabled = true;
    EnvConfig quiet_low = low;
    quiet_low.ground_effect_enabled = false;

    Environment a(low, 13), b(quiet_low, 13);
    a.reset();
    b.reset();
    Action act = hover_action(low.nominal);
    double gap = 0.0;
    for (int k = 0; k < 100; ++k) {
        a.step(act);
        b.step(act);
        gap = std::max(gap, (a.state().quad.x - b.state().quad.x).norm());
    }
    CHECK(gap > 1e-6);

    // high above the band the toggle has no effect
    EnvConfig high = quiet_config();
    high.ground_effect_enabled = true;
    Environment c(high, 14), d(quiet_config(), 14);
    c.reset();
    d.reset();
    double gap_high = 0.0;
    for (int k = 0; k < 100; ++k) {
        c.step(act);
        d.step(act);
        gap_high = std::max(gap_high,
                            (c.state().quad.x - d.state().quad.x).norm());
    }
    CHECK(gap_high == 0.0);
}
